"""Command-line entry point.

Exit codes: 0 success, 1 usage, 2 parse error, 3 graph validation, 4 computation.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .corolla import (
    apply_differential,
    corolla,
    corolla_differential,
    corolla_summand,
    qcd_gauge_factor,
    schwinger_res_reg,
)
from .electroweak import (
    TableIncompleteness,
    apply_ew,
    coupling_product,
    enumerate_labelings,
    gauge_boson_labelings,
    j_factor,
    load_rules,
    scalar_sets,
)
from .expr import Expression, IncompleteRouting, MalformedExpression, UnsupportedExpansion
from .expr.poly import natural_key
from .expr.render import poly_text, rat_text, render, to_json
from .graph import (
    GraphError,
    GraphParseError,
    GraphValidationError,
    all_cycles,
    disjoint_cycle_tuples,
    load_graph,
    spanning_2forests,
    spanning_trees,
    symmetry_factor,
    two_factors,
)
from .parametric import first_symanzik, parametric_integrand, parse_routing, phi_text, second_symanzik

EXIT_USAGE, EXIT_PARSE, EXIT_VALIDATION, EXIT_COMPUTE = 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _edges(items) -> str:
    return "{" + ",".join(sorted(items, key=natural_key)) + "}"


def _emit(args, text: str, data) -> str:
    if args.format == "json":
        return json.dumps(data)
    return text


# ---------------------------------------------------------------- subcommands
def cmd_symanzik(g, args) -> str:
    psi = first_symanzik(g)
    phi = second_symanzik(g)
    if args.format == "json":
        return json.dumps({"psi": to_json(Expression.scalar(psi)), "phi": to_json(phi)})
    if args.format == "latex":
        return f"\\psi = {poly_text(psi, True)}\n\\phi = {render(phi, 'latex')}"
    return f"psi = {poly_text(psi)}\nphi = {phi_text(g)}"


def cmd_integrand(g, args) -> str:
    expr = parametric_integrand(g).expression()
    if args.routing_map is not None:
        from .parametric import complete_routing

        route, names = complete_routing(g, args.routing_map)
        expr = expr.substitute_momenta(route, names)
    return render(expr, args.format)


def cmd_corolla(g, args) -> str:
    if args.ghost_order is not None:
        c = corolla_summand(g, args.ghost_order)
        if args.variant == "qcd":
            from .corolla import qcd_prefactor

            c = c.scale(qcd_prefactor(g, args.color, args.phase_edges))
    else:
        c = corolla(g, args.variant, args.color, args.phase_edges)
    return c.render(args.format)


def cmd_diff(g, args) -> str:
    gf = qcd_gauge_factor(g, args.routing_map, args.color, args.phase_edges)
    return render(gf, args.format)


def cmd_resreg(g, args) -> str:
    d = corolla_differential(g, corolla(g, "qcd", args.color, args.phase_edges))
    full, _ = apply_differential(g, d, args.routing_map)
    return render(schwinger_res_reg(g, full, args.shrink), args.format)


def cmd_ew_gauge(g, args) -> str:
    j = j_factor(g, args.color, args.phase_edges)
    labs = gauge_boson_labelings(g)
    sym_g = symmetry_factor(g)
    if args.format == "json":
        return json.dumps({
            "J": to_json(j),
            "labelings": [
                {"W": sorted(l.w_factor.edges, key=natural_key), "Z": sorted(l.z_set, key=natural_key),
                 "A": sorted(l.a_set, key=natural_key), "sym": l.sym, "iso": l.iso}
                for l in labs
            ],
        })
    lines = [f"J = {render(j, args.format)}", f"labelings: {len(labs)}"]
    for l in labs:
        ratio = sym_g / (l.sym * l.iso)
        lines.append(
            f"  W={_edges(l.w_factor.edges)} Z={_edges(l.z_set)} A={_edges(l.a_set)}"
            f"  sym={l.sym} iso={l.iso} ratio={ratio:g}"
        )
    return "\n".join(lines)


def cmd_ew_scalar(g, args) -> str:
    rules = load_rules(args.rules)
    order = args.ghost_order or 0
    items = []
    lines = []
    for ghosts in disjoint_cycle_tuples(g, order):
        gtext = " ".join(_edges(c.edges) for c in ghosts) or "-"
        for s in scalar_sets(g, ghosts):
            labs = enumerate_labelings(g, s, rules)
            h2 = ", ".join(f"{e}:{{{' '.join(str(h) for h in hs)}}}" for e, hs in s.h2 if hs) or "-"
            lines.append(f"ghosts={gtext} P={_edges(s.p_hg)} P4={_edges(s.p4)} H2={h2} labelings={len(labs)}")
            entry = {"ghosts": [sorted(c.edges, key=natural_key) for c in ghosts],
                     "P": sorted(s.p_hg, key=natural_key), "P4": sorted(s.p4, key=natural_key),
                     "H2": {e: [[h.vertex, h.edge] for h in hs] for e, hs in s.h2}, "labelings": []}
            for l in labs:
                c = coupling_product(g, l, s, rules)
                labels = " ".join(f"{e}={x}" for e, x in l.labels)
                lines.append(f"  {labels}  sym={l.sym} iso={l.iso}  coupling={rat_text(c, args.format == 'latex')}")
                entry["labelings"].append({"labels": dict(l.labels), "sym": l.sym, "iso": l.iso,
                                           "coupling": to_json(Expression.scalar(c))})
            items.append(entry)
    return _emit(args, "\n".join(lines), items)


def cmd_ew_apply(g, args) -> str:
    rules = load_rules(args.rules)
    return render(apply_ew(g, rules, args.routing_map, args.color, args.phase_edges), args.format)


def cmd_enumerate(g, args) -> str:
    trees = spanning_trees(g)
    forests = spanning_2forests(g)
    factors = two_factors(g)
    cycles = all_cycles(g)
    if args.format == "json":
        return json.dumps({
            "spanning_trees": [sorted(t, key=natural_key) for t in trees],
            "spanning_2forests": [{"edges": sorted(f.edges, key=natural_key),
                                   "parts": [sorted(f.part1, key=natural_key), sorted(f.part2, key=natural_key)]}
                                  for f in forests],
            "two_factors": [{"edges": sorted(f.edges, key=natural_key),
                             "components": [[k, list(es)] for k, es in f.components]} for f in factors],
            "cycles": [sorted(c.edges, key=natural_key) for c in cycles],
        })
    lines = [f"spanning trees: {len(trees)}"]
    lines += [f"  {_edges(t)}" for t in trees]
    lines.append(f"spanning 2-forests: {len(forests)}")
    lines += [f"  {_edges(f.edges)}  parts {_edges(f.part1)} | {_edges(f.part2)}" for f in forests]
    lines.append(f"2-factors: {len(factors)}")
    for f in factors:
        comps = " ".join(f"{k}({','.join(es)})" for k, es in f.components)
        lines.append(f"  {_edges(f.edges)}  {comps}")
    lines.append(f"cycles: {len(cycles)}")
    lines += [f"  {_edges(c.edges)}" for c in cycles]
    return "\n".join(lines)


COMMANDS = {
    "symanzik": (cmd_symanzik, "print the first and second Symanzik polynomials"),
    "integrand": (cmd_integrand, "print the parametric integrand"),
    "corolla": (cmd_corolla, "print the Corolla polynomial or one ghost summand"),
    "diff": (cmd_diff, "print the gauge factor of the QCD Corolla differential"),
    "resreg": (cmd_resreg, "residues at shrunk edges and regular parts elsewhere"),
    "ew-gauge": (cmd_ew_gauge, "print J and the W/Z/A labeling table"),
    "ew-scalar": (cmd_ew_scalar, "print scalar sets and labelings with couplings"),
    "ew-apply": (cmd_ew_apply, "apply the QCD plus electroweak differential"),
    "enumerate": (cmd_enumerate, "list spanning trees, 2-forests, 2-factors and cycles"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gaugeparam", description="Parametric gauge-theory integrands from scalar graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("graph", help="graph file")
        sp.add_argument("--format", choices=("text", "latex", "json"), default="text")
        sp.add_argument("--routing", help="routing file with 'route <edge> = <momenta>' lines")
        sp.add_argument("--rules", help="coupling-rule file (default: bundled table)")
        sp.add_argument("--ghost-order", type=int, dest="ghost_order")
        sp.add_argument("--shrink", default="", help="comma-separated internal edge ids")
        sp.add_argument("--color", default="color", help="comma-separated colour tokens")
        sp.add_argument("--variant", choices=("plain", "qcd"), default="plain")
        sp.add_argument("--phase-edges", choices=("all", "internal"), default="all", dest="phase_edges")
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    args.color = tuple(x for x in args.color.split(",") if x)
    args.shrink = [x for x in args.shrink.split(",") if x]
    where = args.graph
    try:
        if args.ghost_order is not None and args.ghost_order < 0:
            raise UsageError("--ghost-order must be non-negative")
        try:
            g = load_graph(args.graph)
            args.routing_map = None
            if args.routing:
                where = args.routing
                with open(args.routing, encoding="utf-8") as fh:
                    args.routing_map = parse_routing(fh.read(), g)
            if args.rules:
                where = args.rules
                load_rules(args.rules)
        except OSError as exc:
            raise UsageError(f"cannot read {exc.filename}: {exc.strerror}")
        text = COMMANDS[args.command][0](g, args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=err)
        return EXIT_USAGE
    except GraphParseError as exc:
        print(f"error: parse: {where}:{exc.line}:{exc.column}: {exc.message}", file=err)
        return EXIT_PARSE
    except GraphValidationError as exc:
        for v in exc.violations:
            print(f"error: validation: {args.graph}: {v.kind}: {v.message}", file=err)
        return EXIT_VALIDATION
    except IncompleteRouting as exc:
        print(f"error: routing: {exc}", file=err)
        return EXIT_COMPUTE
    except (TableIncompleteness, UnsupportedExpansion, MalformedExpression, GraphError) as exc:
        print(f"error: computation: {exc}", file=err)
        return EXIT_COMPUTE
    print(text, file=out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
