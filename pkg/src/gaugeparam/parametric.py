"""Symanzik polynomials and the parametric integrand of a scalar graph.

Conventions: every edge ``e`` has a Schwinger parameter ``A<e>``, a momentum
slot ``xi<e>`` and a Lorentz index ``mu<e>``.  The integrand is

    I = P * exp(-phi/psi - qbar) / psi**2

with ``P`` the product of ``xi_e**2 + m_e**2`` over external legs and
``qbar`` the external ``xi_e**2 A_e`` terms plus ``m_e**2 A_e`` for every
massive edge.  Constant overall factors are set to one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .expr import Expression, Poly, Quadric, Rat, make_pair
from .expr.poly import natural_key, poly_sum
from .graph import FeynmanGraph, GraphError, GraphParseError, epsilon, spanning_2forests, spanning_trees


def first_symanzik(g: FeynmanGraph) -> Poly:
    """Sum over spanning trees of the product of ``A_e`` over edges not in the tree."""
    A = g.schwinger
    terms = []
    for tree in spanning_trees(g):
        mono = Poly.const(1)
        for e in g.internal_ids:
            if e not in tree:
                mono = mono * Poly.var(A(e))
        terms.append(mono)
    return poly_sum(terms)


def forest_flows(g: FeynmanGraph, swap: bool = False) -> list[tuple[dict[str, int], Poly]]:
    """Per spanning 2-forest: the signed momentum flow and the monomial of cut edges.

    The flow coefficient of a cut edge is minus its incidence entry at the
    first part of the forest; ``swap`` uses the second part instead.
    """
    out = []
    for f in spanning_2forests(g):
        part = f.part2 if swap else f.part1
        flow: dict[str, int] = {}
        mono = Poly.const(1)
        for e in g.internal_ids:
            if e in f.edges:
                continue
            mono = mono * Poly.var(g.schwinger(e))
            tau = -sum(epsilon(g, v, e) for v in part)
            if tau:
                flow[g.momentum(e)] = tau
        out.append((flow, mono))
    return out


def flows_to_expression(flows: list[tuple[dict[str, int], Poly]]) -> Expression:
    acc: dict[tuple, Poly] = {}
    for flow, mono in flows:
        items = list(flow.items())
        for s, a in items:
            for t, b in items:
                key = make_pair(s, t)
                acc[key] = acc.get(key, Poly()) + mono.scale(a * b)
    from .expr.tensor import dot

    return Expression((Rat.from_poly(c), (dot(*k),), None) for k, c in acc.items())


def second_symanzik(g: FeynmanGraph, swap: bool = False) -> Expression:
    """Sum over 2-forests of the squared cut-momentum flow times the cut monomial."""
    return flows_to_expression(forest_flows(g, swap))


def _mass_poly(g: FeynmanGraph, e: str) -> Poly:
    m = g.mass(e)
    return Poly.var(m, 2) if m and m != "0" else Poly()


def reduced_quadric(g: FeynmanGraph) -> dict:
    entries: dict = {}
    for e in g.external_ids:
        xi = g.momentum(e)
        entries[(xi, xi)] = Rat.from_poly(Poly.var(g.schwinger(e)))
    masses = poly_sum(_mass_poly(g, e) * Poly.var(g.schwinger(e)) for e in g.edge_ids)
    if not masses.is_zero():
        entries[()] = Rat.from_poly(masses)
    return entries


def exponent_quadric(g: FeynmanGraph, psi: Poly | None = None, phi: Expression | None = None) -> Quadric:
    psi = psi if psi is not None else first_symanzik(g)
    phi = phi if phi is not None else second_symanzik(g)
    entries = reduced_quadric(g)
    for coef, atoms, _ in phi.terms():
        (a,) = atoms
        key = (a[1], a[2])
        r = coef.div_poly(psi)
        entries[key] = entries[key] + r if key in entries else r
    return Quadric(entries)


def external_prefactor(g: FeynmanGraph) -> Expression:
    out = Expression.one()
    for e in g.external_ids:
        xi = g.momentum(e)
        out = out * (Expression.dot(xi, xi) + Expression.scalar(_mass_poly(g, e)))
    return out


@dataclass(frozen=True)
class ParametricIntegrand:
    prefactor: Expression
    body: Expression
    psi: Poly
    phi: Expression
    quadric: Quadric

    def expression(self) -> Expression:
        return self.prefactor * self.body


def parametric_integrand(g: FeynmanGraph) -> ParametricIntegrand:
    if not g.is_connected():
        raise GraphError("graph is not connected")
    psi = first_symanzik(g)
    phi = second_symanzik(g)
    quad = exponent_quadric(g, psi, phi)
    body = Expression.exp(quad).div_poly(psi**2)
    return ParametricIntegrand(external_prefactor(g), body, psi, phi, quad)


# ---------------------------------------------------------------- display
def phi_text(g: FeynmanGraph) -> str:
    """Forest-sum form such as ``(xi1 - xi2)^2 A1 A2``; each square starts positive."""
    from .expr.render import poly_text

    pieces = []
    for flow, mono in forest_flows(g):
        if not flow:
            continue
        items = sorted(flow.items(), key=lambda kv: natural_key(kv[0]))
        if items[0][1] < 0:
            items = [(s, -c) for s, c in items]
        inner = ""
        for k, (s, c) in enumerate(items):
            mag = "" if abs(c) == 1 else f"{abs(c)} "
            if k == 0:
                inner += ("-" if c < 0 else "") + mag + s
            else:
                inner += (" - " if c < 0 else " + ") + mag + s
        square = f"({inner})^2" if len(items) > 1 else f"{inner}^2"
        pieces.append(f"{square} {poly_text(mono)}")
    return " + ".join(pieces) if pieces else "0"


# ---------------------------------------------------------------- momentum routing
Routing = dict[str, dict[str, int]]


def automatic_routing(g: FeynmanGraph) -> tuple[Routing, list[str]]:
    """Route external momenta through a spanning tree; chords carry zero.

    With two legs the independent momentum is called ``q``; otherwise every
    leg but the last gets ``q<id>`` and the last one balances the sum.
    Returns ``(routing, independent momentum names)``.
    """
    ext = list(g.external_ids)
    routing: Routing = {}
    if len(ext) == 2:
        names = ["q"]
    else:
        names = [f"q{e}" for e in ext[:-1]]
    for k, e in enumerate(ext[:-1]):
        routing[g.momentum(e)] = {names[k]: 1}
    if ext:
        last = {}
        for k in range(len(ext) - 1):
            last[names[k]] = -1
        routing[g.momentum(ext[-1])] = last
    _route_internal(g, routing)
    return routing, names


def _route_internal(g: FeynmanGraph, routing: Routing) -> None:
    root = g.vertices[0]
    parent: dict[str, tuple[str, str] | None] = {root: None}
    order = [root]
    for v in order:
        for e in g.incident(v):
            if g.is_external(e):
                continue
            w = g.other_end(e, v)
            if w not in parent:
                parent[w] = (v, e)
                order.append(w)
    if len(order) != len(g.vertices):
        raise GraphError("graph is not connected")
    tree = {p[1] for p in parent.values() if p}
    for e in g.internal_ids:
        if e not in tree and g.momentum(e) not in routing:
            routing[g.momentum(e)] = {}
    for v in reversed(order):
        if parent[v] is None:
            continue
        _, pe = parent[v]
        if g.momentum(pe) in routing:
            continue
        total: dict[str, Fraction] = {}
        for e in g.incident(v):
            if e == pe:
                continue
            eps = epsilon(g, v, e)
            for q, c in routing[g.momentum(e)].items():
                total[q] = total.get(q, 0) + eps * c
        eps_p = epsilon(g, v, pe)
        routing[g.momentum(pe)] = {q: int(-c / eps_p) for q, c in total.items() if c}


_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*([A-Za-z_][A-Za-z0-9_]*)\s*")


def parse_linear(text: str, line: int = 1, col0: int = 1) -> dict[str, int]:
    out: dict[str, int] = {}
    pos = 0
    text = text.rstrip()
    if text.strip() == "0":
        return out
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (not first and not m.group(1)):
            raise GraphParseError(line, col0 + pos, f"cannot read momentum combination at {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        k = int(m.group(2)) if m.group(2) else 1
        out[m.group(3)] = out.get(m.group(3), 0) + sign * k
        pos = m.end()
        first = False
    return {q: c for q, c in out.items() if c}


def parse_routing(text: str, g: FeynmanGraph | None = None) -> Routing:
    """Read ``route <edge-id> = <combination>`` lines into a routing of ``xi`` slots."""
    routing: Routing = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = re.match(r"\s*route\s+(\S+)\s*=\s*(.*)$", line)
        if not m:
            raise GraphParseError(lineno, 1, "expected 'route <edge-id> = <momenta>'")
        eid = m.group(1)
        if g is not None and eid not in g.edge_ids:
            raise GraphParseError(lineno, m.start(1) + 1, f"unknown edge {eid!r}")
        routing[FeynmanGraph.momentum(eid)] = parse_linear(m.group(2), lineno, m.start(2) + 1)
    return routing


def complete_routing(g: FeynmanGraph, overrides: Mapping[str, Mapping[str, int]] | None = None) -> tuple[Routing, list[str]]:
    """Automatic routing with per-edge overrides; unspecified tree edges follow conservation."""
    auto, names = automatic_routing(g)
    if not overrides:
        return auto, names
    routing: Routing = {k: dict(v) for k, v in overrides.items()}
    free = set(names)
    for v in routing.values():
        free |= set(v)
    ext_given = all(g.momentum(e) in routing for e in g.external_ids)
    if not ext_given:
        for e in g.external_ids:
            routing.setdefault(g.momentum(e), auto[g.momentum(e)])
    try:
        _route_internal(g, routing)
    except GraphError:
        raise
    for e in g.edge_ids:
        routing.setdefault(g.momentum(e), auto[g.momentum(e)])
    return routing, sorted(free, key=natural_key)
