"""Electroweak labelings, the J-factor and the scalar-sector Corolla polynomial.

Labels: gauge bosons ``W``, ``Z``, ``A`` (their ghosts share the label) and
scalars ``h``, ``phi``, ``phiZ``.  Labels are unoriented; an automorphism
of the graph acts on a labeling by permuting edges.  Shrunk edges carry the
label ``*`` and ghost-cycle edges are tagged ``~`` in front of their label.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .corolla import (
    CorollaPolynomial,
    DifferentialOperator,
    HalfEdgeVariable,
    _apply,
    a_minus,
    a_plus,
    b_var,
    corolla,
    corolla_differential,
    ghost_polynomial,
    vertex_polynomial,
)
from .expr import Expression, Poly, Quadric, Rat
from .expr.poly import natural_key
from .graph import (
    Cycle,
    FeynmanGraph,
    GraphError,
    GraphParseError,
    HalfEdge,
    TwoFactor,
    automorphisms,
    disjoint_cycle_tuples,
    half_edge_orientation,
    symmetry_and_iso,
    symmetry_factor,
    two_factors,
)
from .graph import _relabel, _freeze
from .parametric import complete_routing, parametric_integrand

GAUGE_LABELS = ("W", "Z", "A")
SCALAR_LABELS = ("h", "phi", "phiZ")
SHRUNK = "*"


# ---------------------------------------------------------------- rule table
class TableIncompleteness(LookupError):
    def __init__(self, valence: int, labels: Sequence[str]):
        self.valence = valence
        self.labels = tuple(sorted(labels))
        super().__init__(f"no rule for {valence}-valent vertex {','.join(self.labels)}")


@dataclass
class CouplingRuleTable:
    rules: dict[tuple[int, tuple[str, ...]], Rat] = field(default_factory=dict)
    masses: dict[str, str | None] = field(default_factory=dict)

    def key(self, labels: Sequence[str]) -> tuple[int, tuple[str, ...]]:
        return (len(labels), tuple(sorted(labels)))

    def has_rule(self, labels: Sequence[str]) -> bool:
        return self.key(labels) in self.rules

    def coupling(self, labels: Sequence[str]) -> Rat:
        k = self.key(labels)
        if k not in self.rules:
            raise TableIncompleteness(len(labels), labels)
        return self.rules[k]

    def mass(self, label: str) -> str | None:
        return self.masses.get(label)

    def restricted(self, allowed: Iterable[str]) -> "CouplingRuleTable":
        """Only the rules whose labels all lie in ``allowed``."""
        allowed = set(allowed)
        rules = {k: v for k, v in self.rules.items() if set(k[1]) <= allowed}
        return CouplingRuleTable(rules, dict(self.masses))

    def zeroed(self) -> "CouplingRuleTable":
        return CouplingRuleTable({k: Rat.const(0) for k in self.rules}, dict(self.masses))


_FACTOR = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)(?:\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*\))?)\s*(?:\^\s*(-?\d+))?\s*")


def parse_coupling(text: str, line: int = 1, col0: int = 1) -> Rat:
    """Products and quotients of integers, ``i``, names and ``f(x)`` factors with integer powers."""
    pos = 0
    out = Rat.const(1)
    op = "*"
    body = text.rstrip()
    while True:
        while pos < len(body) and body[pos] == " ":
            pos += 1
        sign = 1
        while pos < len(body) and body[pos] == "-":
            sign = -sign
            pos += 1
        m = _FACTOR.match(body, pos)
        if not m or m.end() == pos or not (m.group(1) or m.group(2)):
            raise GraphParseError(line, col0 + pos, f"cannot read coupling factor at {body[pos:]!r}")
        if m.group(1):
            f = Rat.const(int(m.group(1)))
        else:
            name = f"{m.group(2)}_{m.group(3)}" if m.group(3) else m.group(2)
            f = Rat.var(name)
        k = int(m.group(4)) if m.group(4) else 1
        f = f**k if k >= 0 else Rat.const(1) / f ** (-k)
        f = f if sign > 0 else -f
        out = out * f if op == "*" else out / f
        pos = m.end()
        if pos >= len(body):
            return out
        if body[pos] not in "*/":
            raise GraphParseError(line, col0 + pos, f"expected '*' or '/' at {body[pos:]!r}")
        op = body[pos]
        pos += 1


def parse_rules(text: str) -> CouplingRuleTable:
    table = CouplingRuleTable()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        words = line.split()
        if words[0] == "mass":
            if len(words) != 3:
                raise GraphParseError(lineno, 1, "expected 'mass <label> <symbol>'")
            table.masses[words[1]] = None if words[2] == "0" else words[2]
        elif words[0] == "rule":
            m = re.match(r"\s*rule\s+(\d+)\s+([^=\s]+)\s*=\s*(.+)$", line)
            if not m:
                raise GraphParseError(lineno, 1, "expected 'rule <valence> <labels> = <coupling>'")
            valence = int(m.group(1))
            labels = [x.strip() for x in m.group(2).split(",") if x.strip()]
            if len(labels) != valence:
                raise GraphParseError(lineno, m.start(2) + 1, f"{len(labels)} labels for valence {valence}")
            coupling = parse_coupling(m.group(3), lineno, m.start(3) + 1)
            if any(v.startswith("A") and v[1:].isdigit() for v in coupling.variables()):
                raise GraphParseError(lineno, m.start(3) + 1, "coupling must not contain Schwinger parameters")
            table.rules[table.key(labels)] = coupling
        else:
            raise GraphParseError(lineno, 1, f"unknown directive {words[0]!r}")
    return table


def load_rules(path: str | None = None) -> CouplingRuleTable:
    if path is None:
        from .data import rules_text

        return parse_rules(rules_text())
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


default_rules = load_rules


# ---------------------------------------------------------------- helpers
def vertices_of(g: FeynmanGraph, edges: Iterable[str]) -> frozenset[str]:
    out: set[str] = set()
    for e in edges:
        out.update(g.endpoints(e))
    return frozenset(out)


def _subsets(items: Sequence[str]) -> list[frozenset[str]]:
    items = sorted(items, key=natural_key)
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def _edge_key(edges: Iterable[str]) -> list:
    return sorted(natural_key(e) for e in edges)


def _mass_rat(g: FeynmanGraph, edges_labels: Iterable[tuple[str, str | None]]) -> Rat:
    acc = Poly()
    for e, m in edges_labels:
        if m:
            acc = acc + Poly.var(g.schwinger(e)) * Poly.var(m, 2)
    return Rat.from_poly(acc)


def _phase(g: FeynmanGraph, phase_edges: str) -> Poly:
    n_edges = len(g.edge_ids) if phase_edges == "all" else len(g.internal_ids)
    return Poly.var("i", len(g.vertices) + n_edges)


# ---------------------------------------------------------------- gauge bosons
@dataclass(frozen=True)
class GaugeLabeling:
    w_factor: TwoFactor
    z_set: frozenset[str]
    a_set: frozenset[str]
    sym: int = 1
    iso: int = 1
    orientation: None = None  # W edges are unoriented

    def labels(self) -> dict[str, str]:
        out = {e: "W" for e in self.w_factor.edges}
        out.update({e: "Z" for e in self.z_set})
        out.update({e: "A" for e in self.a_set})
        return out


def gauge_boson_labelings(g: FeynmanGraph) -> list[GaugeLabeling]:
    """Every (2-factor, Z subset) pair with ``sym`` and ``iso`` attached."""
    raw = []
    for f in two_factors(g):
        rest = [e for e in g.edge_ids if e not in f.edges]
        for z in _subsets(rest):
            raw.append(GaugeLabeling(f, z, frozenset(rest) - z))
    _, stats = symmetry_and_iso(g, [l.labels() for l in raw])
    return [GaugeLabeling(l.w_factor, l.z_set, l.a_set, s, i) for l, (s, i) in zip(raw, stats)]


def gauge_coupling(g: FeynmanGraph, lab: GaugeLabeling) -> Poly:
    nz = len(vertices_of(g, lab.z_set))
    return Poly.var("g", nz) * Poly.var("cos_tW", nz) * Poly.var("e", len(g.vertices) - nz)


def gauge_mass_quadric(g: FeynmanGraph, lab: GaugeLabeling, mw: str = "mW", mz: str = "mZ") -> Quadric:
    pairs = [(e, mw) for e in lab.w_factor.edges] + [(e, mz) for e in lab.z_set]
    return Quadric({(): _mass_rat(g, pairs)})


def j_terms(
    g: FeynmanGraph,
    phase_edges: str = "all",
    form: str = "corollary",
) -> list[tuple[GaugeLabeling, Expression]]:
    """Electroweak summands of J, one per gauge labeling."""
    if form not in ("corollary", "theorem"):
        raise ValueError(f"unknown form {form!r}")
    phase = _phase(g, phase_edges)
    sym_g = symmetry_factor(g)
    out = []
    for lab in gauge_boson_labelings(g):
        c = Rat.from_poly(phase * gauge_coupling(g, lab))
        if form == "theorem":
            c = c * Rat.const(Fraction(sym_g, lab.sym * lab.iso))
        out.append((lab, Expression.exp(gauge_mass_quadric(g, lab), c)))
    return out


def j_factor(
    g: FeynmanGraph,
    color: Sequence[str] = ("color",),
    phase_edges: str = "all",
    form: str = "corollary",
) -> Expression:
    """QCD prefactor plus the electroweak gauge-boson sum."""
    from .corolla import qcd_prefactor

    if not g.is_connected():
        raise GraphError("graph is not connected")
    total = qcd_prefactor(g, color, phase_edges)
    for _, term in j_terms(g, phase_edges, form):
        total = total + term
    return total


# ---------------------------------------------------------------- scalar sets
def adjacent_half_edges(g: FeynmanGraph, e: str) -> list[HalfEdge]:
    """The half-edges sharing a vertex with ``e``, ``e``'s own excluded."""
    out = []
    for v in g.endpoints(e):
        for f in g.incident(v):
            if f != e:
                out.append(HalfEdge(v, f))
    return out


def shrink_candidates(
    g: FeynmanGraph,
    p_hg: frozenset[str],
    ghost_vertices: frozenset[str] = frozenset(),
    excluded: frozenset[str] = frozenset(),
) -> list[str]:
    """Internal scalar edges with 2 or 4 scalar half-edge neighbours, away from ghosts and excluded edges."""
    out = []
    for e in g.internal_ids:
        if e not in p_hg:
            continue
        n = sum(1 for h in adjacent_half_edges(g, e) if h.edge in p_hg)
        if n not in (2, 4):
            continue
        ends = g.endpoints(e)
        if any(v in ghost_vertices for v in ends):
            continue
        if any(f in excluded for v in ends for f in g.incident(v)):
            continue
        out.append(e)
    return out


def h2_set(g: FeynmanGraph, e: str, p_hg: frozenset[str]) -> tuple[HalfEdge, ...]:
    adj = adjacent_half_edges(g, e)
    outside = [h for h in adj if h.edge not in p_hg]
    return tuple(outside) if len(outside) == 2 else ()


@dataclass(frozen=True)
class ScalarSets:
    ghost_tuple: tuple[Cycle, ...]
    p_hg: frozenset[str]
    p4: frozenset[str]
    h2: tuple[tuple[str, tuple[HalfEdge, ...]], ...]

    def ghost_edges(self) -> frozenset[str]:
        return frozenset(e for c in self.ghost_tuple for e in c.edges)

    def ghost_vertices(self) -> frozenset[str]:
        return frozenset(v for c in self.ghost_tuple for v in c.vertex_set)

    def h2_of(self, e: str) -> tuple[HalfEdge, ...]:
        return dict(self.h2)[e]


def scalar_sets(
    g: FeynmanGraph,
    ghost_tuple: Sequence[Cycle] = (),
    excluded: Iterable[str] = (),
) -> list[ScalarSets]:
    """Every scalar edge set ``P`` off the ghost cycles with each admissible shrink set."""
    ghost_tuple = tuple(ghost_tuple)
    ghost_edges = frozenset(e for c in ghost_tuple for e in c.edges)
    ghost_verts = frozenset(v for c in ghost_tuple for v in c.vertex_set)
    excluded = frozenset(excluded)
    free = [e for e in g.edge_ids if e not in ghost_edges]
    out = []
    for p in _subsets(free):
        cands = shrink_candidates(g, p, ghost_verts, excluded)
        for p4 in _subsets(cands):
            ends = [v for e in p4 for v in g.endpoints(e)]
            if len(ends) != len(set(ends)):
                continue
            h2 = tuple((e, h2_set(g, e, p)) for e in sorted(p4, key=natural_key))
            out.append(ScalarSets(ghost_tuple, p, p4, h2))
    return out


# ---------------------------------------------------------------- labelings
@dataclass(frozen=True)
class ParticleLabeling:
    labels: tuple[tuple[str, str], ...]
    sym: int = 1
    iso: int = 1

    def label(self, e: str) -> str:
        return dict(self.labels)[e]

    def as_dict(self) -> dict[str, str]:
        return dict(self.labels)


def vertex_groups(g: FeynmanGraph, s: ScalarSets) -> list[tuple[str, tuple[str, ...]]]:
    """Effective vertices as ``(name, edges)``; a shrunk edge merges its endpoints."""
    merged = {v: e for e in s.p4 for v in g.endpoints(e)}
    out = []
    for v in g.vertices:
        if v not in merged:
            out.append((v, tuple(g.incident(v))))
    for e in sorted(s.p4, key=natural_key):
        out.append(("+".join(g.endpoints(e)), tuple(h.edge for h in adjacent_half_edges(g, e))))
    return out


def _role_key(lab: Mapping[str, str], s: ScalarSets) -> dict[str, str]:
    ghosts = s.ghost_edges()
    return {e: ("~" + l if e in ghosts else l) for e, l in lab.items()}


def enumerate_labelings(
    g: FeynmanGraph,
    s: ScalarSets,
    rules: CouplingRuleTable,
) -> list[ParticleLabeling]:
    """All labelings admissible at every effective vertex, with ``sym`` and ``iso``.

    ``iso`` counts the images of the labeling under graph automorphisms; the
    images are again admissible, so this is the count within the full family.
    """
    domains = {}
    for e in g.edge_ids:
        if e in s.p4:
            domains[e] = (SHRUNK,)
        elif e in s.p_hg:
            domains[e] = SCALAR_LABELS
        else:
            domains[e] = GAUGE_LABELS
    groups = vertex_groups(g, s)
    order = list(g.edge_ids)
    position = {e: k for k, e in enumerate(order)}
    # each group is checked once its last edge is assigned
    check_at: dict[int, list[tuple[str, ...]]] = {}
    for _, edges in groups:
        check_at.setdefault(max(position[e] for e in edges), []).append(edges)

    found: list[dict[str, str]] = []

    def rec(k: int, lab: dict[str, str]):
        if k == len(order):
            found.append(dict(lab))
            return
        e = order[k]
        for l in domains[e]:
            lab[e] = l
            if all(rules.has_rule([lab[f] for f in edges]) for edges in check_at.get(k, [])):
                rec(k + 1, lab)
        del lab[e]

    rec(0, {})
    auts = automorphisms(g)
    out = []
    for lab in found:
        key = _role_key(lab, s)
        frozen = _freeze(key)
        images = {_relabel(key, a) for a in auts}
        sym = sum(1 for a in auts if _relabel(key, a) == frozen)
        out.append(ParticleLabeling(_freeze(lab), sym, len(images)))
    return out


def labeling_is_admissible(g: FeynmanGraph, l: ParticleLabeling, s: ScalarSets, rules: CouplingRuleTable) -> bool:
    lab = l.as_dict()
    return all(rules.has_rule([lab[e] for e in edges]) for _, edges in vertex_groups(g, s))


def coupling_product(g: FeynmanGraph, l: ParticleLabeling, s: ScalarSets, rules: CouplingRuleTable) -> Rat:
    """Product of the vertex couplings, shrunk 4-valent vertices included."""
    lab = l.as_dict()
    out = Rat.const(1)
    for _, edges in vertex_groups(g, s):
        out = out * rules.coupling([lab[e] for e in edges])
    return out


def labeling_exponent(g: FeynmanGraph, l: ParticleLabeling, s: ScalarSets, rules: CouplingRuleTable) -> Quadric:
    """``exp(sum_shrunk A xi^2 - sum_other A m^2)`` as a quadric for ``exp(-E)``."""
    lab = l.as_dict()
    pairs = [(e, rules.mass(lab[e])) for e in g.edge_ids if e not in s.p4]
    entries: dict = {(): _mass_rat(g, pairs)}
    for e in s.p4:
        xi = g.momentum(e)
        entries[(xi, xi)] = -Rat.var(g.schwinger(e))
    return Quadric(entries)


# ---------------------------------------------------------------- EW Corolla polynomial
def _structure_factors(g: FeynmanGraph, s: ScalarSets) -> list[list[tuple[HalfEdgeVariable, ...]]] | None:
    """Half-edge variable factors of one summand, or ``None`` when it vanishes."""
    factors: list[list[tuple[HalfEdgeVariable, ...]]] = []
    for c in s.ghost_tuple:
        factors.append(ghost_polynomial(g, c))
    ghost_v = s.ghost_vertices()
    scalar_v = {v for e in s.p_hg for v in g.endpoints(e)}
    shrunk_v = {v for e in s.p4 for v in g.endpoints(e)}
    live = s.p_hg - s.p4
    for v in g.vertices:
        if v in ghost_v or v in shrunk_v:
            continue
        if v not in scalar_v:
            factors.append(vertex_polynomial(g, v))
            continue
        inside = [HalfEdge(v, e) for e in g.incident(v) if e in live]
        if len(inside) == 1:
            factors.append([(b_var(inside[0]),)])
        elif len(inside) == 2:
            (h,) = [HalfEdge(v, e) for e in g.incident(v) if e not in live]
            factors.append([(a_plus(h),), (a_minus(h),)])
    for e in sorted(s.p4, key=natural_key):
        h2 = s.h2_of(e)
        if not h2:
            return None
        factors.append([tuple(b_var(h) for h in h2)])
    return factors


def corolla_ew(
    g: FeynmanGraph,
    rules: CouplingRuleTable | None = None,
    phase_edges: str = "all",
    excluded: Iterable[str] = (),
) -> CorollaPolynomial:
    """Alternating sum of the electroweak summands over ghost tuples, scalar sets and labelings.

    Every summand carries ``i^{|V| + |E|}``, the symmetry ratio, the vertex
    couplings and the mass/shrink exponential.
    """
    if not g.is_connected():
        raise GraphError("graph is not connected")
    rules = rules or load_rules()
    phase = Rat.from_poly(_phase(g, phase_edges))
    sym_g = symmetry_factor(g)
    terms = []
    i = 0
    while True:
        tuples = disjoint_cycle_tuples(g, i)
        if not tuples:
            break
        sign = -1 if i % 2 else 1
        for ghosts in tuples:
            for s in scalar_sets(g, ghosts, excluded):
                factors = _structure_factors(g, s)
                if factors is None:
                    continue
                labs = enumerate_labelings(g, s, rules)
                if not labs:
                    continue
                coef = Expression.zero()
                for l in labs:
                    w = Rat.const(Fraction(sign * sym_g, l.sym * l.iso)) * phase * coupling_product(g, l, s, rules)
                    coef = coef + Expression.exp(labeling_exponent(g, l, s, rules), w)
                if coef.is_zero():
                    continue
                for choice in itertools.product(*factors):
                    terms.append((i, tuple(x for part in choice for x in part), coef))
        i += 1
    return CorollaPolynomial(terms)


def apply_ew(
    g: FeynmanGraph,
    rules: CouplingRuleTable | None = None,
    routing: Mapping | None = None,
    color: Sequence[str] = ("color",),
    phase_edges: str = "all",
) -> Expression:
    """``(D_QCD + D_EW) I``: derivatives act on the integrand, coefficients multiply afterwards."""
    if not g.is_connected():
        raise GraphError("graph is not connected")
    d = ew_differential(g, rules, color, phase_edges)
    integ = parametric_integrand(g)
    route, names = complete_routing(g, routing)
    return _apply(d, integ.expression()).substitute_momenta(route, names)


def ew_differential(
    g: FeynmanGraph,
    rules: CouplingRuleTable | None = None,
    color: Sequence[str] = ("color",),
    phase_edges: str = "all",
) -> DifferentialOperator:
    qcd = corolla_differential(g, corolla(g, "qcd", color, phase_edges))
    ew = corolla_differential(g, corolla_ew(g, rules, phase_edges))
    return qcd + ew
