import itertools

import pytest

from gaugeparam.corolla import apply_differential, corolla, corolla_differential
from gaugeparam.corolla import _apply
from gaugeparam.electroweak import (
    GAUGE_LABELS,
    SCALAR_LABELS,
    SHRUNK,
    ParticleLabeling,
    TableIncompleteness,
    adjacent_half_edges,
    apply_ew,
    corolla_ew,
    coupling_product,
    enumerate_labelings,
    gauge_boson_labelings,
    j_factor,
    j_terms,
    labeling_exponent,
    labeling_is_admissible,
    load_rules,
    parse_coupling,
    parse_rules,
    scalar_sets,
)
from gaugeparam.expr import Expression, Poly, Rat
from gaugeparam.graph import GraphError, GraphParseError, disjoint_cycle_tuples, parse_graph, symmetry_factor
from gaugeparam.parametric import complete_routing, parametric_integrand

from conftest import NAMED_GRAPHS

V = Rat.var


# ---------------------------------------------------------------- rule table
def test_parse_coupling_forms():
    assert parse_coupling("g*cos(tW)") == V("g") * V("cos_tW")
    assert parse_coupling("g*mZ*sin(tW)^2") == V("g") * V("mZ") * V("sin_tW") ** 2
    assert parse_coupling("g*mZ/cos(tW)") == V("g") * V("mZ") / V("cos_tW")
    assert parse_coupling("-2*e") == V("e") * Rat.const(-2)
    assert parse_coupling("e^-1") == Rat.const(1) / V("e")


def test_parse_coupling_error_column():
    with pytest.raises(GraphParseError) as info:
        parse_coupling("g * + e", line=4, col0=10)
    assert info.value.line == 4
    assert info.value.column == 14


def test_parse_rules_table():
    table = parse_rules("mass W mW\nmass A 0\nrule 3 W,W,A = e\n# comment\n")
    assert table.mass("W") == "mW"
    assert table.mass("A") is None
    assert table.coupling(["A", "W", "W"]) == V("e")
    with pytest.raises(TableIncompleteness) as info:
        table.coupling(["Z", "Z", "Z"])
    assert info.value.valence == 3


@pytest.mark.parametrize(
    "text, line",
    [
        ("rule 3 W,W = e\n", 1),
        ("mass W\n", 1),
        ("\nfoo bar\n", 2),
        ("rule 3 W,W,A = e*A1\n", 1),
    ],
)
def test_parse_rules_errors(text, line):
    with pytest.raises(GraphParseError) as info:
        parse_rules(text)
    assert info.value.line == line


def test_default_table_contents():
    rules = load_rules()
    assert rules.coupling(["W", "W", "Z"]) == V("g") * V("cos_tW")
    assert rules.coupling(["phi", "W", "A"]) == V("e") * V("mW")
    assert rules.mass("phiZ") == "mZ"
    assert not rules.has_rule(["h", "h", "h", "h"])


# ---------------------------------------------------------------- gauge labelings
def test_one_loop_gauge_labelings(one_loop):
    labs = gauge_boson_labelings(one_loop)
    assert len(labs) == 8
    by_factor: dict = {}
    for l in labs:
        by_factor.setdefault(l.w_factor.edges, []).append(l)
    assert len(by_factor) == 3
    assert sorted(len(v) for v in by_factor.values()) == [2, 2, 4]
    for f, ls in by_factor.items():
        cyc = f == frozenset({"1", "2"})
        for l in ls:
            assert (l.sym, l.iso) == ((2, 1) if cyc else (1, 2))


@pytest.mark.parametrize("name", [n for n, g in NAMED_GRAPHS.items() if g.internal_edges])
def test_symmetry_ratio_is_one(name):
    g = NAMED_GRAPHS[name]
    sym_g = symmetry_factor(g)
    for l in gauge_boson_labelings(g):
        assert l.sym * l.iso == sym_g


def test_theorem_form_equals_corollary(named_graph):
    if not named_graph.internal_edges:
        pytest.skip("vacuum-free graphs only")
    a = [t for _, t in j_terms(named_graph, form="theorem")]
    b = [t for _, t in j_terms(named_graph, form="corollary")]
    assert a == b


def test_j_factor_term_count(one_loop):
    j = j_factor(one_loop, ("f1", "f2"), "internal")
    assert len(j) == 9


def test_j_rejects_disconnected():
    g = parse_graph("v a\nv b\nx 1 a\nx 2 a\nx 3 a\nx 4 b\nx 5 b\nx 6 b\n")
    with pytest.raises(GraphError):
        j_factor(g)
    with pytest.raises(GraphError):
        corolla_ew(g)


# ---------------------------------------------------------------- scalar sets
def _independent_candidates(g, p, ghost_vertices):
    """Shrink candidates recomputed from vertex valences."""
    out = set()
    for e, a, b in g.internal_edges:
        if e not in p or a in ghost_vertices or b in ghost_vertices:
            continue
        scalar_neighbours = 0
        for v in (a, b):
            scalar_neighbours += sum(1 for f in g.incident(v) if f != e and f in p)
        if scalar_neighbours in (2, 4):
            out.add(e)
    return out


def _independent_p4_sets(g, p, ghost_vertices):
    cands = sorted(_independent_candidates(g, p, ghost_vertices))
    out = set()
    for r in range(len(cands) + 1):
        for sub in itertools.combinations(cands, r):
            verts = [v for e in sub for v in g.endpoints(e)]
            if len(verts) == len(set(verts)):
                out.add(frozenset(sub))
    return out


@pytest.mark.parametrize("name", ["one_loop", "triangle", "dumbbell", "sunset"])
def test_p4_sets_match_independent_predicate(name):
    g = NAMED_GRAPHS[name]
    for i in range(2):
        for ghosts in disjoint_cycle_tuples(g, i):
            gv = frozenset(v for c in ghosts for v in c.vertex_set)
            by_p: dict = {}
            for s in scalar_sets(g, ghosts):
                by_p.setdefault(s.p_hg, set()).add(s.p4)
            ghost_edges = {e for c in ghosts for e in c.edges}
            free = [e for e in g.edge_ids if e not in ghost_edges]
            assert len(by_p) == 2 ** len(free)
            for p, p4s in by_p.items():
                assert p4s == _independent_p4_sets(g, p, gv)


def test_one_loop_scalar_set_counts(one_loop):
    plain = scalar_sets(one_loop)
    assert len({s.p_hg for s in plain}) == 16
    (ghost,) = disjoint_cycle_tuples(one_loop, 1)
    assert len({s.p_hg for s in scalar_sets(one_loop, ghost)}) == 4
    assert all(not s.p4 for s in scalar_sets(one_loop, ghost))


def test_one_loop_h2(one_loop):
    nonempty = set()
    for s in scalar_sets(one_loop):
        for e, hs in s.h2:
            if hs:
                nonempty.add((tuple(sorted(s.p_hg)), e, tuple(sorted((h.vertex, h.edge) for h in hs))))
    assert nonempty == {
        (("1", "2"), "1", (("a", "3"), ("b", "4"))),
        (("1", "2"), "2", (("a", "3"), ("b", "4"))),
        (("1", "3", "4"), "1", (("a", "2"), ("b", "2"))),
        (("2", "3", "4"), "2", (("a", "1"), ("b", "1"))),
    }


def test_excluded_edges_block_shrinking(one_loop):
    for s in scalar_sets(one_loop, excluded=["3"]):
        assert not s.p4


def test_adjacent_half_edges(one_loop):
    hs = adjacent_half_edges(one_loop, "1")
    assert sorted((h.vertex, h.edge) for h in hs) == [("a", "2"), ("a", "3"), ("b", "2"), ("b", "4")]


# ---------------------------------------------------------------- labelings
def _brute_labelings(g, s, rules):
    edges = list(g.edge_ids)
    domains = [
        (SHRUNK,) if e in s.p4 else SCALAR_LABELS if e in s.p_hg else GAUGE_LABELS for e in edges
    ]
    out = set()
    for combo in itertools.product(*domains):
        l = ParticleLabeling(tuple(zip(edges, combo)))
        if labeling_is_admissible(g, l, s, rules):
            out.add(l.labels)
    return out


@pytest.mark.parametrize("name", ["one_loop", "triangle"])
def test_labelings_match_brute_force(name):
    g = NAMED_GRAPHS[name]
    rules = load_rules()
    for s in scalar_sets(g)[:40]:
        found = enumerate_labelings(g, s, rules)
        assert {l.labels for l in found} == _brute_labelings(g, s, rules)
        assert len(found) == len({l.labels for l in found})


def test_labeling_orbit_stabiliser(one_loop):
    rules = load_rules()
    sym_g = symmetry_factor(one_loop)
    for s in scalar_sets(one_loop):
        for l in enumerate_labelings(one_loop, s, rules):
            assert l.sym * l.iso == sym_g


def test_one_loop_scalar_edge_labelings(one_loop):
    rules = load_rules()
    (s,) = [s for s in scalar_sets(one_loop) if s.p_hg == {"1"} and not s.p4]
    labs = enumerate_labelings(one_loop, s, rules)
    got = sorted(str(coupling_product(one_loop, l, s, rules)) for l in labs)
    e, g, mw, mz, c, sn = (V(x) for x in ("e", "g", "mW", "mZ", "cos_tW", "sin_tW"))
    expected = [
        e**2 * mw**2,
        e**2 * mw**2,
        g**2 * mz**2 * sn**4,
        g**2 * mz**2 * sn**4,
        g**2 * mw**2,
        g**2 * mz**2 / c**2,
        e * g * mw * mz * sn**2,
        e * g * mw * mz * sn**2,
    ]
    assert got == sorted(str(x) for x in expected)


def test_labeling_exponent_masses(one_loop):
    rules = load_rules()
    (s,) = [s for s in scalar_sets(one_loop) if s.p_hg == {"1"} and not s.p4]
    lab = ParticleLabeling((("1", "h"), ("2", "W"), ("3", "W"), ("4", "W")))
    q = labeling_exponent(one_loop, lab, s, rules)
    mh2, mw2 = Poly.var("mh", 2), Poly.var("mW", 2)
    expected = Poly.var("A1") * mh2 + (Poly.var("A2") + Poly.var("A3") + Poly.var("A4")) * mw2
    assert q.as_dict()[()] == Rat.from_poly(expected)


def test_shrink_exponent_drops_mass_and_adds_square():
    g = NAMED_GRAPHS["one_loop"]
    rules = load_rules()
    (s,) = [s for s in scalar_sets(g) if s.p_hg == {"1", "2"} and s.p4 == {"1"}]
    lab = ParticleLabeling((("1", SHRUNK), ("2", "h"), ("3", "W"), ("4", "W")))
    q = labeling_exponent(g, lab, s, rules).as_dict()
    assert q[("xi1", "xi1")] == -V("A1")
    assert "A1" not in q[()].variables()


def test_four_valent_lookup_needs_a_rule(one_loop):
    rules = load_rules()
    for s in scalar_sets(one_loop):
        if s.p4:
            assert enumerate_labelings(one_loop, s, rules) == []
    extended = parse_rules("rule 4 h,h,W,W = g^2\nmass h mh\nmass W mW\n")
    (s,) = [s for s in scalar_sets(one_loop) if s.p_hg == {"1", "2"} and s.p4 == {"1"}]
    labs = enumerate_labelings(one_loop, s, extended)
    assert [l.as_dict() for l in labs] == [{"1": SHRUNK, "2": "h", "3": "W", "4": "W"}]
    assert coupling_product(one_loop, labs[0], s, extended) == V("g") ** 2


# ---------------------------------------------------------------- EW Corolla and its action
def _j_ew(g, phase_edges="all"):
    total = Expression.zero()
    for _, t in j_terms(g, phase_edges):
        total = total + t
    return total


def test_gauge_only_corolla_equals_j_times_c(one_loop):
    rules = load_rules().restricted(GAUGE_LABELS)
    assert corolla_ew(one_loop, rules) == corolla(one_loop).scale(_j_ew(one_loop))


def test_apply_ew_with_zeroed_rules_is_qcd(one_loop):
    zero = apply_ew(one_loop, load_rules().zeroed())
    qcd = corolla_differential(one_loop, corolla(one_loop, "qcd"))
    assert zero == apply_differential(one_loop, qcd)[0]


def test_apply_ew_gauge_part_is_d_of_i_times_j(one_loop):
    rules = load_rules().restricted(GAUGE_LABELS)
    out = apply_ew(one_loop, rules)
    integ = parametric_integrand(one_loop)
    route, names = complete_routing(one_loop)
    qcd = corolla_differential(one_loop, corolla(one_loop, "qcd"))
    d = corolla_differential(one_loop, corolla(one_loop))
    qcd_part = _apply(qcd, integ.expression()).substitute_momenta(route, names)
    ew_part = _apply(d, integ.expression() * _j_ew(one_loop)).substitute_momenta(route, names)
    assert out == qcd_part + ew_part


def test_scalar_summands_carry_coupling_and_sign(one_loop):
    rules = load_rules()
    full = corolla_ew(one_loop, rules)
    gauge = corolla_ew(one_loop, rules.restricted(GAUGE_LABELS))
    scalar = full - gauge
    assert not scalar.is_zero()
    # ghost summands never carry scalar labels on the ghost cycle
    for deg, mono, _ in scalar.terms():
        if deg == 1:
            assert {v.half_edge.edge for v in mono} <= {"3", "4"}


def test_phase_weight():
    g = NAMED_GRAPHS["one_loop"]
    every = [t for _, t in j_terms(g, "all")]
    inner = [t for _, t in j_terms(g, "internal")]
    # i^(2+4) against i^(2+2)
    assert [-t for t in inner] == every
