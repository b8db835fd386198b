"""Corolla polynomial, Corolla differential and their action on the integrand.

Half-edge variables are ``a+`` / ``a-`` / ``b`` attached to a half-edge
``h``.  Substitution turns ``a_{h,k}`` into

    -k * eps(v, e(h_k)) / (2 A_{e(h_k)}) * d/d xi_{e(h_k)}^{mu_{e(h)}}

where ``h_k`` is the successor (``k = +``) or predecessor (``k = -``) of
``h`` and ``eps`` the incidence entry at ``h``'s vertex; ``b_h`` becomes
the metric ``eta^{mu_{e(h+)} mu_{e(h-)}}``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .expr import Expression, Poly, Rat
from .expr.laurent import laurent_res_reg
from .expr.poly import natural_key
from .expr.render import render, to_json
from .expr.tensor import metric, sort_atoms, token
from .graph import (
    Cycle,
    FeynmanGraph,
    GraphError,
    HalfEdge,
    all_cycles,
    cycle_basis,
    disjoint_cycle_tuples,
    epsilon,
    half_edge_orientation,
)
from .parametric import ParametricIntegrand, Routing, complete_routing, parametric_integrand


@dataclass(frozen=True)
class HalfEdgeVariable:
    kind: str  # "a+", "a-" or "b"
    half_edge: HalfEdge

    def sort_key(self) -> tuple:
        return (natural_key(self.half_edge.vertex), natural_key(self.half_edge.edge), self.kind)

    def text(self, latex: bool = False) -> str:
        h = self.half_edge
        if self.kind == "b":
            return f"b_{{({h.vertex},{h.edge})}}"
        return f"a_{{({h.vertex},{h.edge}){self.kind[1]}}}"


def a_plus(h: HalfEdge) -> HalfEdgeVariable:
    return HalfEdgeVariable("a+", h)


def a_minus(h: HalfEdge) -> HalfEdgeVariable:
    return HalfEdgeVariable("a-", h)


def b_var(h: HalfEdge) -> HalfEdgeVariable:
    return HalfEdgeVariable("b", h)


Monomial = tuple[HalfEdgeVariable, ...]


def _mono(vars_: Iterable[HalfEdgeVariable]) -> Monomial:
    return tuple(sorted(vars_, key=HalfEdgeVariable.sort_key))


class CorollaPolynomial:
    """Polynomial in half-edge variables with expression coefficients.

    Terms are keyed by ``(ghost degree, monomial)``.
    """

    def __init__(self, terms: Iterable[tuple[int, Monomial, Expression]] = ()):
        acc: dict[tuple[int, Monomial], Expression] = {}
        for deg, mono, coef in terms:
            key = (deg, _mono(mono))
            acc[key] = acc[key] + coef if key in acc else coef
        self._terms = {k: v for k, v in acc.items() if not v.is_zero()}

    def terms(self) -> list[tuple[int, Monomial, Expression]]:
        keys = sorted(self._terms, key=lambda k: (k[0], [v.sort_key() for v in k[1]]))
        return [(k[0], k[1], self._terms[k]) for k in keys]

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "CorollaPolynomial") -> "CorollaPolynomial":
        return CorollaPolynomial(self.terms() + other.terms())

    def __neg__(self) -> "CorollaPolynomial":
        return self.scale(Expression.scalar(-1))

    def __sub__(self, other: "CorollaPolynomial") -> "CorollaPolynomial":
        return self + (-other)

    def scale(self, factor: Expression) -> "CorollaPolynomial":
        return CorollaPolynomial((d, m, c * factor) for d, m, c in self.terms())

    def ghost_part(self, i: int) -> "CorollaPolynomial":
        return CorollaPolynomial((d, m, c) for d, m, c in self.terms() if d == i)

    def monomials(self) -> dict[Monomial, Expression]:
        out: dict[Monomial, Expression] = {}
        for _, m, c in self.terms():
            out[m] = out[m] + c if m in out else c
        return {m: c for m, c in out.items() if not c.is_zero()}

    def __eq__(self, other) -> bool:
        return isinstance(other, CorollaPolynomial) and self._terms == other._terms

    def render(self, fmt: str = "text") -> str:
        if fmt == "json":
            return json.dumps({"terms": [
                {"ghost": d, "monomial": [[v.kind, v.half_edge.vertex, v.half_edge.edge] for v in m], "coef": to_json(c)}
                for d, m, c in self.terms()
            ]})
        if not self._terms:
            return "0"
        latex = fmt == "latex"
        pieces = []
        for _, m, c in self.terms():
            mono = " ".join(v.text(latex) for v in m) or "1"
            ctext = render(c, fmt)
            if ctext == "1":
                pieces.append(mono)
            elif ctext == "-1":
                pieces.append("-" + mono)
            else:
                pieces.append(f"({ctext}) {mono}")
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


# ---------------------------------------------------------------- construction
def vertex_polynomial(g: FeynmanGraph, v: str) -> list[Monomial]:
    """Monomials of ``sum_h b_h (a_{h+} + a_{h-})`` at ``v``."""
    out = []
    for e in g.incident(v):
        h = HalfEdge(v, e)
        out.append((b_var(h), a_plus(h)))
        out.append((b_var(h), a_minus(h)))
    return out


def ghost_half_edge(g: FeynmanGraph, c: Cycle, v: str) -> HalfEdge:
    """The half-edge at ``v`` whose edge leaves the cycle."""
    (e,) = [e for e in g.incident(v) if e not in c.edges]
    return HalfEdge(v, e)


def ghost_polynomial(g: FeynmanGraph, c: Cycle) -> list[Monomial]:
    verts = sorted(c.vertex_set, key=natural_key)
    return [tuple(a_plus(ghost_half_edge(g, c, v)) for v in verts), tuple(a_minus(ghost_half_edge(g, c, v)) for v in verts)]


def corolla_summand(g: FeynmanGraph, i: int) -> CorollaPolynomial:
    """The summand with ``i`` vertex-disjoint ghost cycles."""
    terms = []
    for cycles in disjoint_cycle_tuples(g, i):
        covered = set()
        factors: list[list[Monomial]] = []
        for c in cycles:
            covered |= c.vertex_set
            factors.append(ghost_polynomial(g, c))
        for v in g.vertices:
            if v not in covered:
                factors.append(vertex_polynomial(g, v))
        for choice in itertools.product(*factors):
            terms.append((i, tuple(x for part in choice for x in part), Expression.one()))
    return CorollaPolynomial(terms)


def qcd_prefactor(g: FeynmanGraph, color: Sequence[str] = ("color",), phase_edges: str = "all") -> Expression:
    """``i^{|edges|} g_s^{|vertices|}`` times the colour tokens.

    ``phase_edges="internal"`` counts internal edges only in the phase.
    """
    n_edges = len(g.edge_ids) if phase_edges == "all" else len(g.internal_ids)
    out = Expression.scalar(Poly.var("i", n_edges) * Poly.var("g_s", len(g.vertices)))
    for label in color:
        out = out * Expression.token(label)
    return out


def corolla(
    g: FeynmanGraph,
    variant: str = "plain",
    color: Sequence[str] = ("color",),
    phase_edges: str = "all",
) -> CorollaPolynomial:
    """Alternating sum ``C^0 - C^1 + C^2 - ...``; ``variant="qcd"`` adds the QCD prefactor."""
    total = CorollaPolynomial()
    i = 0
    while True:
        part = corolla_summand(g, i)
        if part.is_zero() and i > 0:
            break
        total = total + (part if i % 2 == 0 else -part)
        i += 1
    if variant == "qcd":
        total = total.scale(qcd_prefactor(g, color, phase_edges))
    elif variant != "plain":
        raise ValueError(f"unknown variant {variant!r}")
    return total


# ---------------------------------------------------------------- differential
Derivative = tuple[str, str]  # (momentum slot, Lorentz index)


@dataclass(frozen=True)
class HalfEdgeOperator:
    prefactor: Rat
    slot: str
    index: str


def half_edge_operator(g: FeynmanGraph, h: HalfEdge, k: str) -> HalfEdgeOperator:
    """The operator replacing ``a_{h,k}`` for ``k`` in ``'+'`` / ``'-'``."""
    succ, pred = half_edge_orientation(g, h)
    hk = succ if k == "+" else pred
    sign = 1 if k == "+" else -1
    eps = epsilon(g, h.vertex, hk.edge)
    pref = Rat.const(Fraction(-sign * eps, 2)) * Rat.var(g.schwinger(hk.edge), -1)
    return HalfEdgeOperator(pref, g.momentum(hk.edge), g.lorentz(h.edge))


def half_edge_metric(g: FeynmanGraph, h: HalfEdge) -> tuple:
    succ, pred = half_edge_orientation(g, h)
    return metric(g.lorentz(succ.edge), g.lorentz(pred.edge))


class DifferentialOperator:
    """Sum of ``coefficient * metrics * product of derivatives`` summands."""

    def __init__(self, summands: Iterable[tuple[Expression, Sequence[Derivative], Sequence[tuple]]] = ()):
        acc: dict[tuple, Expression] = {}
        for coef, derivs, metrics in summands:
            key = (tuple(sorted(derivs, key=lambda d: (natural_key(d[0]), natural_key(d[1])))), sort_atoms(metrics))
            acc[key] = acc[key] + coef if key in acc else coef
        self._summands = {k: v for k, v in acc.items() if not v.is_zero()}

    def summands(self) -> list[tuple[Expression, tuple[Derivative, ...], tuple]]:
        keys = sorted(self._summands, key=lambda k: (len(k[0]), [(natural_key(a), natural_key(b)) for a, b in k[0]], str(k[1])))
        return [(self._summands[k], k[0], k[1]) for k in keys]

    def is_zero(self) -> bool:
        return not self._summands

    def __len__(self) -> int:
        return len(self._summands)

    def __add__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        return DifferentialOperator(
            [(c, d, m) for c, d, m in self.summands()] + [(c, d, m) for c, d, m in other.summands()]
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, DifferentialOperator) and self._summands == other._summands

    @classmethod
    def identity(cls) -> "DifferentialOperator":
        return cls([(Expression.one(), (), ())])

    def render(self, fmt: str = "text") -> str:
        if not self._summands:
            return "0"
        pieces = []
        for coef, derivs, metrics in self.summands():
            parts = [f"({render(coef, fmt)})"]
            parts += [f"eta^{{{m[1]} {m[2]}}}" for m in metrics]
            parts += [f"d/d{s}^{{{i}}}" for s, i in derivs]
            pieces.append(" ".join(parts))
        return " + ".join(pieces)


def corolla_differential(g: FeynmanGraph, c: CorollaPolynomial) -> DifferentialOperator:
    summands = []
    for _, mono, coef in c.terms():
        pref = Rat.const(1)
        derivs = []
        metrics = []
        for v in mono:
            if v.kind == "b":
                metrics.append(half_edge_metric(g, v.half_edge))
            else:
                op = half_edge_operator(g, v.half_edge, v.kind[1])
                pref = pref * op.prefactor
                derivs.append((op.slot, op.index))
        summands.append((coef.scale(pref), derivs, metrics))
    return DifferentialOperator(summands)


# ---------------------------------------------------------------- application
class _DerivativeCache:
    def __init__(self, base: Expression):
        self._cache: dict[tuple, Expression] = {(): base}

    def get(self, derivs: tuple[Derivative, ...]) -> Expression:
        if derivs in self._cache:
            return self._cache[derivs]
        prev = self.get(derivs[:-1])
        slot, index = derivs[-1]
        out = prev.differentiate(slot, index)
        self._cache[derivs] = out
        return out


def _apply(d: DifferentialOperator, target: Expression) -> Expression:
    cache = _DerivativeCache(target)
    total = Expression.zero()
    groups: dict[tuple, Expression] = {}
    for coef, derivs, metrics in d.summands():
        pre = coef * Expression([(Rat.const(1), metrics, None)])
        groups[derivs] = groups[derivs] + pre if derivs in groups else pre
    for derivs, pre in groups.items():
        total = total + (pre * cache.get(derivs)).contract()
    return total


def _routing(g: FeynmanGraph, routing: Mapping | None) -> tuple[Routing, list[str]]:
    return complete_routing(g, routing)


def apply_differential(
    g: FeynmanGraph,
    d: DifferentialOperator,
    routing: Mapping[str, Mapping[str, int]] | None = None,
    integrand: ParametricIntegrand | None = None,
) -> tuple[Expression, Expression]:
    """Act with ``d`` on the integrand; returns ``(full, gauge_factor)``.

    ``full`` is ``d`` applied to the whole integrand, momenta substituted.
    ``gauge_factor`` is ``d`` applied to ``exp(...)/psi^2`` divided by that
    same factor, so it carries no exponential.  Derivatives that hit the
    external prefactor appear in ``full`` only; see
    :func:`prefactor_contribution`.
    """
    integ = integrand or parametric_integrand(g)
    route, names = _routing(g, routing)
    full = _apply(d, integ.expression()).substitute_momenta(route, names)
    gauge = gauge_factor(g, d, route, integ, names)
    return full, gauge


def gauge_factor(g, d, routing, integ, names=()) -> Expression:
    amputated = _apply(d, integ.body)
    psi2 = integ.psi**2
    out = []
    for coef, atoms, quad in amputated.terms():
        if quad != integ.quadric:
            raise ValueError("unexpected exponential in the differentiated integrand")
        out.append((coef * Rat.from_poly(psi2), atoms, None))
    return Expression(out).substitute_momenta(routing, names)


def prefactor_contribution(
    g: FeynmanGraph,
    d: DifferentialOperator,
    routing: Mapping[str, Mapping[str, int]] | None = None,
) -> Expression:
    """Part of ``d I`` in which at least one derivative acts on the external prefactor."""
    integ = parametric_integrand(g)
    route, names = _routing(g, routing)
    full = _apply(d, integ.expression())
    amputated = integ.prefactor * _apply(d, integ.body)
    return (full - amputated).substitute_momenta(route, names)


def schwinger_res_reg(g: FeynmanGraph, expr: Expression, shrink_set: Iterable[str]) -> Expression:
    """Residue at ``A_e = 0`` for shrunk edges, then the regular part in the other internal ``A_e``."""
    shrink = list(shrink_set)
    for e in shrink:
        if e not in g.internal_ids:
            raise GraphError(f"edge {e} is not internal")
    res_syms = [g.schwinger(e) for e in shrink]
    reg_syms = [g.schwinger(e) for e in g.internal_ids if e not in shrink]
    _, regular = laurent_res_reg(expr, res_syms, reg_syms)
    return regular


def qcd_gauge_factor(
    g: FeynmanGraph,
    routing: Mapping | None = None,
    color: Sequence[str] = ("color",),
    phase_edges: str = "all",
) -> Expression:
    """Gauge factor of the QCD Corolla differential acting on the integrand."""
    d = corolla_differential(g, corolla(g, "qcd", color, phase_edges))
    integ = parametric_integrand(g)
    route, names = _routing(g, routing)
    return gauge_factor(g, d, route, integ, names)
