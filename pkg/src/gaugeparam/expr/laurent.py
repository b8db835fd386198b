"""Laurent expansion in a single Schwinger parameter around zero.

A term ``c(t) * atoms * exp(-E(t))`` with a pole of order ``p`` in ``t`` is
expanded as ``t**-p * sum_m T_m t**m * exp(-E(0))``.  The exponential is
expanded to the finite order the pole requires.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .expression import Expression
from .poly import Poly, natural_key
from .quadric import Quadric
from .rational import Rat
from .tensor import dot

MAX_POLE_ORDER = 4


class UnsupportedExpansion(ValueError):
    """Essential singularity or a pole beyond the supported order."""


def _rat_series(r: Rat, t: str, order: int) -> list[Rat]:
    """Taylor coefficients ``r_0 .. r_order`` of a rational function regular at ``t = 0``."""
    if r.pole_order(t):
        raise UnsupportedExpansion(f"{t} = 0 is a pole")
    num = r.num.coefficients_in(t)
    den = r.den_poly().coefficients_in(t)
    d0 = den.get(0, Poly())
    if d0.is_zero():
        raise UnsupportedExpansion(f"denominator vanishes at {t} = 0")
    inv: list[Rat] = [Rat.quotient(Poly.const(1), d0)]
    for k in range(1, order + 1):
        acc = Rat.const(0)
        for j in range(1, k + 1):
            dj = den.get(j)
            if dj is not None:
                acc = acc + Rat.from_poly(dj) * inv[k - j]
        inv.append((-acc).div_poly(d0))
    out = []
    for k in range(order + 1):
        acc = Rat.const(0)
        for j in range(k + 1):
            nj = num.get(j)
            if nj is not None:
                acc = acc + Rat.from_poly(nj) * inv[k - j]
        out.append(acc)
    return out


def _split_term(coef: Rat, t: str) -> tuple[int, Rat]:
    tv = Poly.var(t)
    p = coef.pole_order(t)
    rest = tuple((f, k) for f, k in coef.den if f != tv)
    return p, Rat(coef.num, rest, _reduced=True)


def _expand_term(coef: Rat, atoms, quad: Quadric | None, t: str, need: int):
    """Return ``(p, [T_0 .. T_need], quad0)`` for one term."""
    p, reg = _split_term(coef, t)
    cser = _rat_series(reg, t, need)
    if quad is None:
        eser = [Expression.one()] + [Expression.zero()] * need
        quad0 = None
    else:
        shifts: dict[int, list] = {}
        base = {}
        for pair, r in quad.entries:
            if r.pole_order(t):
                raise UnsupportedExpansion(f"exponential argument has a pole at {t} = 0")
            ser = _rat_series(r, t, need)
            base[pair] = ser[0]
            for k in range(1, need + 1):
                if not ser[k].is_zero():
                    shifts.setdefault(k, []).append((ser[k], pair))
        quad0 = Quadric(base)
        # s_k = -E_k as expressions
        s = [Expression.zero()]
        for k in range(1, need + 1):
            s.append(Expression([(-r, (dot(*pair),) if pair else (), None) for r, pair in shifts.get(k, [])]))
        eser = [Expression.one()]
        for k in range(1, need + 1):
            acc = Expression.zero()
            for j in range(1, k + 1):
                if not s[j].is_zero():
                    acc = acc + (s[j] * eser[k - j]).scale(j)
            eser.append(acc.scale(Fraction(1, k)))
    out = []
    for m in range(need + 1):
        acc = Expression.zero()
        for j in range(m + 1):
            if not cser[j].is_zero() and not eser[m - j].is_zero():
                acc = acc + eser[m - j].scale(cser[j])
        out.append(acc * Expression([(Rat.const(1), atoms, quad0)]))
    return p, out


def residue(expr: Expression, t: str, max_order: int = MAX_POLE_ORDER) -> Expression:
    """Coefficient of ``t**-1`` in the Laurent expansion around ``t = 0``."""
    result = Expression.zero()
    for coef, atoms, quad in expr.terms():
        p = coef.pole_order(t)
        if p == 0:
            continue
        if p > max_order:
            raise UnsupportedExpansion(f"pole of order {p} in {t} exceeds the cap {max_order}")
        _, series = _expand_term(coef, atoms, quad, t, p - 1)
        result = result + series[p - 1]
    return result


def principal_part(expr: Expression, t: str, max_order: int = MAX_POLE_ORDER) -> Expression:
    result = Expression.zero()
    for coef, atoms, quad in expr.terms():
        p = coef.pole_order(t)
        if p == 0:
            continue
        if p > max_order:
            raise UnsupportedExpansion(f"pole of order {p} in {t} exceeds the cap {max_order}")
        _, series = _expand_term(coef, atoms, quad, t, p - 1)
        for m in range(p):
            result = result + series[m].scale(Rat.var(t, m - p))
    return result


def regular_part(expr: Expression, t: str, max_order: int = MAX_POLE_ORDER) -> Expression:
    """The expression minus its principal part in ``t``."""
    return expr - principal_part(expr, t, max_order)


def laurent_res_reg(
    expr: Expression,
    edge_symbols: Iterable[str],
    reg_symbols: Iterable[str] = (),
    max_order: int = MAX_POLE_ORDER,
) -> tuple[Expression, Expression]:
    """Iterated residue over ``edge_symbols`` and its regular part over ``reg_symbols``.

    Returns ``(residue, regular)`` where ``regular`` is the residue with the
    principal parts in every ``reg_symbols`` variable removed.  With no
    ``edge_symbols`` the residue is the expression itself.
    """
    res = expr
    for t in sorted(set(edge_symbols), key=natural_key):
        res = residue(res, t, max_order)
    reg = res
    for t in sorted(set(reg_symbols), key=natural_key):
        reg = regular_part(reg, t, max_order)
    return res, reg
