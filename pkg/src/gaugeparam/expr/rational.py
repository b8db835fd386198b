"""Rational functions with a factored denominator.

The denominator is kept as a product of irreducible, primitive polynomials
with positive leading coefficient.  With the numerator divided by every
factor that divides it exactly, the representation is unique, so structural
equality is mathematical equality.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import sympy

from .poly import Poly, natural_key

Factors = tuple[tuple[Poly, int], ...]

_lock = threading.Lock()


def _factor_sort_key(item: tuple[Poly, int]) -> tuple:
    p, k = item
    return (p.degree(), p.sort_key(), k)


@lru_cache(maxsize=4096)
def _factor_cached(p: Poly) -> tuple[Fraction, Factors]:
    content, prim = p.primitive()
    factors: dict[Poly, int] = {}
    mono = prim.monomial_gcd()
    if mono:
        for s, k in mono:
            factors[Poly.var(s)] = factors.get(Poly.var(s), 0) + k
        prim = prim.exact_div(Poly.monomial(mono))
    if not prim.is_const():
        if prim.degree() == 1:
            factors[prim] = factors.get(prim, 0) + 1
        else:
            names = sorted(prim.variables(), key=natural_key)
            syms = sympy.symbols(f"x0:{len(names)}")
            back = dict(zip(syms, names))
            expr = sympy.Add(*[
                sympy.Rational(c.numerator, c.denominator)
                * sympy.Mul(*[syms[names.index(s)] ** k for s, k in m])
                for m, c in prim.terms.items()
            ])
            coeff, flist = sympy.factor_list(expr, *syms)
            extra = Fraction(int(sympy.numer(coeff)), int(sympy.denom(coeff)))
            for f, mult in flist:
                fp = sympy.Poly(f, *syms)
                terms = {}
                for exps, c in fp.terms():
                    mono_ = tuple((back[syms[j]], e) for j, e in enumerate(exps) if e)
                    mono_ = tuple(sorted(mono_, key=lambda kv: natural_key(kv[0])))
                    terms[mono_] = Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
                c2, fprim = Poly(terms).primitive()
                extra *= c2**mult
                factors[fprim] = factors.get(fprim, 0) + mult
            content *= extra
    else:
        content *= prim.const_value()
    return content, tuple(sorted(factors.items(), key=_factor_sort_key))


def factor_poly(p: Poly) -> tuple[Fraction, Factors]:
    """Factor ``p`` as ``content * prod(f**k)`` with irreducible primitive ``f``."""
    if p.is_zero():
        raise ZeroDivisionError("cannot factor the zero polynomial")
    with _lock:
        return _factor_cached(p)


class Rat:
    """Immutable rational function ``num / prod(f**k)``."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Factors = (), _reduced: bool = False):
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def from_poly(cls, p: Poly) -> "Rat":
        return cls(p, (), _reduced=True)

    @classmethod
    def const(cls, c) -> "Rat":
        return cls(Poly.const(c), (), _reduced=True)

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Rat":
        if power >= 0:
            return cls(Poly.var(name, power), (), _reduced=True)
        return cls(Poly.const(1), ((Poly.var(name), -power),), _reduced=True)

    @classmethod
    def quotient(cls, num: Poly, den: Poly) -> "Rat":
        return cls.from_poly(num).div_poly(den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return not self.den

    def is_const(self) -> bool:
        return not self.den and self.num.is_const()

    def den_poly(self) -> Poly:
        out = Poly.const(1)
        for f, k in self.den:
            out = out * f**k
        return out

    def variables(self) -> set[str]:
        out = self.num.variables()
        for f, _ in self.den:
            out |= f.variables()
        return out

    def pole_order(self, name: str) -> int:
        v = Poly.var(name)
        return sum(k for f, k in self.den if f == v)

    # arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Rat":
        other = _coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return Rat(self.num + other.num, self.den)
        a, b = dict(self.den), dict(other.den)
        common = {f: max(a.get(f, 0), b.get(f, 0)) for f in set(a) | set(b)}

        def lift(num, d):
            out = num
            for f, k in common.items():
                extra = k - d.get(f, 0)
                if extra:
                    out = out * f**extra
            return out

        den = tuple(sorted(common.items(), key=_factor_sort_key))
        return Rat(lift(self.num, a) + lift(other.num, b), den)

    __radd__ = __add__

    def __neg__(self) -> "Rat":
        return Rat(-self.num, self.den, _reduced=True)

    def __sub__(self, other) -> "Rat":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Rat":
        return _coerce(other) - self

    def __mul__(self, other) -> "Rat":
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return Rat.const(0)
        if not other.den and other.num.is_const():
            return Rat(self.num.scale(other.num.const_value()), self.den, _reduced=True)
        if not self.den and self.num.is_const():
            return Rat(other.num.scale(self.num.const_value()), other.den, _reduced=True)
        d = dict(self.den)
        for f, k in other.den:
            d[f] = d.get(f, 0) + k
        return Rat(self.num * other.num, tuple(sorted(d.items(), key=_factor_sort_key)))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Rat":
        if n < 0:
            return Rat.const(1) / self ** (-n)
        out = Rat.const(1)
        for _ in range(n):
            out = out * self
        return out

    def div_poly(self, p: Poly) -> "Rat":
        content, factors = factor_poly(p)
        d = dict(self.den)
        for f, k in factors:
            d[f] = d.get(f, 0) + k
        return Rat(self.num.scale(1 / content), tuple(sorted(d.items(), key=_factor_sort_key)))

    def __truediv__(self, other) -> "Rat":
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        out = self.div_poly(other.num)
        if other.den:
            out = out * Rat.from_poly(other.den_poly())
        return out

    # structure --------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Poly)):
            other = _coerce(other)
        if not isinstance(other, Rat):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def sort_key(self) -> tuple:
        return (tuple((f.sort_key(), k) for f, k in self.den), self.num.sort_key())

    def __repr__(self) -> str:
        from .render import rat_text

        return f"Rat({rat_text(self)!r})"

    def subs(self, mapping: Mapping[str, Poly]) -> "Rat":
        if not mapping:
            return self
        keys = set(mapping)
        if not (self.variables() & keys):
            return self
        out = Rat.from_poly(self.num.subs(mapping))
        for f, k in self.den:
            fs = f.subs(mapping)
            if fs.is_zero():
                raise ZeroDivisionError("substitution makes a denominator vanish")
            for _ in range(k):
                out = out.div_poly(fs)
        return out

    def evaluate(self, values):
        val = self.num.evaluate(values)
        for f, k in self.den:
            val = val / f.evaluate(values) ** k
        return val

    def diff(self, name: str) -> "Rat":
        """Quotient-rule derivative with respect to a symbol."""
        out = Rat(self.num.diff(name), self.den)
        for f, k in self.den:
            df = f.diff(name)
            if df.is_zero():
                continue
            d = dict(self.den)
            d[f] = d[f] + 1
            term = Rat(-(self.num * df).scale(k), tuple(sorted(d.items(), key=_factor_sort_key)))
            out = out + term
        return out


def _reduce(num: Poly, den: Factors) -> tuple[Poly, Factors]:
    if num.is_zero():
        return Poly(), ()
    if not den:
        return num, ()
    kept = []
    for f, k in den:
        while k and (q := num.exact_div(f)) is not None:
            num = q
            k -= 1
        if k:
            kept.append((f, k))
    return num, tuple(kept)


def _coerce(x) -> Rat:
    if isinstance(x, Rat):
        return x
    if isinstance(x, Poly):
        return Rat.from_poly(x)
    if isinstance(x, (int, Fraction)):
        return Rat.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a rational function")


def rat_sum(items: Iterable[Rat]) -> Rat:
    out = Rat.const(0)
    for r in items:
        out = out + r
    return out
