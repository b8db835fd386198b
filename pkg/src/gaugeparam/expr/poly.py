"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a tuple of ``(symbol, exponent)`` pairs sorted by the natural
order of the symbol names, so ``A2`` sorts before ``A10``.  The symbol ``i``
is the imaginary unit and is reduced with ``i**2 = -1`` on multiplication.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

IMAG = "i"

Monomial = tuple[tuple[str, int], ...]

_SPLIT = re.compile(r"(\d+)")


@lru_cache(maxsize=None)
def natural_key(name: str) -> tuple:
    parts = _SPLIT.split(name)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p != "")


def _mono_mul(a: Monomial, b: Monomial) -> tuple[int, Monomial]:
    """Product of two monomials as (sign, monomial), reducing powers of i."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    merged = dict(a)
    for s, k in b:
        merged[s] = merged.get(s, 0) + k
    sign = 1
    k = merged.get(IMAG)
    if k is not None:
        if k >= 2:
            if (k // 2) % 2:
                sign = -1
            k %= 2
        if k:
            merged[IMAG] = k
        else:
            del merged[IMAG]
    return sign, tuple(sorted(merged.items(), key=lambda kv: natural_key(kv[0])))


def _mono_key(m: Monomial) -> tuple:
    return tuple((natural_key(s), k) for s, k in m)


def mono_degree(m: Monomial) -> int:
    return sum(k for _, k in m)


class Poly:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self.terms: dict[Monomial, Fraction] = clean
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)}) if c else cls()

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        if name == IMAG and power >= 2:
            return cls.const(1 if (power // 2) % 2 == 0 else -1) * (cls.var(IMAG) if power % 2 else cls.const(1))
        return cls({((name, power),): Fraction(1)}) if power else cls.const(1)

    @classmethod
    def monomial(cls, mono: Iterable[tuple[str, int]], coeff=1) -> "Poly":
        p = cls.const(coeff)
        for s, k in mono:
            p = p * cls.var(s, k)
        return p

    # basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError("polynomial is not constant")
        return self.terms.get((), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def variables(self) -> set[str]:
        return {s for m in self.terms for s, _ in m}

    def degree(self, name: str | None = None) -> int:
        if not self.terms:
            return -1
        if name is None:
            return max(mono_degree(m) for m in self.terms)
        return max(dict(m).get(name, 0) for m in self.terms)

    def min_degree(self, name: str) -> int:
        return min(dict(m).get(name, 0) for m in self.terms) if self.terms else 0

    def is_homogeneous(self, names: Iterable[str] | None = None) -> bool:
        names = set(names) if names is not None else None

        def deg(m):
            return sum(k for s, k in m if names is None or s in names)

        return len({deg(m) for m in self.terms}) <= 1

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in display order: descending degree, then lexicographic."""
        return sorted(self.terms.items(), key=lambda t: (-mono_degree(t[0]), _mono_key(t[0])))

    def sort_key(self) -> tuple:
        return tuple((_mono_key(m), c) for m, c in self.sorted_terms())

    # arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = _coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Poly":
        return _coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = _coerce(other)
        if not self.terms or not other.terms:
            return Poly()
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + sign * c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        return Poly({m: c * v for m, v in self.terms.items()}) if c else Poly()

    # equality ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        from .render import poly_text

        return f"Poly({poly_text(self)!r})"

    # calculus and substitution ----------------------------------------
    def diff(self, name: str) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            d = dict(m)
            k = d.get(name, 0)
            if not k:
                continue
            if k == 1:
                del d[name]
            else:
                d[name] = k - 1
            mm = tuple(sorted(d.items(), key=lambda kv: natural_key(kv[0])))
            out[mm] = out.get(mm, 0) + c * k
        return Poly(out)

    def subs(self, mapping: Mapping[str, "Poly"]) -> "Poly":
        if not mapping or not (self.variables() & set(mapping)):
            return self
        result = Poly()
        powers: dict[tuple[str, int], Poly] = {}
        for m, c in self.terms.items():
            term = Poly.const(c)
            for s, k in m:
                if s in mapping:
                    key = (s, k)
                    if key not in powers:
                        powers[key] = _coerce(mapping[s]) ** k
                    term = term * powers[key]
                else:
                    term = term * Poly.var(s, k)
            result = result + term
        return result

    def coefficients_in(self, name: str) -> dict[int, "Poly"]:
        """Collect by powers of ``name``: ``{k: coefficient of name**k}``."""
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            d = dict(m)
            k = d.pop(name, 0)
            mm = tuple(sorted(d.items(), key=lambda kv: natural_key(kv[0])))
            out.setdefault(k, {})[mm] = c
        return {k: Poly(v) for k, v in out.items()}

    def evaluate(self, values: Mapping[str, complex | float | Fraction]):
        total = 0
        for m, c in self.terms.items():
            t = c
            for s, k in m:
                if s == IMAG and s not in values:
                    t = t * (1j**k)
                else:
                    t = t * values[s] ** k
            total = total + t
        return total

    # division ---------------------------------------------------------
    def leading(self, order: list[str]) -> tuple[Monomial, Fraction]:
        def key(item):
            d = dict(item[0])
            return tuple(d.get(v, 0) for v in order)

        return max(self.terms.items(), key=key)

    def exact_div(self, other: "Poly") -> "Poly | None":
        """Quotient if ``other`` divides ``self`` exactly, otherwise ``None``.

        Plain leading-term division in lex order; a non-divisible leading
        term proves that no exact quotient exists.
        """
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return Poly()
        if other.is_const():
            return self.scale(1 / other.const_value())
        order = sorted(self.variables() | other.variables(), key=natural_key)
        lm_o, lc_o = other.leading(order)
        lo = dict(lm_o)
        quotient: dict[Monomial, Fraction] = {}
        rem = self
        while not rem.is_zero():
            lm_r, lc_r = rem.leading(order)
            lr = dict(lm_r)
            q = {}
            for s, k in lo.items():
                if lr.get(s, 0) < k:
                    return None
            for s, k in lr.items():
                left = k - lo.get(s, 0)
                if left:
                    q[s] = left
            qm = tuple(sorted(q.items(), key=lambda kv: natural_key(kv[0])))
            qc = lc_r / lc_o
            quotient[qm] = quotient.get(qm, 0) + qc
            rem = rem - Poly({qm: qc}) * other
            if len(quotient) > 10000:
                raise RuntimeError("runaway polynomial division")
        return Poly(quotient)

    def primitive(self) -> tuple[Fraction, "Poly"]:
        """Split into ``content * primitive`` with integer coefficients of gcd 1
        and a positive leading coefficient (lex order on natural names)."""
        from math import gcd, lcm

        if self.is_zero():
            return Fraction(0), self
        den = 1
        for c in self.terms.values():
            den = lcm(den, c.denominator)
        g = 0
        for c in self.terms.values():
            g = gcd(g, int(c * den))
        content = Fraction(g, den)
        order = sorted(self.variables(), key=natural_key)
        _, lc = self.leading(order)
        if lc < 0:
            content = -content
        return content, self.scale(1 / content)

    def monomial_gcd(self) -> Monomial:
        common: dict[str, int] | None = None
        for m in self.terms:
            d = dict(m)
            if common is None:
                common = d
            else:
                common = {s: min(k, d[s]) for s, k in common.items() if s in d}
        common = common or {}
        return tuple(sorted(((s, k) for s, k in common.items() if k), key=lambda kv: natural_key(kv[0])))


def _coerce(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a polynomial")


def poly_sum(items: Iterable[Poly]) -> Poly:
    out: dict[Monomial, Fraction] = {}
    for p in items:
        for m, c in p.terms.items():
            out[m] = out.get(m, 0) + c
    return Poly(out)
