"""Sums of ``coefficient * tensor atoms * exp(-quadric)`` terms."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .poly import Poly
from .quadric import Quadric, make_pair
from .rational import Rat
from .tensor import (
    Atom,
    atom_key,
    contract_atoms,
    dot,
    metric,
    mom,
    slots_of,
    sort_atoms,
    token,
)

TermKey = tuple  # (tensors, quadric or None)

Routing = Mapping[str, Mapping[str, int]]


class IncompleteRouting(KeyError):
    """A momentum slot has no entry in the routing."""


class Expression:
    """Canonical, immutable sum of terms.

    Terms sharing the same tensor multiset and exponential are merged and
    zero terms are dropped on construction, so ``==`` is structural equality
    of canonical forms.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[tuple[Rat, Iterable[Atom], Quadric | None]] = ()):
        acc: dict[TermKey, Rat] = {}
        for coef, atoms, quad in terms:
            if coef.is_zero():
                continue
            if quad is not None and quad.is_trivial():
                quad = None
            key = (sort_atoms(atoms), quad)
            acc[key] = acc[key] + coef if key in acc else coef
        self._terms = {k: v for k, v in acc.items() if not v.is_zero()}
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls) -> "Expression":
        return cls()

    @classmethod
    def scalar(cls, value) -> "Expression":
        if isinstance(value, Expression):
            return value
        if isinstance(value, Poly):
            value = Rat.from_poly(value)
        elif not isinstance(value, Rat):
            value = Rat.const(value)
        return cls([(value, (), None)])

    @classmethod
    def one(cls) -> "Expression":
        return cls.scalar(1)

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "Expression":
        return cls.scalar(Rat.var(name, power))

    @classmethod
    def atom(cls, a: Atom, coef=1) -> "Expression":
        return cls([(Rat.const(coef) if not isinstance(coef, Rat) else coef, (a,), None)])

    @classmethod
    def metric(cls, mu: str, nu: str) -> "Expression":
        return cls.atom(metric(mu, nu))

    @classmethod
    def mom(cls, slot: str, mu: str) -> "Expression":
        return cls.atom(mom(slot, mu))

    @classmethod
    def dot(cls, s: str, t: str) -> "Expression":
        return cls.atom(dot(s, t))

    @classmethod
    def token(cls, label: str) -> "Expression":
        return cls.atom(token(label))

    @classmethod
    def exp(cls, quad: Quadric, coef: Rat | None = None) -> "Expression":
        return cls([(coef or Rat.const(1), (), quad)])

    # access -----------------------------------------------------------
    def terms(self) -> list[tuple[Rat, tuple[Atom, ...], Quadric | None]]:
        """Terms in deterministic order."""
        items = sorted(self._terms.items(), key=lambda kv: _term_key(kv[0]))
        return [(c, k[0], k[1]) for k, c in items]

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, atoms: Iterable[Atom] = (), quad: Quadric | None = None) -> Rat:
        return self._terms.get((sort_atoms(atoms), quad), Rat.const(0))

    def quadrics(self) -> set:
        return {k[1] for k in self._terms}

    def has_exponential(self) -> bool:
        return any(k[1] is not None for k in self._terms)

    def slots(self) -> set[str]:
        out: set[str] = set()
        for (atoms, quad) in self._terms:
            for a in atoms:
                out.update(slots_of(a))
            if quad is not None:
                out |= quad.slots()
        return out

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for (atoms, quad), c in self._terms.items():
            out |= c.variables()
            if quad is not None:
                out |= quad.symbols()
        return out

    def as_rat(self) -> Rat:
        """The value of a purely scalar expression."""
        if not self._terms:
            return Rat.const(0)
        if set(self._terms) != {((), None)}:
            raise ValueError("expression carries tensors or an exponential")
        return self._terms[((), None)]

    # arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Expression":
        other = _coerce(other)
        return Expression(self._raw() + other._raw())

    __radd__ = __add__

    def __neg__(self) -> "Expression":
        return Expression((-c, a, q) for c, a, q in self._raw())

    def __sub__(self, other) -> "Expression":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Expression":
        return _coerce(other) - self

    def __mul__(self, other) -> "Expression":
        other = _coerce(other)
        out = []
        for c1, a1, q1 in self._raw():
            for c2, a2, q2 in other._raw():
                if q1 is None:
                    q = q2
                elif q2 is None:
                    q = q1
                else:
                    q = q1 + q2
                out.append((c1 * c2, a1 + a2, q))
        return Expression(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Expression":
        out = Expression.one()
        for _ in range(n):
            out = out * self
        return out

    def scale(self, r) -> "Expression":
        if not isinstance(r, Rat):
            r = Rat.from_poly(r) if isinstance(r, Poly) else Rat.const(r)
        return Expression((c * r, a, q) for c, a, q in self._raw())

    def div_poly(self, p: Poly) -> "Expression":
        return Expression((c.div_poly(p), a, q) for c, a, q in self._raw())

    def _raw(self) -> list:
        return [(c, k[0], k[1]) for k, c in self._terms.items()]

    # equality ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Poly, Rat)):
            other = Expression.scalar(other)
        if not isinstance(other, Expression):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        from .render import render

        return f"Expression({render(self, 'text')!r})"

    def __str__(self) -> str:
        from .render import render

        return render(self, "text")

    # tensor algebra ---------------------------------------------------
    def contract(self) -> "Expression":
        out = []
        for c, atoms, q in self._raw():
            f, new = contract_atoms(atoms)
            out.append((c * f if f != 1 else c, new, q))
        return Expression(out)

    def differentiate(self, slot: str, index: str) -> "Expression":
        """Partial derivative with respect to component ``index`` of ``slot``."""
        out = []
        for c, atoms, q in self._raw():
            for pos, a in enumerate(atoms):
                rest = atoms[:pos] + atoms[pos + 1:]
                kind = a[0]
                if kind == "mom" and a[1] == slot:
                    out.append((c, rest + (metric(a[2], index),), q))
                elif kind == "dot":
                    s, t = a[1], a[2]
                    if s == slot and t == slot:
                        out.append((c * 2, rest + (mom(slot, index),), q))
                    elif s == slot:
                        out.append((c, rest + (mom(t, index),), q))
                    elif t == slot:
                        out.append((c, rest + (mom(s, index),), q))
            if q is not None:
                for pair, r in q.entries:
                    if not pair:
                        continue
                    s, t = pair
                    if s == slot and t == slot:
                        out.append((-(c * r) * 2, atoms + (mom(slot, index),), q))
                    elif s == slot:
                        out.append((-(c * r), atoms + (mom(t, index),), q))
                    elif t == slot:
                        out.append((-(c * r), atoms + (mom(s, index),), q))
        return Expression(out).contract()

    def substitute_momenta(self, routing: Routing, independent: Iterable[str] = ()) -> "Expression":
        """Replace every routed slot by its linear combination of independent slots.

        Slots absent from ``routing`` must be listed in ``independent``,
        otherwise :class:`IncompleteRouting` is raised.
        """
        free = set(independent)
        for r in routing.values():
            free.update(r)
        missing = self.slots() - set(routing) - free
        if missing:
            raise IncompleteRouting(f"no routing for momentum slot(s) {sorted(missing)}")
        out = []
        for c, atoms, q in self._raw():
            expansions: list[list[tuple[Fraction, Atom]]] = []
            for a in atoms:
                if a[0] == "mom":
                    expansions.append([(Fraction(k), mom(s, a[2])) for s, k in routing.get(a[1], {a[1]: 1}).items()])
                elif a[0] == "dot":
                    opts = []
                    for s, k in routing.get(a[1], {a[1]: 1}).items():
                        for t, l in routing.get(a[2], {a[2]: 1}).items():
                            opts.append((Fraction(k * l), dot(s, t)))
                    expansions.append(opts)
                else:
                    expansions.append([(Fraction(1), a)])
            nq = q.substitute(routing) if q is not None else None
            partial = [(Fraction(1), ())]
            for opts in expansions:
                partial = [(f * k, atoms_ + (a,)) for f, atoms_ in partial for k, a in opts if k]
            for f, atoms_ in partial:
                out.append((c * f, atoms_, nq))
        return Expression(out)

    def subs_symbols(self, mapping: Mapping[str, Poly]) -> "Expression":
        mapping = {k: (v if isinstance(v, Poly) else Poly.const(v)) for k, v in mapping.items()}
        return Expression(
            (c.subs(mapping), a, q.subs_symbols(mapping) if q is not None else None) for c, a, q in self._raw()
        )

    def map_coefficients(self, fn) -> "Expression":
        return Expression((fn(c), a, q) for c, a, q in self._raw())

    def strip_exponential(self, quad: Quadric) -> "Expression":
        """Divide by ``exp(-quad)``; every term must carry exactly that factor."""
        out = []
        for c, a, q in self._raw():
            if q != quad:
                raise ValueError("term does not carry the expected exponential")
            out.append((c, a, None))
        return Expression(out)

    # numerics (used by tests and examples) ----------------------------
    def evaluate(self, values, vectors=None, indices=None) -> complex:
        """Numeric value with Euclidean components.

        ``values`` maps symbols, ``vectors`` maps slots to 4-component
        sequences, ``indices`` fixes free Lorentz indices to 0..3; repeated
        indices are summed.
        """
        vectors = vectors or {}
        indices = dict(indices or {})
        total = 0
        for c, atoms, q in self._raw():
            total += c.evaluate(values) * _eval_atoms(atoms, vectors, indices, values) * (
                _cexp(-q.evaluate(values, vectors)) if q is not None else 1
            )
        return total


def _cexp(x):
    import cmath
    import math

    return math.exp(x) if isinstance(x, (int, float, Fraction)) else cmath.exp(x)


def _eval_atoms(atoms, vectors, fixed, values):
    from itertools import product

    counts: dict[str, int] = {}
    for a in atoms:
        if a[0] == "eta":
            for mu in (a[1], a[2]):
                counts[mu] = counts.get(mu, 0) + 1
        elif a[0] == "mom":
            counts[a[2]] = counts.get(a[2], 0) + 1
    summed = [mu for mu, k in counts.items() if mu not in fixed]
    total = 0
    for combo in product(range(4), repeat=len(summed)):
        idx = dict(fixed)
        idx.update(zip(summed, combo))
        v = 1
        for a in atoms:
            if a[0] == "eta":
                v *= 1 if idx[a[1]] == idx[a[2]] else 0
            elif a[0] == "mom":
                v *= vectors[a[1]][idx[a[2]]]
            elif a[0] == "dot":
                v *= sum(x * y for x, y in zip(vectors[a[1]], vectors[a[2]]))
            else:
                v *= values.get(a[1], 1)
            if v == 0:
                break
        total += v
    return total


def _term_key(key: TermKey) -> tuple:
    atoms, q = key
    return (len(atoms), tuple(atom_key(a) for a in atoms), () if q is None else (1, q.sort_key()))


def _coerce(x) -> Expression:
    if isinstance(x, Expression):
        return x
    return Expression.scalar(x)


def quadric(entries: Mapping) -> Quadric:
    """Build a quadric from ``{(s, t) or (): Rat | Poly | number}``."""
    out = {}
    for p, v in entries.items():
        if not isinstance(v, Rat):
            v = Rat.from_poly(v) if isinstance(v, Poly) else Rat.const(v)
        key = make_pair(*p) if p else ()
        out[key] = out[key] + v if key in out else v
    return Quadric(out)
