"""Exponential arguments quadratic in the momentum slots.

``Quadric`` stands for ``exp(-E)`` where ``E`` is a sum of rational-function
multiples of scalar products ``xi_s . xi_t`` plus a momentum-free part stored
under the empty pair ``()``.
"""

from __future__ import annotations

from typing import Mapping

from .poly import Poly, natural_key
from .rational import Rat

Pair = tuple  # () or (s, t) with s <= t in natural order


def make_pair(s: str, t: str) -> Pair:
    return (s, t) if natural_key(s) <= natural_key(t) else (t, s)


def _pair_key(p: Pair) -> tuple:
    return tuple(natural_key(x) for x in p)


class Quadric:
    __slots__ = ("entries", "_hash")

    def __init__(self, entries: Mapping[Pair, Rat]):
        clean = {p: r for p, r in entries.items() if not r.is_zero()}
        self.entries: tuple[tuple[Pair, Rat], ...] = tuple(sorted(clean.items(), key=lambda kv: _pair_key(kv[0])))
        self._hash = None

    def is_trivial(self) -> bool:
        return not self.entries

    def as_dict(self) -> dict[Pair, Rat]:
        return dict(self.entries)

    def __add__(self, other: "Quadric") -> "Quadric":
        d = self.as_dict()
        for p, r in other.entries:
            d[p] = d[p] + r if p in d else r
        return Quadric(d)

    def __eq__(self, other) -> bool:
        return isinstance(other, Quadric) and self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def sort_key(self) -> tuple:
        return tuple((_pair_key(p), r.sort_key()) for p, r in self.entries)

    def slots(self) -> set[str]:
        return {s for p, _ in self.entries for s in p}

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for _, r in self.entries:
            out |= r.variables()
        return out

    # views matching the ratio/affine decomposition -----------------------
    def ratio_part(self) -> dict[Pair, Rat]:
        return {p: r for p, r in self.entries if not r.is_poly()}

    def affine_part(self) -> dict[Pair, Poly]:
        return {p: r.num for p, r in self.entries if r.is_poly()}

    # transformations --------------------------------------------------
    def substitute(self, routing: Mapping[str, Mapping[str, int]]) -> "Quadric":
        out: dict[Pair, Rat] = {}
        for p, r in self.entries:
            if not p:
                out[p] = out[p] + r if p in out else r
                continue
            s, t = p
            for qs, cs in routing.get(s, {s: 1}).items():
                for qt, ct in routing.get(t, {t: 1}).items():
                    np_ = make_pair(qs, qt)
                    add = r * (cs * ct)
                    out[np_] = out[np_] + add if np_ in out else add
        return Quadric(out)

    def subs_symbols(self, mapping: Mapping[str, Poly]) -> "Quadric":
        return Quadric({p: r.subs(mapping) for p, r in self.entries})

    def evaluate(self, values, vectors) -> complex:
        total = 0
        for p, r in self.entries:
            v = r.evaluate(values)
            if p:
                v = v * sum(a * b for a, b in zip(vectors[p[0]], vectors[p[1]]))
            total += v
        return total
