"""Lorentz tensor atoms.

Atoms are small tuples so they hash and compare cheaply:

* ``("eta", mu, nu)``   metric, indices in natural order
* ``("mom", slot, mu)`` component ``mu`` of the momentum ``slot``
* ``("dot", s, t)``     scalar product, slots in natural order
* ``("tok", label)``    opaque structure token (colour factors and the like)

Index variance is not tracked; any repeated index is summed.
"""

from __future__ import annotations

from .poly import natural_key

Atom = tuple

SPACETIME_DIM = 4

_RANK = {"tok": 0, "eta": 1, "mom": 2, "dot": 3}


def metric(mu: str, nu: str) -> Atom:
    if natural_key(nu) < natural_key(mu):
        mu, nu = nu, mu
    return ("eta", mu, nu)


def mom(slot: str, mu: str) -> Atom:
    return ("mom", slot, mu)


def dot(s: str, t: str) -> Atom:
    if natural_key(t) < natural_key(s):
        s, t = t, s
    return ("dot", s, t)


def token(label: str) -> Atom:
    return ("tok", label)


def atom_key(a: Atom) -> tuple:
    return (_RANK[a[0]],) + tuple(natural_key(x) for x in a[1:])


def sort_atoms(atoms) -> tuple[Atom, ...]:
    return tuple(sorted(atoms, key=atom_key))


def indices_of(a: Atom) -> tuple[str, ...]:
    if a[0] == "eta":
        return (a[1], a[2])
    if a[0] == "mom":
        return (a[2],)
    return ()


def slots_of(a: Atom) -> tuple[str, ...]:
    if a[0] == "mom":
        return (a[1],)
    if a[0] == "dot":
        return (a[1], a[2])
    return ()


class MalformedExpression(ValueError):
    """An index occurs three or more times in a single term."""


def contract_atoms(atoms: tuple[Atom, ...]) -> tuple[int, tuple[Atom, ...]]:
    """Contract every repeated index; returns ``(numeric factor, atoms)``."""
    factor = 1
    work = list(atoms)
    while True:
        seen: dict[str, list[int]] = {}
        for pos, a in enumerate(work):
            for mu in indices_of(a):
                seen.setdefault(mu, []).append(pos)
        repeated = None
        for mu, where in seen.items():
            if len(where) > 2:
                raise MalformedExpression(f"index {mu} occurs {len(where)} times in one term")
            if len(where) == 2:
                repeated = (mu, where)
                break
        if repeated is None:
            return factor, sort_atoms(work)
        mu, (p, q) = repeated
        a, b = work[p], work[q]
        if p == q:
            # trace of the metric
            factor *= SPACETIME_DIM
            del work[p]
            continue
        new = _pair(a, b, mu)
        for pos in sorted((p, q), reverse=True):
            del work[pos]
        work.append(new)


def _other_index(a: Atom, mu: str) -> str:
    return a[2] if a[1] == mu else a[1]


def _pair(a: Atom, b: Atom, mu: str) -> Atom:
    if a[0] == "eta" and b[0] == "eta":
        return metric(_other_index(a, mu), _other_index(b, mu))
    if a[0] == "eta":
        return mom(b[1], _other_index(a, mu))
    if b[0] == "eta":
        return mom(a[1], _other_index(b, mu))
    return dot(a[1], b[1])
