"""Feynman graphs of 3-valent vertices and their combinatorial enumerators.

Edges are identified by string ids.  Internal edges carry an orientation
``start -> end``; external legs attach to a single vertex and point into
the graph.  The rotation system fixes a cyclic order of edge ids at each
vertex, which defines successor and predecessor half-edges.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence

from .expr.poly import natural_key


class GraphError(ValueError):
    """Precondition failure, e.g. a disconnected graph."""


class GraphParseError(GraphError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str


class GraphValidationError(GraphError):
    def __init__(self, violations: Sequence[Violation]):
        super().__init__("; ".join(f"{v.kind}: {v.message}" for v in violations))
        self.violations = list(violations)


@dataclass(frozen=True, order=True)
class HalfEdge:
    vertex: str
    edge: str

    def __str__(self) -> str:
        return f"({self.vertex},{self.edge})"


@dataclass(frozen=True)
class FeynmanGraph:
    vertices: tuple[str, ...]
    internal_edges: tuple[tuple[str, str, str], ...]
    external_edges: tuple[tuple[str, str], ...]
    rotation: tuple[tuple[str, tuple[str, ...]], ...]
    edge_masses: tuple[tuple[str, str], ...] = ()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    # --- naming conventions for symbols attached to edges
    @staticmethod
    def schwinger(e: str) -> str:
        return f"A{e}"

    @staticmethod
    def momentum(e: str) -> str:
        return f"xi{e}"

    @staticmethod
    def lorentz(e: str) -> str:
        return f"mu{e}"

    # --- basic structure
    @property
    def internal_ids(self) -> tuple[str, ...]:
        return tuple(e for e, _, _ in self.internal_edges)

    @property
    def external_ids(self) -> tuple[str, ...]:
        return tuple(e for e, _ in self.external_edges)

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return self.internal_ids + self.external_ids

    def is_external(self, e: str) -> bool:
        return e in self._ext_map()

    def _ext_map(self) -> dict[str, str]:
        if "ext" not in self._cache:
            self._cache["ext"] = dict(self.external_edges)
        return self._cache["ext"]

    def _int_map(self) -> dict[str, tuple[str, str]]:
        if "int" not in self._cache:
            self._cache["int"] = {e: (s, t) for e, s, t in self.internal_edges}
        return self._cache["int"]

    def endpoints(self, e: str) -> tuple[str, ...]:
        """``(start, end)`` for an internal edge, ``(vertex,)`` for an external one."""
        if e in self._int_map():
            return self._int_map()[e]
        return (self._ext_map()[e],)

    def incident(self, v: str) -> tuple[str, ...]:
        """Edge ids at ``v`` in rotation order."""
        return dict(self.rotation)[v]

    def half_edges(self) -> list[HalfEdge]:
        return [HalfEdge(v, e) for v in self.vertices for e in self.incident(v)]

    def mass(self, e: str) -> str | None:
        return dict(self.edge_masses).get(e)

    def other_end(self, e: str, v: str) -> str:
        s, t = self._int_map()[e]
        return t if v == s else s

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for e in self.incident(v):
                if e in self._int_map():
                    w = self.other_end(e, v)
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return len(seen) == len(self.vertices)

    def loop_number(self) -> int:
        return len(self.internal_edges) - len(self.vertices) + 1

    def with_orientation(self, flips: Iterable[str]) -> "FeynmanGraph":
        flips = set(flips)
        edges = tuple((e, t, s) if e in flips else (e, s, t) for e, s, t in self.internal_edges)
        return FeynmanGraph(self.vertices, edges, self.external_edges, self.rotation, self.edge_masses)

    def to_text(self) -> str:
        lines = [f"v {v}" for v in self.vertices]
        lines += [f"e {e} {s} {t}" for e, s, t in self.internal_edges]
        lines += [f"x {e} {v}" for e, v in self.external_edges]
        lines += [f"rot {v} " + " ".join(es) for v, es in self.rotation]
        lines += [f"mass {e} {m}" for e, m in self.edge_masses]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parsing
def parse_graph(text: str, validate_graph: bool = True) -> FeynmanGraph:
    """Parse the line-based graph format.

    ``v <id>``, ``e <id> <start> <end>``, ``x <id> <vertex>``,
    ``rot <vertex> <id> <id> <id>``, ``mass <edge-id> <symbol>``; ``#``
    starts a comment.  Without a ``rot`` line a vertex uses the order in
    which its edges were declared.
    """
    vertices: list[str] = []
    internal: list[tuple[str, str, str]] = []
    external: list[tuple[str, str]] = []
    rotations: dict[str, tuple[str, ...]] = {}
    rot_lines: dict[str, int] = {}
    masses: dict[str, str] = {}
    edge_ids: set[str] = set()
    vertex_line: dict[str, int] = {}
    pending_refs: list[tuple[int, int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = []
        for m in _tokens(line):
            tokens.append(m)
        kw, kcol = tokens[0]
        args = tokens[1:]

        def need(n: int):
            if len(args) != n:
                col = args[n][1] if len(args) > n else len(line) + 1
                raise GraphParseError(lineno, col, f"'{kw}' expects {n} argument(s), got {len(args)}")

        if kw == "v":
            need(1)
            vid, col = args[0]
            if vid in vertex_line:
                raise GraphParseError(lineno, col, f"duplicate vertex id {vid!r}")
            vertex_line[vid] = lineno
            vertices.append(vid)
        elif kw == "e":
            need(3)
            (eid, col), (s, scol), (t, tcol) = args
            if eid in edge_ids:
                raise GraphParseError(lineno, col, f"duplicate edge id {eid!r}")
            edge_ids.add(eid)
            internal.append((eid, s, t))
            pending_refs += [(lineno, scol, s), (lineno, tcol, t)]
        elif kw == "x":
            need(2)
            (eid, col), (v, vcol) = args
            if eid in edge_ids:
                raise GraphParseError(lineno, col, f"duplicate edge id {eid!r}")
            edge_ids.add(eid)
            external.append((eid, v))
            pending_refs.append((lineno, vcol, v))
        elif kw == "rot":
            if len(args) < 1:
                raise GraphParseError(lineno, len(line) + 1, "'rot' needs a vertex id")
            v, vcol = args[0]
            if v in rotations:
                raise GraphParseError(lineno, vcol, f"duplicate rotation for vertex {v!r}")
            rotations[v] = tuple(a for a, _ in args[1:])
            rot_lines[v] = lineno
            pending_refs.append((lineno, vcol, v))
        elif kw == "mass":
            need(2)
            (eid, col), (sym, _) = args
            masses[eid] = sym
        else:
            raise GraphParseError(lineno, kcol, f"unknown directive {kw!r}")

    if not vertices:
        raise GraphParseError(1, 1, "empty graph: no vertices declared")
    for lineno, col, v in pending_refs:
        if v not in vertex_line:
            raise GraphParseError(lineno, col, f"unknown vertex {v!r}")
    for eid in masses:
        if eid not in edge_ids:
            raise GraphParseError(1, 1, f"mass given for unknown edge {eid!r}")

    declared: dict[str, list[str]] = {v: [] for v in vertices}
    for eid, s, t in internal:
        declared[s].append(eid)
        if t != s:
            declared[t].append(eid)
    for eid, v in external:
        declared[v].append(eid)
    for v, order in rotations.items():
        if Counter(order) != Counter(declared[v]):
            raise GraphParseError(
                rot_lines[v], 1, f"rotation at {v!r} lists {list(order)} but incident edges are {declared[v]}"
            )
    rotation = tuple((v, rotations.get(v, tuple(declared[v]))) for v in vertices)
    g = FeynmanGraph(
        tuple(vertices),
        tuple(internal),
        tuple(external),
        rotation,
        tuple((e, masses[e]) for e in list(dict.fromkeys([*(x[0] for x in internal), *(x[0] for x in external)])) if e in masses),
    )
    if validate_graph:
        violations = validate(g)
        if violations:
            raise GraphValidationError(violations)
    return g


def _tokens(line: str) -> Iterator[tuple[str, int]]:
    col = 0
    n = len(line)
    while col < n:
        while col < n and line[col].isspace():
            col += 1
        if col >= n:
            break
        start = col
        while col < n and not line[col].isspace():
            col += 1
        yield line[start:col], start + 1


def load_graph(path: str) -> FeynmanGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# ---------------------------------------------------------------- validation
def validate(g: FeynmanGraph) -> list[Violation]:
    """All structural violations; an empty list means the graph is valid."""
    out: list[Violation] = []
    valence = Counter()
    for e, s, t in g.internal_edges:
        if s == t:
            out.append(Violation("tadpole", f"edge {e} is a self-loop at {s}"))
        valence[s] += 1
        valence[t] += 1
    seen_ext = Counter(e for e, _ in g.external_edges)
    for e, k in seen_ext.items():
        if k > 1:
            out.append(Violation("external", f"external edge {e} has {k} attachments"))
    for _, v in g.external_edges:
        valence[v] += 1
    for v in g.vertices:
        if valence[v] != 3:
            out.append(Violation("regularity", f"vertex {v} has valence {valence[v]}"))
    rot = dict(g.rotation)
    for v in g.vertices:
        inc = [e for e, s, t in g.internal_edges if v in (s, t)] + [e for e, w in g.external_edges if w == v]
        if v not in rot:
            out.append(Violation("rotation", f"vertex {v} has no rotation"))
        elif Counter(rot[v]) != Counter(inc) or len(set(rot[v])) != len(rot[v]):
            out.append(Violation("rotation", f"rotation at {v} does not list each incident edge once"))
    return out


# ---------------------------------------------------------------- half-edges
def half_edge_orientation(g: FeynmanGraph, h: HalfEdge) -> tuple[HalfEdge, HalfEdge]:
    """``(successor, predecessor)`` in the cyclic order at ``h.vertex``."""
    order = g.incident(h.vertex)
    k = order.index(h.edge)
    n = len(order)
    return HalfEdge(h.vertex, order[(k + 1) % n]), HalfEdge(h.vertex, order[(k - 1) % n])


def incidence_matrix(g: FeynmanGraph) -> dict[tuple[str, str], int]:
    """``(vertex, edge) -> +1`` at an edge's end, ``-1`` at its start.

    External legs point into the graph and get ``+1`` at their vertex.
    Zero entries are omitted.
    """
    m: dict[tuple[str, str], int] = {}
    for e, s, t in g.internal_edges:
        m[(s, e)] = -1
        m[(t, e)] = 1
    for e, v in g.external_edges:
        m[(v, e)] = 1
    return m


def epsilon(g: FeynmanGraph, v: str, e: str) -> int:
    return incidence_matrix_cached(g).get((v, e), 0)


def incidence_matrix_cached(g: FeynmanGraph) -> dict[tuple[str, str], int]:
    if "inc" not in g._cache:
        g._cache["inc"] = incidence_matrix(g)
    return g._cache["inc"]


# ---------------------------------------------------------------- cycles
@dataclass(frozen=True)
class Cycle:
    """A simple cycle with a traversal direction.

    ``orientation[e]`` is ``+1`` when the traversal follows the edge's own
    orientation and ``-1`` otherwise.
    """

    edges: frozenset[str]
    vertices: tuple[str, ...]
    orientation: tuple[tuple[str, int], ...]

    @property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    def sign(self, e: str) -> int:
        return dict(self.orientation).get(e, 0)


def _make_cycle(g: FeynmanGraph, start: str, edge_path: Sequence[str]) -> Cycle:
    verts = [start]
    orient = []
    cur = start
    for e in edge_path:
        s, t = g.endpoints(e)
        orient.append((e, 1 if s == cur else -1))
        cur = g.other_end(e, cur)
        verts.append(cur)
    return Cycle(frozenset(edge_path), tuple(verts[:-1]), tuple(orient))


def _require_connected(g: FeynmanGraph) -> None:
    if not g.is_connected():
        raise GraphError("graph is not connected")


def cycle_basis(g: FeynmanGraph) -> list[Cycle]:
    """Fundamental cycles of a breadth-first spanning tree, one per chord."""
    _require_connected(g)
    root = g.vertices[0]
    parent: dict[str, tuple[str, str] | None] = {root: None}
    queue = [root]
    tree: set[str] = set()
    for v in queue:
        for e in g.incident(v):
            if g.is_external(e):
                continue
            w = g.other_end(e, v)
            if w not in parent:
                parent[w] = (v, e)
                tree.add(e)
                queue.append(w)

    def path_to_root(v):
        out = []
        while parent[v] is not None:
            p, e = parent[v]
            out.append((v, e))
            v = p
        return out

    basis = []
    for e, s, t in g.internal_edges:
        if e in tree:
            continue
        # chord s->t, then back from t to s through the tree
        up_t = path_to_root(t)
        up_s = path_to_root(s)
        anc_t = [v for v, _ in up_t] + [root]
        anc_s = [v for v, _ in up_s] + [root]
        lca = next(v for v in anc_t if v in set(anc_s))
        path = [e]
        for v, te in up_t:
            if v == lca:
                break
            path.append(te)
        down = []
        for v, se in up_s:
            if v == lca:
                break
            down.append(se)
        path += list(reversed(down))
        basis.append(_make_cycle(g, s, path))
    return basis


def all_cycles(g: FeynmanGraph) -> list[Cycle]:
    """Every simple cycle once, found by depth-first search from its least vertex."""
    order = {v: k for k, v in enumerate(g.vertices)}
    found: dict[frozenset, Cycle] = {}

    def dfs(start, cur, path_edges, visited):
        for e in g.incident(cur):
            if g.is_external(e) or e in path_edges:
                continue
            w = g.other_end(e, cur)
            if w == start:
                if len(path_edges) >= 1:
                    edges = path_edges + [e]
                    key = frozenset(edges)
                    if key not in found:
                        found[key] = _make_cycle(g, start, edges)
            elif w not in visited and order[w] > order[start]:
                visited.add(w)
                dfs(start, w, path_edges + [e], visited)
                visited.discard(w)

    for v in g.vertices:
        dfs(v, v, [], {v})
    return sorted(found.values(), key=lambda c: (len(c.edges), sorted(natural_key(e) for e in c.edges)))


def disjoint_cycle_tuples(g: FeynmanGraph, i: int) -> list[tuple[Cycle, ...]]:
    """All unordered ``i``-sets of pairwise vertex-disjoint simple cycles."""
    if i < 0:
        raise ValueError("ghost order must be non-negative")
    if i == 0:
        return [()]
    cycles = all_cycles(g)
    out: list[tuple[Cycle, ...]] = []

    def rec(start, chosen, used):
        if len(chosen) == i:
            out.append(tuple(chosen))
            return
        for k in range(start, len(cycles)):
            c = cycles[k]
            if used & c.vertex_set:
                continue
            rec(k + 1, chosen + [c], used | c.vertex_set)

    rec(0, [], frozenset())
    return out


# ---------------------------------------------------------------- spanning structures
class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True

    def copy(self):
        uf = _UnionFind(())
        uf.parent = dict(self.parent)
        return uf


def spanning_forests(vertices: Sequence[str], edges: Sequence[tuple[str, str, str]], components: int) -> list[frozenset[str]]:
    """Acyclic edge subsets of a multigraph leaving exactly ``components`` components."""
    need = len(vertices) - components
    if need < 0:
        return []
    out: list[frozenset[str]] = []

    def rec(k, chosen, uf):
        if len(chosen) == need:
            out.append(frozenset(chosen))
            return
        if len(edges) - k < need - len(chosen):
            return
        e, s, t = edges[k]
        if s != t and uf.find(s) != uf.find(t):
            uf2 = uf.copy()
            uf2.union(s, t)
            rec(k + 1, chosen + [e], uf2)
        rec(k + 1, chosen, uf)

    rec(0, [], _UnionFind(vertices))
    return out


def spanning_trees(g: FeynmanGraph) -> list[frozenset[str]]:
    _require_connected(g)
    return spanning_forests(g.vertices, g.internal_edges, 1)


@dataclass(frozen=True)
class TwoForest:
    edges: frozenset[str]
    part1: frozenset[str]
    part2: frozenset[str]


def _components(vertices, edges, chosen) -> list[frozenset[str]]:
    uf = _UnionFind(vertices)
    for e, s, t in edges:
        if e in chosen:
            uf.union(s, t)
    groups: dict[str, set[str]] = {}
    for v in vertices:
        groups.setdefault(uf.find(v), set()).add(v)
    return [frozenset(x) for x in groups.values()]


def spanning_2forests(g: FeynmanGraph) -> list[TwoForest]:
    """Spanning 2-forests; the part holding the least vertex id is ``part1``."""
    _require_connected(g)
    out = []
    for f in spanning_forests(g.vertices, g.internal_edges, 2):
        c1, c2 = _components(g.vertices, g.internal_edges, f)
        least = min(g.vertices, key=natural_key)
        if least in c2:
            c1, c2 = c2, c1
        out.append(TwoForest(f, c1, c2))
    return out


# ---------------------------------------------------------------- 2-factors
@dataclass(frozen=True)
class TwoFactor:
    """Edge set with factor-valence 2 at every vertex, external legs included.

    ``components`` lists ``("cycle", edges)`` and ``("path", edges)`` entries,
    paths running between two external legs.
    """

    edges: frozenset[str]
    components: tuple[tuple[str, tuple[str, ...]], ...]


def two_factors(g: FeynmanGraph) -> list[TwoFactor]:
    """All 2-factors, enumerated through their complementary perfect matchings.

    Every vertex misses exactly one incident edge; an internal edge can only
    be missed by both of its endpoints at once.
    """
    out = []
    verts = list(g.vertices)

    def rec(k, covered, matched):
        while k < len(verts) and verts[k] in covered:
            k += 1
        if k == len(verts):
            factor = frozenset(g.edge_ids) - frozenset(matched)
            out.append(TwoFactor(factor, _factor_components(g, factor)))
            return
        v = verts[k]
        for e in g.incident(v):
            if g.is_external(e):
                rec(k + 1, covered | {v}, matched + [e])
            else:
                w = g.other_end(e, v)
                if w in covered:
                    continue
                rec(k + 1, covered | {v, w}, matched + [e])

    rec(0, frozenset(), [])
    return sorted(out, key=lambda f: sorted(natural_key(e) for e in f.edges))


def _factor_components(g: FeynmanGraph, factor: frozenset[str]) -> tuple:
    remaining = set(factor)
    comps = []
    for x in g.external_ids:
        if x not in remaining:
            continue
        path = [x]
        remaining.discard(x)
        v = g.endpoints(x)[0]
        while True:
            nxt = [e for e in g.incident(v) if e in remaining]
            if not nxt:
                break
            e = nxt[0]
            remaining.discard(e)
            path.append(e)
            if g.is_external(e):
                break
            v = g.other_end(e, v)
        comps.append(("path", tuple(path)))
    while remaining:
        e0 = min(remaining, key=natural_key)
        remaining.discard(e0)
        cyc = [e0]
        start = g.endpoints(e0)[0]
        v = g.other_end(e0, start)
        while v != start:
            e = next(e for e in g.incident(v) if e in remaining)
            remaining.discard(e)
            cyc.append(e)
            v = g.other_end(e, v)
        comps.append(("cycle", tuple(cyc)))
    return tuple(comps)


# ---------------------------------------------------------------- automorphisms
Labeling = Mapping[str, str]


@dataclass(frozen=True)
class Automorphism:
    vertex_map: tuple[tuple[str, str], ...]
    edge_map: tuple[tuple[str, str], ...]

    def edge(self, e: str) -> str:
        return dict(self.edge_map)[e]


def automorphisms(g: FeynmanGraph) -> list[Automorphism]:
    """Automorphisms fixing every external leg, as vertex and edge bijections.

    Typed backtracking over vertices; parallel edges contribute all their
    permutations.  Edge orientation is ignored.
    """
    if "aut" in g._cache:
        return g._cache["aut"]
    verts = list(g.vertices)
    fixed = {v for _, v in g.external_edges}
    mult: Counter = Counter()
    between: dict[frozenset, list[str]] = {}
    for e, s, t in g.internal_edges:
        key = frozenset((s, t))
        mult[key] += 1
        between.setdefault(key, []).append(e)
    ext_at: dict[str, list[str]] = {}
    for e, v in g.external_edges:
        ext_at.setdefault(v, []).append(e)
    deg = {v: len(g.incident(v)) for v in verts}

    maps: list[dict[str, str]] = []

    def rec(k, pi, used):
        if k == len(verts):
            maps.append(dict(pi))
            return
        v = verts[k]
        cands = [v] if v in fixed else [w for w in verts if w not in used and w not in fixed]
        for w in cands:
            if w in used or deg[w] != deg[v]:
                continue
            ok = True
            for u, pu in pi.items():
                if mult[frozenset((u, v))] != mult[frozenset((pu, w))]:
                    ok = False
                    break
            if ok and mult[frozenset((v,))] != mult[frozenset((w,))]:
                ok = False
            if ok:
                pi[v] = w
                used.add(w)
                rec(k + 1, pi, used)
                del pi[v]
                used.discard(w)

    rec(0, {}, set())

    out = []
    for pi in maps:
        classes = []
        for key, es in between.items():
            img = frozenset(pi[x] for x in key)
            classes.append((es, between[img]))
        for choice in itertools.product(*[itertools.permutations(dst) for _, dst in classes]):
            emap = {e: e for e in g.external_ids}
            for (src, _), perm in zip(classes, choice):
                emap.update(zip(src, perm))
            out.append(
                Automorphism(
                    tuple(sorted(pi.items(), key=lambda kv: natural_key(kv[0]))),
                    tuple(sorted(emap.items(), key=lambda kv: natural_key(kv[0]))),
                )
            )
    g._cache["aut"] = out
    return out


def _relabel(lab: Labeling, aut: Automorphism) -> tuple:
    em = dict(aut.edge_map)
    image = {em[e]: l for e, l in lab.items()}
    return tuple(sorted(image.items(), key=lambda kv: natural_key(kv[0])))


def _freeze(lab: Labeling) -> tuple:
    return tuple(sorted(lab.items(), key=lambda kv: natural_key(kv[0])))


def symmetry_factor(g: FeynmanGraph, labels: Labeling | None = None) -> int:
    auts = automorphisms(g)
    if not labels:
        return len(auts)
    key = _freeze(labels)
    return sum(1 for a in auts if _relabel(labels, a) == key)


def symmetry_and_iso(g: FeynmanGraph, family: Sequence[Labeling]) -> tuple[int, list[tuple[int, int]]]:
    """``sym(g)`` and, per family member, ``(sym, iso)``.

    ``iso`` counts family members in the orbit of the member under the
    automorphisms of ``g``; labels are compared as plain (unoriented) tags.
    """
    auts = automorphisms(g)
    frozen = [_freeze(l) for l in family]
    counts = Counter(frozen)
    result = []
    for lab, key in zip(family, frozen):
        orbit = {_relabel(lab, a) for a in auts}
        sym = sum(1 for a in auts if _relabel(lab, a) == key)
        iso = sum(counts[o] for o in orbit)
        result.append((sym, iso))
    return len(auts), result


# ---------------------------------------------------------------- random graphs
def random_graph(rng: random.Random, n_vertices: int, n_internal: int, max_tries: int = 500) -> FeynmanGraph | None:
    """A random connected cubic graph with legs, no self-loops, multi-edges allowed."""
    n_ext = 3 * n_vertices - 2 * n_internal
    if n_ext < 0:
        return None
    verts = [f"v{k + 1}" for k in range(n_vertices)]
    for _ in range(max_tries):
        stubs = [v for v in verts for _ in range(3)]
        rng.shuffle(stubs)
        ext_stubs, int_stubs = stubs[:n_ext], stubs[n_ext:]
        pairs = [(int_stubs[2 * k], int_stubs[2 * k + 1]) for k in range(n_internal)]
        if any(a == b for a, b in pairs):
            continue
        internal = tuple((str(k + 1), a, b) for k, (a, b) in enumerate(pairs))
        external = tuple((str(n_internal + k + 1), v) for k, v in enumerate(ext_stubs))
        rot = {v: [] for v in verts}
        for e, a, b in internal:
            rot[a].append(e)
            rot[b].append(e)
        for e, v in external:
            rot[v].append(e)
        for v in verts:
            rng.shuffle(rot[v])
        g = FeynmanGraph(tuple(verts), internal, external, tuple((v, tuple(rot[v])) for v in verts))
        if g.is_connected() and not validate(g):
            return g
    return None
