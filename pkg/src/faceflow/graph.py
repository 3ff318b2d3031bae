"""Metric graph substrate.

Undirected graphs with exact rational edge lengths, shortest paths,
biconnectivity, outerplanar structure (ear builds), the slack transform,
and the cycle/flatten primitives used by the tree embedding.

All lengths are ``fractions.Fraction``; infinity is represented by
``math.inf`` in distance matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import networkx as nx

from .errors import (
    ChordTooLong,
    FaceInvalid,
    NotBiconnected,
    NotOuterplanar,
)

Frac = Fraction

INF = math.inf


def frac(x) -> Fraction:
    """Coerce ints, strings, pairs, and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, tuple):
        return Fraction(x[0], x[1])
    return Fraction(x)


def norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class MetricGraph:
    """Undirected graph with nonnegative rational edge lengths.

    No loops, no parallel edges.  Zero-length edges are permitted.
    """

    n: int
    edges: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        seen = set()
        norm = []
        for (u, v, w) in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range")
            e = norm_edge(u, v)
            if e in seen:
                raise ValueError(f"parallel edge {e}")
            seen.add(e)
            w = frac(w)
            if w < 0:
                raise ValueError(f"negative length on edge {e}")
            norm.append((e[0], e[1], w))
        object.__setattr__(self, "edges", tuple(norm))

    @staticmethod
    def from_lists(n: int, edges: Iterable[Sequence]) -> "MetricGraph":
        return MetricGraph(n, tuple((u, v, frac(w)) for (u, v, w) in edges))

    # -- basic views ----------------------------------------------------

    def adjacency(self) -> dict[int, list[tuple[int, Fraction]]]:
        adj: dict[int, list[tuple[int, Fraction]]] = {v: [] for v in range(self.n)}
        for (u, v, w) in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def edge_lengths(self) -> dict[tuple[int, int], Fraction]:
        return {norm_edge(u, v): w for (u, v, w) in self.edges}

    def neighbors(self, v: int) -> list[int]:
        return [x for (x, _) in self.adjacency()[v]]

    def incident_edges(self, v: int) -> list[tuple[int, int]]:
        return [norm_edge(u, x) for (u, x, _) in self.edges if v in (u, x)]

    def to_nx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        for (u, v, w) in self.edges:
            g.add_edge(u, v, weight=w)
        return g

    def with_edges(self, edges) -> "MetricGraph":
        return MetricGraph(self.n, tuple(edges))

    def scaled(self, factor: Fraction) -> "MetricGraph":
        factor = frac(factor)
        return MetricGraph(
            self.n, tuple((u, v, w * factor) for (u, v, w) in self.edges)
        )


# -- shortest paths -----------------------------------------------------


def dijkstra(adj, source, allowed: Optional[set] = None) -> dict[int, Fraction]:
    """Exact-rational Dijkstra.  Returns finite distances only."""
    import heapq

    dist = {source: Fraction(0)}
    heap = [(Fraction(0), source)]
    done = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for (u, w) in adj[v]:
            if allowed is not None and u not in allowed:
                continue
            nd = d + w
            if u not in dist or nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def all_pairs_distances(g: MetricGraph) -> list[list]:
    """Shortest-path distance matrix; math.inf across components."""
    adj = g.adjacency()
    mat = []
    for s in range(g.n):
        dist = dijkstra(adj, s)
        mat.append([dist.get(t, INF) for t in range(g.n)])
    return mat


def reduce_lengths(g: MetricGraph) -> MetricGraph:
    """Replace every edge length by the shortest-path distance between its
    endpoints.  Idempotent; does not change the metric."""
    d = all_pairs_distances(g)
    return g.with_edges((u, v, d[u][v]) for (u, v, _) in g.edges)


def is_reduced(g: MetricGraph) -> bool:
    d = all_pairs_distances(g)
    return all(w == d[u][v] for (u, v, w) in g.edges)


def diameter(g: MetricGraph) -> Fraction:
    """Largest finite pairwise distance."""
    d = all_pairs_distances(g)
    best = Fraction(0)
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if d[i][j] is not INF and d[i][j] > best:
                best = d[i][j]
    return best


def connected_components(g: MetricGraph) -> list[set[int]]:
    adj = g.adjacency()
    seen: set[int] = set()
    comps = []
    for s in range(g.n):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for (u, _) in adj[v]:
                if u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        comps.append(comp)
    return comps


# -- biconnectivity -----------------------------------------------------


def biconnected_components(g: MetricGraph) -> tuple[list[set[int]], set[int]]:
    """Blocks (as vertex sets) and cut vertices of g.

    Isolated vertices form singleton blocks.
    """
    gx = g.to_nx()
    blocks = [set(b) for b in nx.biconnected_components(gx)]
    cuts = set(nx.articulation_points(gx))
    covered = set().union(*blocks) if blocks else set()
    for v in range(g.n):
        if v not in covered:
            blocks.append({v})
    return blocks, cuts


def is_biconnected(g: MetricGraph) -> bool:
    if g.n < 3:
        return g.n == 2 and len(g.edges) == 1
    gx = g.to_nx()
    return nx.is_connected(gx) and not list(nx.articulation_points(gx))


def induced_subgraph(g: MetricGraph, verts: set[int]) -> tuple[MetricGraph, dict[int, int]]:
    """Induced subgraph with vertices relabelled 0..k-1.

    Returns (subgraph, old_id -> new_id)."""
    order = sorted(verts)
    idx = {v: i for i, v in enumerate(order)}
    edges = [
        (idx[u], idx[v], w) for (u, v, w) in g.edges if u in verts and v in verts
    ]
    return MetricGraph(len(order), tuple(edges)), idx


# -- planarity / outerplanarity ----------------------------------------


def is_planar(g: MetricGraph) -> bool:
    ok, _ = nx.check_planarity(g.to_nx())
    return ok


def is_outerplanar(g: MetricGraph) -> bool:
    """A graph is outerplanar iff adding an apex adjacent to every vertex
    keeps it planar."""
    gx = g.to_nx()
    apex = g.n
    gx.add_node(apex)
    for v in range(g.n):
        gx.add_edge(apex, v)
    ok, _ = nx.check_planarity(gx)
    return ok


def find_outer_cycle(g: MetricGraph) -> list[int]:
    """Hamiltonian cycle of a biconnected outerplanar graph (its unique
    outer face).  Backtracking search; desk-scale inputs only."""
    if not is_biconnected(g):
        raise NotBiconnected("outer cycle defined for biconnected graphs")
    n = g.n
    if n == 2:
        raise NotOuterplanar("no outer cycle on a single edge")
    adj = {v: sorted(u for (u, _) in nbrs) for v, nbrs in g.adjacency().items()}
    path = [0]
    used = {0}

    def bt() -> bool:
        if len(path) == n:
            return 0 in adj[path[-1]]
        v = path[-1]
        for u in adj[v]:
            if u not in used:
                used.add(u)
                path.append(u)
                if bt():
                    return True
                path.pop()
                used.remove(u)
        return False

    if not bt():
        raise NotOuterplanar("no Hamiltonian cycle: graph is not biconnected outerplanar")
    return list(path)


# -- instances ----------------------------------------------------------


@dataclass(frozen=True)
class PlanarInstance:
    """A planar metric graph with a distinguished face.

    ``face`` is the cyclic vertex order of the face; ``rotation``
    optionally gives a cyclic neighbor order per vertex.
    """

    graph: MetricGraph
    face: tuple[int, ...]
    rotation: Optional[dict[int, tuple[int, ...]]] = None

    def validate(self) -> list[str]:
        """Return a list of human-readable invariant violations (empty if
        the instance is well-formed)."""
        problems = []
        g = self.graph
        if len(set(self.face)) != len(self.face):
            problems.append("face repeats a vertex")
        if any(not (0 <= v < g.n) for v in self.face):
            problems.append("face vertex out of range")
            return problems
        lengths = g.edge_lengths()
        k = len(self.face)
        if k >= 2:
            for i in range(k):
                u, v = self.face[i], self.face[(i + 1) % k]
                if k == 2 and i == 1:
                    break
                if norm_edge(u, v) not in lengths:
                    problems.append(f"face edge ({u},{v}) missing from graph")
        if not is_planar(g):
            problems.append("graph is not planar")
        else:
            # The face cycle bounds a face of some embedding iff an apex
            # joined to all face vertices keeps the graph planar.
            gx = g.to_nx()
            apex = g.n
            gx.add_node(apex)
            for v in self.face:
                gx.add_edge(apex, v)
            ok, _ = nx.check_planarity(gx)
            if not ok:
                problems.append("face cycle does not bound a face of any embedding")
        if not is_reduced(g):
            problems.append("edge lengths are not reduced")
        if self.rotation is not None:
            adj = g.adjacency()
            for v, order in self.rotation.items():
                if sorted(order) != sorted(u for (u, _) in adj[v]):
                    problems.append(f"rotation at {v} is not a permutation of its neighbors")
        return problems


# -- cycles and flattening ---------------------------------------------


@dataclass(frozen=True)
class Cycle:
    """A continuous cycle with labelled points.

    ``points`` maps vertex id to a position in [0, circumference)."""

    circumference: Fraction
    points: dict[int, Fraction]

    def dist_pos(self, a: Fraction, b: Fraction) -> Fraction:
        d = abs(a - b)
        return min(d, self.circumference - d)

    def dist(self, x: int, y: int) -> Fraction:
        return self.dist_pos(self.points[x], self.points[y])


def make_cycle(
    path_vertices: Sequence[int],
    path_lengths: Sequence[Fraction],
    chord_len: Fraction,
) -> Cycle:
    """Close a metric path into a cycle with an extra chord of the given
    length between its endpoints."""
    chord_len = frac(chord_len)
    total = sum((frac(w) for w in path_lengths), Fraction(0))
    if chord_len > total:
        raise ChordTooLong(f"chord {chord_len} exceeds path length {total}")
    circumference = total + chord_len
    if circumference == 0:
        raise ValueError("degenerate cycle of circumference zero")
    points: dict[int, Fraction] = {}
    pos = Fraction(0)
    for i, v in enumerate(path_vertices):
        points[v] = pos % circumference
        if i < len(path_lengths):
            pos += frac(path_lengths[i])
    return Cycle(circumference, points)


@dataclass(frozen=True)
class FlatPath:
    """The unrolling of a cycle from a basepoint: every cycle point x sits
    at position d_C(p, x) on a path of length circumference/2."""

    length: Fraction
    positions: dict[int, Fraction]

    def dist(self, x: int, y: int) -> Fraction:
        return abs(self.positions[x] - self.positions[y])


def flatten(c: Cycle, p: Fraction) -> FlatPath:
    p = frac(p)
    return FlatPath(
        length=c.circumference / 2,
        positions={v: c.dist_pos(p, pos) for v, pos in c.points.items()},
    )


# -- outerplanar builds -------------------------------------------------


@dataclass(frozen=True)
class BuildStep:
    """One path attachment.  ``attach_edge`` set means an ear: the path's
    endpoints coincide with the endpoints of an existing edge.  ``None``
    means the path is attached by vertex identity only (block joins)."""

    path_vertices: tuple[int, ...]
    path_lengths: tuple[Fraction, ...]
    attach_edge: Optional[tuple[int, int]]

    @property
    def length(self) -> Fraction:
        return sum(self.path_lengths, Fraction(0))


@dataclass(frozen=True)
class OuterplanarBuild:
    initial_vertices: tuple[int, ...]
    initial_lengths: tuple[Fraction, ...]
    steps: tuple[BuildStep, ...]

    def replay(self, n: int) -> MetricGraph:
        """Reconstruct the graph the build describes."""
        edges: dict[tuple[int, int], Fraction] = {}

        def add_path(vs, ws):
            for i in range(len(ws)):
                edges[norm_edge(vs[i], vs[i + 1])] = frac(ws[i])

        add_path(self.initial_vertices, self.initial_lengths)
        for step in self.steps:
            if step.attach_edge is not None:
                e = norm_edge(*step.attach_edge)
                if e not in edges:
                    raise ValueError(f"ear attached to missing edge {e}")
                if {step.path_vertices[0], step.path_vertices[-1]} != set(e):
                    raise ValueError("ear endpoints do not match its attach edge")
            add_path(step.path_vertices, step.path_lengths)
        return MetricGraph(n, tuple((u, v, w) for (u, v), w in edges.items()))


def _chord_children(chords: list[tuple[int, int]], lo: int, hi: int):
    """Top-level chords strictly inside the interval (lo, hi), given
    non-crossing chords as index pairs (i, j), i < j."""
    inside = [c for c in chords if lo <= c[0] and c[1] <= hi and c != (lo, hi)]
    top = []
    for c in inside:
        if not any(d[0] <= c[0] and c[1] <= d[1] and d != c for d in inside):
            top.append(c)
    return sorted(top)


def _block_ears(
    order: list[int],
    lengths: dict[tuple[int, int], Fraction],
    chords: list[tuple[int, int]],
    lo: int,
    hi: int,
    out: list[BuildStep],
    attach: tuple[int, int],
):
    """Emit the ear for interval (lo, hi) of the outer cycle (with child
    chords as shortcuts), then recurse into each child chord."""
    children = _chord_children(chords, lo, hi)
    starts = {c[0]: c for c in children}
    vs = [order[lo]]
    ws = []
    pos = lo
    while pos < hi:
        if pos in starts and starts[pos][1] <= hi:
            (_, q) = starts[pos]
            ws.append(lengths[norm_edge(order[pos], order[q])])
            pos = q
        else:
            ws.append(lengths[norm_edge(order[pos], order[pos + 1])])
            pos += 1
        vs.append(order[pos])
    out.append(BuildStep(tuple(vs), tuple(ws), attach))
    for (i, j) in children:
        _block_ears(order, lengths, chords, i, j, out,
                    (order[i], order[j]))


def _closing_edge_index(order: list[int], lengths, prefer_short=True) -> int:
    """Index i of the cycle edge (order[i], order[i+1 mod n]) chosen to
    close the cycle; shortest edge, lowest index on ties."""
    n = len(order)
    best, best_w = 0, None
    for i in range(n):
        w = lengths[norm_edge(order[i], order[(i + 1) % n])]
        if best_w is None or w < best_w:
            best, best_w = i, w
    return best


def ear_decomposition(
    g: MetricGraph, outer_face: Optional[Sequence[int]] = None
) -> OuterplanarBuild:
    """Ear build of a biconnected outerplanar graph (or a bare path).

    The initial path is the shortest outer-cycle edge; the first ear is
    the rest of the outer cycle with top-level chords as shortcuts, and
    deeper ears follow the chord nesting.
    """
    lengths = g.edge_lengths()
    m = len(g.edges)
    # Bare path: initial path only, zero steps.
    deg = {v: 0 for v in range(g.n)}
    for (u, v, _) in g.edges:
        deg[u] += 1
        deg[v] += 1
    present = [v for v in range(g.n) if deg[v] > 0]
    if m == len(present) - 1 and all(deg[v] <= 2 for v in present):
        adj = g.adjacency()
        ends = [v for v in present if deg[v] == 1]
        if len(ends) == 2 and len(connected_components(g)) == g.n - len(present) + 1:
            vs = [min(ends)]
            ws = []
            prev = None
            while len(vs) <= m:
                for (u, w) in adj[vs[-1]]:
                    if u != prev:
                        prev = vs[-1]
                        vs.append(u)
                        ws.append(w)
                        break
            return OuterplanarBuild(tuple(vs), tuple(ws), ())
    if not is_biconnected(g):
        raise NotBiconnected("ear decomposition needs a biconnected graph or a path")
    if not is_outerplanar(g):
        raise NotOuterplanar("graph is not outerplanar")
    if outer_face is None:
        outer_face = find_outer_cycle(g)
    order = list(outer_face)
    n = len(order)
    if n != g.n or set(order) != set(range(g.n)):
        raise FaceInvalid("outer face must visit every vertex exactly once")
    idx = {v: i for i, v in enumerate(order)}
    cycle_edges = {norm_edge(order[i], order[(i + 1) % n]) for i in range(n)}
    for e in cycle_edges:
        if e not in lengths:
            raise FaceInvalid(f"outer face edge {e} missing from graph")
    chord_pairs = []
    for (u, v, _) in g.edges:
        e = norm_edge(u, v)
        if e in cycle_edges:
            continue
        i, j = sorted((idx[u], idx[v]))
        chord_pairs.append((i, j))
    for a in chord_pairs:
        for b in chord_pairs:
            if a < b and a[0] < b[0] < a[1] < b[1]:
                raise NotOuterplanar(
                    f"chords {a} and {b} cross on the given outer face"
                )
    k = _closing_edge_index(order, lengths)
    rotated = [order[(k + 1 + i) % n] for i in range(n)]
    idx2 = {v: i for i, v in enumerate(rotated)}
    chords2 = []
    for (i, j) in chord_pairs:
        a, b = sorted((idx2[order[i]], idx2[order[j]]))
        chords2.append((a, b))
    e_star = norm_edge(rotated[0], rotated[-1])
    steps: list[BuildStep] = []
    _block_ears(rotated, lengths, chords2, 0, n - 1, steps,
                (rotated[0], rotated[-1]))
    return OuterplanarBuild(
        (rotated[-1], rotated[0]), (lengths[e_star],), tuple(steps)
    )


def general_build(g: MetricGraph) -> OuterplanarBuild:
    """Build for an arbitrary connected outerplanar graph: per-block ear
    builds joined through cut vertices (joins carry no attach edge)."""
    if not is_outerplanar(g):
        raise NotOuterplanar("graph is not outerplanar")
    blocks, _ = biconnected_components(g)
    blocks = [b for b in blocks if len(b) >= 2]
    if not blocks:
        return OuterplanarBuild((0,) if g.n else (), (), ())
    lengths = g.edge_lengths()
    # Order blocks by a BFS over the block-cut structure, rooted at the
    # block containing the lowest vertex.
    blocks.sort(key=min)
    ordered = [blocks[0]]
    rest = blocks[1:]
    covered = set(blocks[0])
    while rest:
        for i, b in enumerate(rest):
            if b & covered:
                ordered.append(b)
                covered |= b
                del rest[i]
                break
        else:
            raise ValueError("graph is disconnected")
    first = True
    init_vs: tuple[int, ...] = ()
    init_ws: tuple[Fraction, ...] = ()
    steps: list[BuildStep] = []
    for b in ordered:
        sub, idx = induced_subgraph(g, b)
        back = {i: v for v, i in idx.items()}
        bd = ear_decomposition(sub)
        vs = tuple(back[i] for i in bd.initial_vertices)
        if first:
            init_vs, init_ws = vs, bd.initial_lengths
            first = False
        else:
            steps.append(BuildStep(vs, bd.initial_lengths, None))
        for st in bd.steps:
            pv = tuple(back[i] for i in st.path_vertices)
            ae = None
            if st.attach_edge is not None:
                ae = (back[st.attach_edge[0]], back[st.attach_edge[1]])
            steps.append(BuildStep(pv, st.path_lengths, ae))
    return OuterplanarBuild(init_vs, init_ws, tuple(steps))


# -- slack transform ----------------------------------------------------


def _block_slack_violations(
    sub: MetricGraph, alpha: Fraction
) -> list[tuple[int, int]]:
    """Edges of a biconnected outerplanar block (local ids) whose ear is
    too short for an alpha-slack structure."""
    build = ear_decomposition(sub)
    lengths = sub.edge_lengths()
    bad = []
    for st in build.steps:
        e = norm_edge(*st.attach_edge)
        if st.length < alpha * lengths[e]:
            bad.append(e)
    return bad


def slack_transform(
    g: MetricGraph, alpha: Fraction
) -> tuple[MetricGraph, OuterplanarBuild]:
    """Delete edges whose ears are too short until every block has an
    alpha-slack ear build, then scale all lengths down by alpha.

    The output satisfies E(h) subset of E(g), d_g >= d_h >= d_g/alpha,
    h reduced, and every ear in the build is at least alpha times the
    length of its attach edge.
    """
    alpha = frac(alpha)
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if not is_outerplanar(g):
        raise NotOuterplanar("slack transform needs an outerplanar graph")
    current = reduce_lengths(g)
    while True:
        doomed: set[tuple[int, int]] = set()
        blocks, _ = biconnected_components(current)
        for b in blocks:
            if len(b) < 3:
                continue
            sub, idx = induced_subgraph(current, b)
            back = {i: v for v, i in idx.items()}
            for (u, v) in _block_slack_violations(sub, alpha):
                doomed.add(norm_edge(back[u], back[v]))
        if not doomed:
            break
        current = current.with_edges(
            (u, v, w) for (u, v, w) in current.edges if norm_edge(u, v) not in doomed
        )
        current = reduce_lengths(current)
    h = current.scaled(Fraction(1) / alpha)
    return h, general_build(h)


# -- glue lives in tree.py (re-exported in the package __init__) --------
