"""Connected random retractions onto a vertex subset, and the planar
specialization that retracts a graph onto a face to produce a random
outerplanar graph on the face vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .config import DEFAULT_CONFIG, PipelineConfig
from .errors import EmptyTarget, FaceInvalid, InvariantViolation
from .graph import (
    MetricGraph,
    PlanarInstance,
    all_pairs_distances,
    connected_components,
    diameter,
    frac,
    is_outerplanar,
    norm_edge,
)
from .partition import sample_padded_partition


@dataclass(frozen=True)
class Retraction:
    """F: V -> S with S fixed pointwise and connected fibers.

    ``levels`` gives the scale at which each vertex was absorbed;
    ``scale`` is the prescaling factor applied so the target is at
    distance > 1 from its complement (level bounds are stated in the
    scaled metric).
    """

    target: frozenset[int]
    mapping: dict[int, int]
    levels: dict[int, int]
    scale: Fraction

    def check(self, g: MetricGraph, dmat=None) -> None:
        """Assert the three structural invariants; raises on failure."""
        if dmat is None:
            dmat = all_pairs_distances(g)
        for x in self.target:
            if self.mapping[x] != x:
                raise InvariantViolation(f"target vertex {x} not fixed")
        # Connected fibers.
        adj = g.adjacency()
        fibers: dict[int, set[int]] = {}
        for v, img in self.mapping.items():
            fibers.setdefault(img, set()).add(v)
        for img, fib in fibers.items():
            seen = {img}
            stack = [img]
            while stack:
                v = stack.pop()
                for (u, _) in adj[v]:
                    if u in fib and u not in seen:
                        seen.add(u)
                        stack.append(u)
            if seen != fib:
                raise InvariantViolation(f"fiber of {img} disconnected")
        # Distance/level bound in the scaled metric.
        for x, img in self.mapping.items():
            d_scaled = dmat[x][img] * self.scale
            if d_scaled >= Fraction(2) ** (self.levels[x] + 1):
                raise InvariantViolation(
                    f"vertex {x}: d(x,F(x)) = {d_scaled} >= 2^{self.levels[x] + 1}"
                )
            d_to_s = min(dmat[x][s] for s in self.target)
            if d_to_s > dmat[x][img]:
                raise InvariantViolation(f"vertex {x}: F(x) not closest-consistent")


def sample_retraction(
    g: MetricGraph,
    s,
    seed: int,
    config: PipelineConfig = DEFAULT_CONFIG,
) -> Retraction:
    """Level-by-level absorption into S.

    V_0 = S.  At scale 2^k a fresh padded partition is drawn; a vertex
    joins when the connected part of its block reaches the already
    absorbed set, and each newly absorbed connected chunk inherits the
    image of one neighboring absorbed vertex (lowest id).
    """
    s = frozenset(s)
    if not s:
        raise EmptyTarget("retraction target is empty")
    for comp in connected_components(g):
        if not comp & s:
            raise EmptyTarget(f"component {sorted(comp)[:5]}... contains no target vertex")

    # Prescale so d(S, V \ S) > 1 (zero-distance complements keep scale 1).
    dmat = all_pairs_distances(g)
    gaps = [
        min(dmat[x][t] for t in s) for x in range(g.n) if x not in s
    ]
    gaps = [d for d in gaps if d > 0]
    scale = Fraction(2) / min(gaps) if gaps else Fraction(1)
    gs = g.scaled(scale)

    diam = diameter(gs)
    k0 = 1
    while Fraction(2) ** k0 < diam:
        k0 += 1

    adj = g.adjacency()
    mapping = {x: x for x in s}
    levels = {x: 0 for x in s}
    absorbed = set(s)
    for k in range(1, k0 + 1):
        if k == k0:
            blocks = [set(c) for c in connected_components(g)]
        else:
            part = sample_padded_partition(
                gs, Fraction(2) ** k, seed * 7_919 + k, config
            )
            blocks = [set(b) for b in part.blocks]
        newly: list[set[int]] = []
        for t_block in blocks:
            # Connected components of G[T]; those touching the absorbed
            # set absorb their unabsorbed vertices chunk by chunk.
            comps = _components_within(adj, t_block)
            for comp in comps:
                if not comp & absorbed:
                    continue
                fresh = comp - absorbed
                for chunk in _components_within(adj, fresh):
                    nbrs = set()
                    for v in chunk:
                        for (u, _) in adj[v]:
                            if u in comp and u in absorbed:
                                nbrs.add(u)
                    if not nbrs:
                        continue  # reached only through other fresh chunks
                    v_c = min(nbrs)
                    newly.append(chunk)
                    for v in chunk:
                        mapping[v] = mapping[v_c]
                        levels[v] = k
        for chunk in newly:
            absorbed |= chunk
        if len(absorbed) == g.n:
            break
    # Chunks reachable only through sibling chunks may need extra passes
    # at the same top scale.
    guard = 0
    while len(absorbed) < g.n:
        guard += 1
        if guard > g.n:
            raise InvariantViolation("retraction failed to absorb all vertices")
        for v in sorted(set(range(g.n)) - absorbed):
            nbrs = [u for (u, _) in adj[v] if u in absorbed]
            if nbrs:
                v_c = min(nbrs)
                mapping[v] = mapping[v_c]
                levels[v] = k0
                absorbed.add(v)
    return Retraction(s, mapping, levels, scale)


def _components_within(adj, verts: set[int]) -> list[set[int]]:
    out = []
    seen: set[int] = set()
    for start in sorted(verts):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for (u, _) in adj[v]:
                if u in verts and u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        out.append(comp)
    return out


def gradient_stat(
    g: MetricGraph,
    retraction_sampler,
    x: int,
    tau,
    samples: int,
    seed: int,
) -> float:
    """Mean over samples of the single-scale gradient at x: the worst
    stretch d(F(x),F(v))/len(x,v) among incident edges with length in
    [tau, 2 tau]; zero when no such edge exists."""
    tau = frac(tau)
    dmat = all_pairs_distances(g)
    relevant = []
    for (u, v, w) in g.edges:
        if x not in (u, v):
            continue
        if tau <= w <= 2 * tau:
            relevant.append((v if u == x else u, w))
    if not relevant:
        return 0.0
    total = 0.0
    for i in range(samples):
        retr = retraction_sampler(seed * 104_729 + i)
        fx = retr.mapping[x]
        total += max(float(dmat[fx][retr.mapping[v]] / w) for (v, w) in relevant)
    return total / samples


@dataclass(frozen=True)
class FaceRetraction:
    """Outerplanar quotient of a planar instance along a retraction onto
    its distinguished face."""

    h: MetricGraph                  # on vertices 0..k-1
    face_ids: tuple[int, ...]       # h vertex i corresponds to this g vertex
    mapping: dict[int, int]         # g vertex -> h vertex
    retraction: Retraction


def retract_to_outerplanar(
    inst: PlanarInstance,
    seed: int,
    config: PipelineConfig = DEFAULT_CONFIG,
    check: bool = True,
) -> FaceRetraction:
    """Retract onto the distinguished face and contract fibers; each
    surviving edge gets length d_g between its fiber representatives."""
    problems = inst.validate()
    if problems:
        raise FaceInvalid("; ".join(problems))
    g = inst.graph
    face = tuple(inst.face)
    retr = sample_retraction(g, set(face), seed, config)
    dmat = all_pairs_distances(g)
    idx = {v: i for i, v in enumerate(face)}
    edges: dict[tuple[int, int], Fraction] = {}
    for (u, v, _) in g.edges:
        a, b = retr.mapping[u], retr.mapping[v]
        if a == b:
            continue
        edges[norm_edge(idx[a], idx[b])] = dmat[a][b]
    h = MetricGraph(len(face), tuple((u, v, w) for (u, v), w in edges.items()))
    mapping = {v: idx[retr.mapping[v]] for v in range(g.n)}
    if check:
        retr.check(g, dmat)
        if not is_outerplanar(h):
            raise InvariantViolation("retracted graph is not outerplanar")
        dh = all_pairs_distances(h)
        for i, u in enumerate(face):
            for j, v in enumerate(face):
                if i < j and dh[i][j] < dmat[u][v]:
                    raise InvariantViolation(
                        f"face pair ({u},{v}) got closer after retraction"
                    )
    return FaceRetraction(h, face, mapping, retr)
