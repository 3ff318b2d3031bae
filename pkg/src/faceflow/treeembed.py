"""Random star-shaped embeddings of outerplanar graphs into trees.

The construction follows the ear build of a 160-slack graph: each ear is
closed into a cycle with a chord equal to the current tree distance of
its attach edge, two anchor points are chosen on the cycle, and the
flattened cycle is glued onto the tree along one of the two anchors with
probability 1/2 each.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .config import DEFAULT_CONFIG, PipelineConfig
from .errors import (
    ChordTooLong,
    InvariantViolation,
    NotOuterplanar,
    SlackViolation,
)
from .graph import (
    Cycle,
    MetricGraph,
    all_pairs_distances,
    biconnected_components,
    connected_components,
    ear_decomposition,
    flatten,
    frac,
    induced_subgraph,
    is_outerplanar,
    make_cycle,
    norm_edge,
    reduce_lengths,
    slack_transform,
)
from .tree import MetricTree, TreeMap, glue

_ETA_TRIES = 512


def anchor_points(
    c: Cycle,
    u: int,
    v: int,
    forbidden,
    good_end: int,
    rng: random.Random,
    config: PipelineConfig = DEFAULT_CONFIG,
    path_pos=None,
    extra_check=None,
) -> tuple[Fraction, Fraction]:
    """Pick two anchor positions on the cycle, (1/6, 1/16)-apart with
    respect to {u, v}, measured from the endpoint that is not the good
    one.  Distances from each anchor to all forbidden positions are
    pairwise distinct (zero-distance pairs exempt); ``extra_check`` can
    reject a candidate pair to force a resample.
    """
    circ = c.circumference
    chord = c.dist(u, v)
    path_len = circ - chord
    if path_len <= 0:
        raise ChordTooLong("degenerate cycle: chord covers the whole circumference")
    delta = chord / path_len
    if delta > config.anchor_delta_max:
        raise ChordTooLong(f"chord ratio {delta} exceeds {config.anchor_delta_max}")
    alpha, beta = config.anchor_alpha, config.anchor_beta
    base = u if good_end == v else v
    if path_pos is None:
        path_pos = c.points
    # Anchors sit on the path arc, measured from the non-good endpoint.
    sign = 1 if path_pos[base] == 0 else -1
    forb = sorted(set(frac(x) for x in forbidden))

    def distances_distinct(anchor: Fraction) -> bool:
        seen: dict[Fraction, Fraction] = {}
        for s in forb:
            d = c.dist_pos(anchor, s)
            if d in seen and c.dist_pos(seen[d], s) != 0:
                return False
            seen.setdefault(d, s)
        return True

    n_grid = config.anchor_grid
    for _ in range(_ETA_TRIES):
        eta = delta + (alpha - delta) * Fraction(rng.randrange(n_grid) + 1, n_grid + 1)
        p_off = (Fraction(1, 4) + 3 * alpha / 2 - eta) * circ
        q_off = (Fraction(1, 2) - eta - beta) * circ
        p_pos = (c.points[base] + sign * p_off) % circ
        q_pos = (c.points[base] + sign * q_off) % circ
        if not (distances_distinct(p_pos) and distances_distinct(q_pos)):
            continue
        if extra_check is not None and not extra_check(p_pos, q_pos):
            continue
        _assert_anchor_conditions(
            c, u, v, base, p_pos, q_pos, path_pos, path_len, config
        )
        return p_pos, q_pos
    raise InvariantViolation("anchor sampling failed to avoid the forbidden set")


def _assert_anchor_conditions(c, u, v, base, p_pos, q_pos, path_pos, path_len, config):
    circ = c.circumference
    beta = config.anchor_beta
    if c.dist_pos(p_pos, q_pos) != circ / 6:
        raise InvariantViolation("anchors are not len(C)/6 apart")
    for a in (c.points[u], c.points[v]):
        for b in (p_pos, q_pos):
            d = c.dist_pos(a, b)
            if not (beta * circ <= d <= (Fraction(1, 2) - beta) * circ):
                raise InvariantViolation("anchor apartness band violated")
    other = v if base == u else u
    for b in (p_pos, q_pos):
        if c.dist_pos(b, c.points[base]) > c.dist_pos(b, c.points[other]):
            raise InvariantViolation("anchor condition (a) violated")
        bound = (Fraction(1, 2) + config.anchor_delta_max) * path_len
        for x, pos in path_pos.items():
            if abs(pos - path_pos[base]) <= bound:
                if c.dist_pos(b, pos % circ) > c.dist_pos(b, c.points[base]):
                    raise InvariantViolation("anchor condition (b) violated")


@dataclass
class EmbedState:
    """Partial embedding of one biconnected block."""

    tree: MetricTree
    mapping: dict[int, int]            # graph vertex -> tree vertex
    embedded: set[int]
    graph: MetricGraph                 # full graph (neighbor structure)
    block: frozenset[int]
    next_id: int = 0

    def fresh(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i


def _is_good(state: EmbedState, x: int, y: int) -> bool:
    """eq-def-good: every embedded neighbor path from F(x) either stays
    inside the F(x)-F(y) path or leaves it immediately."""
    fx = state.mapping[x]
    p_xy = set(state.tree.path(fx, state.mapping[y]))
    for w in state.graph.neighbors(x):
        if w == y or w not in state.embedded or w not in state.block:
            continue
        p_xw = set(state.tree.path(fx, state.mapping[w]))
        if not (p_xw <= p_xy or (p_xw & p_xy) == {fx}):
            return False
    return True


def random_extension(
    state: EmbedState,
    path_vertices,
    path_lengths,
    attach: tuple[int, int],
    rng: random.Random,
    config: PipelineConfig = DEFAULT_CONFIG,
) -> None:
    """Attach one ear: close it into a cycle against the current tree
    distance of the attach edge, pick anchors, flatten, and glue one of
    the two flattenings (fair coin)."""
    u, v = attach
    path_vertices = list(path_vertices)
    path_lengths = [frac(w) for w in path_lengths]
    if path_vertices[0] == v and path_vertices[-1] == u:
        path_vertices.reverse()
        path_lengths.reverse()
    if path_vertices[0] != u or path_vertices[-1] != v:
        raise ValueError("ear endpoints do not match the attach edge")
    fu, fv = state.mapping[u], state.mapping[v]
    tree = state.tree
    d = tree.dist(fu, fv)
    len_p = sum(path_lengths, Fraction(0))
    edge_len = state.graph.edge_lengths().get(norm_edge(u, v))
    hyp = edge_len if edge_len is not None else d
    if len_p < config.slack_alpha * hyp:
        raise SlackViolation(
            f"ear of length {len_p} too short for attach edge of length {hyp}"
        )

    good_u = _is_good(state, u, v)
    good_v = _is_good(state, v, u)
    if good_u and good_v:
        good = min(u, v)
    elif good_u:
        good = u
    elif good_v:
        good = v
    else:
        raise InvariantViolation(f"no good endpoint for attach edge ({u},{v})")

    cyc = make_cycle(path_vertices, path_lengths, d)
    path_pos: dict[int, Fraction] = {}
    pos = Fraction(0)
    for i, x in enumerate(path_vertices):
        path_pos[x] = pos
        if i < len(path_lengths):
            pos += path_lengths[i]
    forbidden = set(path_pos[x] % cyc.circumference for x in path_vertices)

    glue_positions = {p for (_, p) in tree.path_positions(fu, fv)}
    interior = path_vertices[1:-1]

    def no_existing_collision(p_pos: Fraction, q_pos: Fraction) -> bool:
        for b in (p_pos, q_pos):
            flat = flatten(cyc, b)
            lo, hi = sorted((flat.positions[u], flat.positions[v]))
            for x in interior:
                fp = flat.positions[x]
                if lo <= fp <= hi and (fp - flat.positions[u]) in glue_positions:
                    return False
        return True

    p_pos, q_pos = anchor_points(
        cyc, u, v, forbidden, good, rng, config,
        path_pos=path_pos, extra_check=no_existing_collision,
    )
    branch = p_pos if rng.random() < 0.5 else q_pos
    flat = flatten(cyc, branch)

    order = sorted(path_vertices, key=lambda x: (flat.positions[x], path_pos[x]))
    t2 = MetricTree()
    t2_id = {x: i for i, x in enumerate(order)}
    for i in range(len(order) - 1):
        a, b = order[i], order[i + 1]
        w = flat.positions[b] - flat.positions[a]
        t2.add_vertex(t2_id[a])
        t2.add_vertex(t2_id[b])
        t2.add_edge(t2_id[a], t2_id[b], w)
    if len(order) == 1:
        t2.add_vertex(t2_id[order[0]])

    new_tree, map2 = glue(tree, t2, fu, fv, t2_id[u], t2_id[v])
    state.tree = new_tree
    for x in interior:
        state.mapping[x] = map2[t2_id[x]]
        state.embedded.add(x)


def _embed_block(
    g: MetricGraph,
    h_block: MetricGraph,
    block_verts: frozenset[int],
    back: dict[int, int],
    rng: random.Random,
    config: PipelineConfig,
    build=None,
) -> tuple[MetricTree, dict[int, int]]:
    """Embed one biconnected block (or bridge) of the slack graph; tree
    ids are local and relabelled by the caller."""
    if build is None:
        build = ear_decomposition(h_block)
    init_vs = [back[i] for i in build.initial_vertices]
    tree = MetricTree()
    mapping: dict[int, int] = {}
    for i, x in enumerate(init_vs):
        tree.add_vertex(i)
        mapping[x] = i
    for i, w in enumerate(build.initial_lengths):
        tree.add_edge(mapping[init_vs[i]], mapping[init_vs[i + 1]], w)
    state = EmbedState(
        tree=tree,
        mapping=mapping,
        embedded=set(init_vs),
        graph=g,
        block=block_verts,
        next_id=len(init_vs),
    )
    for step in build.steps:
        vs = [back[i] for i in step.path_vertices]
        ae = (back[step.attach_edge[0]], back[step.attach_edge[1]])
        random_extension(state, vs, step.path_lengths, ae, rng, config)
    return state.tree, state.mapping


def embed_sampler(
    g: MetricGraph,
    config: PipelineConfig = DEFAULT_CONFIG,
):
    """Precompute the deterministic part of the embedding (reduction,
    slack transform, block order, ear builds) and return a seed -> TreeMap
    sampler; use this when drawing many embeddings of the same graph."""
    if not is_outerplanar(g):
        raise NotOuterplanar("embedding needs an outerplanar graph")
    comps = connected_components(g)
    if len(comps) != 1:
        raise ValueError("embedding expects a connected graph")
    g_red = reduce_lengths(g)
    h, _build = slack_transform(g_red, config.slack_alpha)

    blocks, _ = biconnected_components(h)
    blocks = sorted((frozenset(b) for b in blocks if len(b) >= 2), key=min)
    if not blocks:
        def sample_trivial(seed: int) -> TreeMap:
            final = MetricTree()
            final.add_vertex(0)
            return TreeMap(final, {0: 0}, g_red, root=0)

        return sample_trivial
    ordered = [blocks[0]]
    rest = list(blocks[1:])
    covered = set(blocks[0])
    while rest:
        for i, b in enumerate(rest):
            if b & covered:
                ordered.append(b)
                covered |= b
                del rest[i]
                break
        else:
            raise ValueError("slack graph unexpectedly disconnected")
    prepared = []
    for b in ordered:
        sub, idx = induced_subgraph(h, set(b))
        back = {i: x for x, i in idx.items()}
        prepared.append((b, sub, back, ear_decomposition(sub)))

    def sample(seed: int) -> TreeMap:
        rng = random.Random(f"embed:{seed}")
        final = MetricTree()
        mapping: dict[int, int] = {}
        next_global = 0
        for (b, sub, back, build) in prepared:
            bt, bmap = _embed_block(h, sub, b, back, rng, config, build=build)
            shared = [x for x in b if x in mapping]
            relabel: dict[int, int] = {}
            if shared:
                c = shared[0]
                relabel[bmap[c]] = mapping[c]
            for t_v in bt.vertices():
                if t_v not in relabel:
                    relabel[t_v] = next_global
                    next_global += 1
            next_global = max(next_global, max(relabel.values()) + 1)
            for t_v in bt.vertices():
                final.add_vertex(relabel[t_v])
            for (a, bb, w) in bt.edges():
                final.add_edge(relabel[a], relabel[bb], w)
            for x, t_v in bmap.items():
                mapping[x] = relabel[t_v]
        root_vertex = min(mapping)
        return TreeMap(final, mapping, g_red, root=mapping[root_vertex])

    return sample


def embed_outerplanar(
    g: MetricGraph,
    seed: int,
    config: PipelineConfig = DEFAULT_CONFIG,
) -> TreeMap:
    """Random 1-Lipschitz star-shaped embedding of a connected
    outerplanar metric graph into a random tree.

    Pipeline: reduce, slack transform at alpha=160, then per-block ear
    embedding; block trees are joined at the images of cut vertices."""
    return embed_sampler(g, config)(seed)


# -- predicates ---------------------------------------------------------


def star_center_arms(tm: TreeMap, t: int, fiber) -> list[int]:
    targets = set()
    for x in fiber:
        for w in tm.source.neighbors(x):
            if tm.mapping[w] != t:
                targets.add(tm.mapping[w])
    return sorted(targets)


def is_star_shaped(tm: TreeMap) -> bool:
    """True iff around every image vertex the union of realized-edge
    paths is a subdivided star centered there."""
    fibers = tm.fibers()
    for t, fib in fibers.items():
        targets = star_center_arms(tm, t, fib)
        deg: dict[int, int] = {}
        edges = set()
        for a in targets:
            p = tm.tree.path(t, a)
            for i in range(len(p) - 1):
                e = (min(p[i], p[i + 1]), max(p[i], p[i + 1]))
                if e not in edges:
                    edges.add(e)
                    deg[p[i]] = deg.get(p[i], 0) + 1
                    deg[p[i + 1]] = deg.get(p[i + 1], 0) + 1
        for v, dv in deg.items():
            if v != t and dv > 2:
                return False
    return True


def thin_number(tm: TreeMap, u: int) -> int:
    """Minimum number of simple paths from F(u) covering the union of
    paths to the images of u's neighbors (= leaves of that union other
    than F(u))."""
    fu = tm.mapping[u]
    deg: dict[int, int] = {}
    edges = set()
    for w in tm.source.neighbors(u):
        p = tm.tree.path(fu, tm.mapping[w])
        for i in range(len(p) - 1):
            e = (min(p[i], p[i + 1]), max(p[i], p[i + 1]))
            if e not in edges:
                edges.add(e)
                deg[p[i]] = deg.get(p[i], 0) + 1
                deg[p[i + 1]] = deg.get(p[i + 1], 0) + 1
    if not edges:
        return 0
    return sum(1 for v, dv in deg.items() if dv == 1 and v != fu)


def is_thin(tm: TreeMap, delta: int) -> bool:
    return all(thin_number(tm, u) <= delta for u in tm.mapping)


def check_good_vertex_exists(
    g: MetricGraph, outer_cycle, p, edge: tuple[int, int]
):
    """One endpoint of an outer-face edge always satisfies the one-sided
    neighbor condition in the outer-cycle pseudometric; return it."""
    order = list(outer_cycle)
    lengths = g.edge_lengths()
    pos: dict[int, Fraction] = {}
    cur = Fraction(0)
    for i, x in enumerate(order):
        pos[x] = cur
        nxt = order[(i + 1) % len(order)]
        cur += lengths[norm_edge(x, nxt)]
    circ = cur

    def d_c(a: Fraction, b: Fraction) -> Fraction:
        d = abs(a - b)
        return min(d, circ - d)

    p = frac(p)
    u, v = edge
    if d_c(p, pos[u]) > d_c(p, pos[v]):
        u, v = v, u
    if all(d_c(p, pos[w]) >= d_c(p, pos[u]) for w in g.neighbors(v)):
        return v
    if all(d_c(p, pos[w]) <= d_c(p, pos[v]) for w in g.neighbors(u)):
        return u
    raise InvariantViolation(f"no good endpoint for edge {edge} at position {p}")
