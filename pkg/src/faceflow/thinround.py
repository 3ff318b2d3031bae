"""Random thinning of star-shaped tree maps and cut rounding.

thin_map converts a star-shaped 1-Lipschitz tree map into a random
4-thin one by recursively rebuilding, at every internal tree vertex, the
arms carrying graph edges onto two fresh vertical branches.  round_thin
turns a thin map plus adapted lengths into a sparse cut certificate, and
multiscale_round runs the dyadic preprocessing + sample loop on top.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .config import DEFAULT_CONFIG, PipelineConfig
from .errors import (
    HypothesisViolated,
    NoSeparatedDemand,
    NotStarShaped,
)
from .graph import MetricGraph, norm_edge
from .polyflow import (
    AdaptedLengths,
    DemandMatrix,
    PolymatroidCaps,
    assignment_value,
    nu,
    rho_hat,
    separated_demand,
)
from .tree import MetricTree, TreeMap

Edge = tuple[int, int]


def thin_map(
    tm: TreeMap,
    seed: int,
    config: PipelineConfig = DEFAULT_CONFIG,
    _choice_fn=None,
) -> TreeMap:
    """Random 4-thin, 1-Lipschitz image of a star-shaped tree map.

    ``_choice_fn(tree_vertex, k)`` may supply the branch bits (one per
    arm) deterministically; used by exhaustive-enumeration tests."""
    rng = random.Random(f"thin:{seed}")
    if _choice_fn is None:
        def _choice_fn(x, k):
            return tuple(rng.randrange(2) for _ in range(k))

    tree = tm.tree
    root = tm.root
    # Children structure via BFS from the root.
    parent = {root: None}
    order = [root]
    for v in order:
        for u in tree.adj[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
    if len(parent) != len(tree.adj):
        raise ValueError("tree map must live on a connected tree")
    children: dict[int, list[int]] = {v: [] for v in parent}
    for v, p in parent.items():
        if p is not None:
            children[p].append(v)

    # Fiber adjacency in terms of original tree vertices.
    fiber_pairs = set()
    for (a, b, _) in tm.source.edges:
        fa, fb = tm.mapping[a], tm.mapping[b]
        if fa != fb:
            fiber_pairs.add((min(fa, fb), max(fa, fb)))

    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    # transform(x) -> (tree over new ids, phi: original subtree vertex -> new id)
    def transform(x: int) -> tuple[MetricTree, dict[int, int]]:
        t_new = MetricTree()
        if not children[x]:
            r = fresh()
            t_new.add_vertex(r)
            return t_new, {x: r}
        phi: dict[int, int] = {}
        r_tilde = fresh()
        t_new.add_vertex(r_tilde)
        phi[x] = r_tilde
        for c in children[x]:
            sub_t, sub_phi = transform(c)
            for tv in sub_t.adj:
                t_new.add_vertex(tv)
            for (a, b, w) in sub_t.edges():
                t_new.add_edge(a, b, w)
            t_new.add_edge(r_tilde, sub_phi[c], tree.adj[x][c])
            phi.update(sub_phi)

        # Current images of tree vertices adjacent (through graph edges)
        # to the fiber of x.
        inv: dict[int, list[int]] = {}
        for orig, cur in phi.items():
            inv.setdefault(cur, []).append(orig)
        targets = set()
        for (fa, fb) in fiber_pairs:
            if fa in phi and fb in phi:
                ca, cb = phi[fa], phi[fb]
                if ca == r_tilde and cb != r_tilde:
                    targets.add(cb)
                elif cb == r_tilde and ca != r_tilde:
                    targets.add(ca)
        if not targets:
            return t_new, phi

        # H: union of the paths from the root to the targets.
        h_edges: set[Edge] = set()
        h_deg: dict[int, int] = {}
        dist_root: dict[int, Fraction] = {r_tilde: Fraction(0)}
        for a in sorted(targets):
            p = t_new.path(r_tilde, a)
            d = Fraction(0)
            for i in range(len(p) - 1):
                d += t_new.adj[p[i]][p[i + 1]]
                dist_root[p[i + 1]] = d
                e = (min(p[i], p[i + 1]), max(p[i], p[i + 1]))
                if e not in h_edges:
                    h_edges.add(e)
                    h_deg[p[i]] = h_deg.get(p[i], 0) + 1
                    h_deg[p[i + 1]] = h_deg.get(p[i + 1], 0) + 1
        for v, dv in h_deg.items():
            if v != r_tilde and dv > 2:
                raise NotStarShaped(
                    f"arm union branches at {v}, map is not star-shaped"
                )
        h_vertices = set(h_deg)
        leaves = sorted(v for v, dv in h_deg.items() if dv == 1 and v != r_tilde)
        arms = [t_new.path(r_tilde, leaf) for leaf in leaves]
        bits = _choice_fn(x, len(arms))

        # New tree: a root with two vertical branches; each arm lands on
        # one branch isometrically; same-position points merge.
        result = MetricTree()
        r_new = fresh()
        result.add_vertex(r_new)
        pos_id: dict[tuple[int, Fraction], int] = {}
        new_of: dict[int, int] = {r_tilde: r_new}
        branch_positions: dict[int, set[Fraction]] = {0: set(), 1: set()}
        for arm, b in zip(arms, bits):
            for v in arm[1:]:
                d = dist_root[v]
                key = (b, d)
                if d == 0:
                    new_of[v] = r_new
                    continue
                if key not in pos_id:
                    pos_id[key] = fresh()
                    branch_positions[b].add(d)
                new_of[v] = pos_id[key]
        for b in (0, 1):
            prev = r_new
            prev_pos = Fraction(0)
            for d in sorted(branch_positions[b]):
                nid = pos_id[(b, d)]
                result.add_vertex(nid)
                result.add_edge(prev, nid, d - prev_pos)
                prev, prev_pos = nid, d
        # Re-attach everything hanging off the arms.
        for tv in t_new.adj:
            if tv not in h_vertices and tv != r_tilde:
                result.add_vertex(tv)
                new_of[tv] = tv
        for (a, b, w) in t_new.edges():
            if (min(a, b), max(a, b)) in h_edges:
                continue
            na, nb = new_of[a], new_of[b]
            result.add_edge(na, nb, w)
        phi2 = {orig: new_of[cur] for orig, cur in phi.items()}
        return result, phi2

    final_tree, phi = transform(root)
    mapping = {u: phi[tv] for u, tv in tm.mapping.items()}
    return TreeMap(final_tree, mapping, tm.source, root=phi[root])


# -- rounding -----------------------------------------------------------


@dataclass
class CutCertificate:
    edges: frozenset
    assignment: dict[Edge, int]
    nu_value: Fraction
    separated: Fraction
    sparsity: Fraction
    exact: bool
    tree_edge: Optional[tuple[int, int]] = None


def _tree_edge_cuts(tm: TreeMap):
    """For every tree edge a, the graph edges whose image path crosses a."""
    tree = tm.tree
    out = []
    path_cache: dict[Edge, set[Edge]] = {}
    for (u, v, w) in tm.source.edges:
        p = tree.path(tm.mapping[u], tm.mapping[v])
        es = set()
        for i in range(len(p) - 1):
            es.add((min(p[i], p[i + 1]), max(p[i], p[i + 1])))
        path_cache[norm_edge(u, v)] = es
    for (a, b, w) in tree.edges():
        te = (min(a, b), max(a, b))
        cut = [e for e, es in path_cache.items() if te in es]
        out.append((te, w, cut))
    return out


def _sweep_assignment(
    tm: TreeMap,
    tree_edge: tuple[int, int],
    lam: Fraction,
    cut_edges,
    ell: AdaptedLengths,
) -> dict[Edge, int]:
    """Assignment rule: orient the tree edge (x, y); an edge whose path
    traverses x before y goes to its near endpoint u when
    d_T(f(u), x) + lam <= ell_u(e), else to the far endpoint."""
    x, y = tree_edge
    tree = tm.tree
    assign = {}
    for (a, b) in cut_edges:
        e = norm_edge(a, b)
        fa, fb = tm.mapping[a], tm.mapping[b]
        p = tree.path(fa, fb)
        # Orient (u, v) so the path traverses the tree edge as (x, y).
        ix = p.index(x)
        iy = p.index(y)
        u, v = (a, b) if ix < iy else (b, a)
        du = tree.dist(tm.mapping[u], x)
        lu = ell.ell.get(u, {}).get(e, Fraction(0))
        assign[e] = u if du + lam <= lu else v
    return assign


def round_thin(
    g: MetricGraph,
    tm: TreeMap,
    ell: AdaptedLengths,
    caps: PolymatroidCaps,
    dem: DemandMatrix,
    delta: int,
    config: PipelineConfig = DEFAULT_CONFIG,
) -> CutCertificate:
    """Best cut among the tree-edge cuts S(a) of a thin map.

    Requires tree-adaptedness d_T(F(u),F(v)) <= ell_u(e) + ell_v(e); the
    returned sparsity satisfies the delta * sum rho_hat / sum dem d_T
    bound whenever every nu was computed exactly."""
    tree = tm.tree
    for (u, v, _) in g.edges:
        e = norm_edge(u, v)
        lhs = tree.dist(tm.mapping[u], tm.mapping[v])
        rhs = ell.ell.get(u, {}).get(e, Fraction(0)) + ell.ell.get(v, {}).get(
            e, Fraction(0)
        )
        if lhs > rhs:
            raise HypothesisViolated(
                f"tree distance {lhs} exceeds ell_u + ell_v = {rhs} on edge {e}"
            )
    best: Optional[CutCertificate] = None
    for (te, w, cut) in _tree_edge_cuts(tm):
        if not cut:
            continue
        sep = separated_demand(g, cut, dem)
        if sep == 0:
            continue
        if len(cut) <= config.nu_brute_limit:
            val, assign = nu(cut, caps, limit=config.nu_brute_limit)
            exact = True
        else:
            # lambda-sweep heuristic: the rule changes only where
            # d_T(f(u), x) + lambda hits ell_u(e).
            x, y = te
            breaks = {Fraction(0), w}
            for (a, b) in cut:
                e = norm_edge(a, b)
                for end in (a, b):
                    lu = ell.ell.get(end, {}).get(e, Fraction(0))
                    lam = lu - tree.dist(tm.mapping[end], x)
                    if 0 <= lam <= w:
                        breaks.add(lam)
            pts = sorted(breaks)
            cands = set(pts)
            for i in range(len(pts) - 1):
                cands.add((pts[i] + pts[i + 1]) / 2)
            val, assign, exact = None, None, False
            for lam in sorted(cands):
                a_ = _sweep_assignment(tm, te, lam, cut, ell)
                v_ = assignment_value(a_, caps)
                if val is None or v_ < val:
                    val, assign = v_, a_
        cert = CutCertificate(
            frozenset(norm_edge(*e) for e in cut), assign, val, sep, val / sep,
            exact, te,
        )
        if best is None or cert.sparsity < best.sparsity:
            best = cert
    if best is None:
        raise NoSeparatedDemand("no tree edge separates any demand")
    return best


def rounding_bound(
    tm: TreeMap, ell: AdaptedLengths, caps: PolymatroidCaps, dem: DemandMatrix,
    delta: int,
) -> Fraction:
    """delta * sum_v rho_hat_v(ell_v) / sum dem * d_T(F(u), F(v))."""
    numer = delta * sum(
        (rho_hat(caps, v, ell.ell.get(v, {})) for v in ell.ell), Fraction(0)
    )
    denom = Fraction(0)
    for (u, v, w) in dem.items():
        denom += w * tm.tree.dist(tm.mapping[u], tm.mapping[v])
    if denom == 0:
        raise NoSeparatedDemand("demands have zero tree distance")
    return numer / denom


# -- multi-scale rounding ----------------------------------------------


def _pow2_ceil(x: Fraction) -> Fraction:
    if x <= 0:
        return Fraction(0)
    p = Fraction(1)
    while p < x:
        p *= 2
    while p / 2 >= x:
        p /= 2
    return p


def dyadic_preprocess(g: MetricGraph, ell: AdaptedLengths) -> AdaptedLengths:
    """Scale each edge's pair down so ell_u + ell_v = len, then round both
    up to powers of two.  Output: pointwise >= scaled input, < 2x, and
    len >= (ell_u + ell_v) / 2."""
    new_ell: dict[int, dict[Edge, Fraction]] = {v: {} for v in ell.ell}
    for (u, v, w) in g.edges:
        e = norm_edge(u, v)
        lu = ell.ell.get(u, {}).get(e, Fraction(0))
        lv = ell.ell.get(v, {}).get(e, Fraction(0))
        s = lu + lv
        if s > 0:
            scale = w / s
            lu, lv = lu * scale, lv * scale
        new_ell.setdefault(u, {})[e] = _pow2_ceil(lu)
        new_ell.setdefault(v, {})[e] = _pow2_ceil(lv)
    return AdaptedLengths(new_ell, dict(ell.length))


def tilde_lengths(
    g: MetricGraph, tm: TreeMap, ell: AdaptedLengths
) -> AdaptedLengths:
    """Per-sample tree-adapted lengths: zero on the strictly smaller side
    of each edge, tree-stretch-scaled on the other(s).  Zero-length edges
    get zero on both sides."""
    tree = tm.tree
    new_ell: dict[int, dict[Edge, Fraction]] = {v: {} for v in ell.ell}
    for (u, v, w) in g.edges:
        e = norm_edge(u, v)
        lu = ell.ell.get(u, {}).get(e, Fraction(0))
        lv = ell.ell.get(v, {}).get(e, Fraction(0))
        if w == 0:
            new_ell.setdefault(u, {})[e] = Fraction(0)
            new_ell.setdefault(v, {})[e] = Fraction(0)
            continue
        dt = tree.dist(tm.mapping[u], tm.mapping[v])
        new_ell.setdefault(u, {})[e] = (
            Fraction(0) if lu < lv else 2 * lu * dt / w
        )
        new_ell.setdefault(v, {})[e] = (
            Fraction(0) if lv < lu else 2 * lv * dt / w
        )
    return AdaptedLengths(new_ell, dict(ell.length))


@dataclass
class RoundingReport:
    best: CutCertificate
    samples: int
    # per-sample (sparsity, per-sample bound) pairs as floats
    sample_ratios: list[float]


def multiscale_round(
    g: MetricGraph,
    ell: AdaptedLengths,
    caps: PolymatroidCaps,
    dem: DemandMatrix,
    embed_sampler,
    samples: int,
    seed: int,
    config: PipelineConfig = DEFAULT_CONFIG,
) -> RoundingReport:
    """Dyadic preprocessing, then per sample: embed, thin, build the
    tree-adapted tilde lengths, and round; keeps the sparsest
    certificate."""
    ell.check_adapted()
    ell2 = dyadic_preprocess(g, ell)
    best: Optional[CutCertificate] = None
    ratios: list[float] = []
    for i in range(samples):
        tm = embed_sampler(seed * 65_537 + i)
        thin = thin_map(tm, seed * 65_537 + i, config)
        tl = tilde_lengths(g, thin, ell2)
        try:
            cert = round_thin(g, thin, tl, caps, dem, config.thinness, config)
        except NoSeparatedDemand:
            continue
        try:
            bound = rounding_bound(thin, tl, caps, dem, config.thinness)
            ratios.append(float(cert.sparsity / bound) if bound else 0.0)
        except NoSeparatedDemand:
            pass
        if best is None or cert.sparsity < best.sparsity:
            best = cert
    if best is None:
        raise NoSeparatedDemand("no sample produced a separating cut")
    return RoundingReport(best, samples, ratios)
