"""End-to-end experiments: duality gap measurements, gap-instance
search, and Monte Carlo distortion estimates.

gap_experiment runs the full constructive pipeline (optimal dual
lengths, retraction onto the face, outerplanar tree embedding, thinning,
rounding) against the LP optimum and reports the best cut found.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .config import DEFAULT_CONFIG, PipelineConfig
from .errors import (
    BudgetExhausted,
    InvariantViolation,
    NoSeparatedDemand,
    TooLarge,
)
from .graph import (
    MetricGraph,
    PlanarInstance,
    all_pairs_distances,
    reduce_lengths,
)
from .instances import (
    Instance,
    random_caps,
    random_demands,
    random_outerplanar,
    random_planar_with_face,
)
from .polyflow import (
    AdaptedLengths,
    DemandMatrix,
    PolymatroidCaps,
    brute_sparsest_edge_cut,
    brute_sparsest_vertex_cut,
    mcf_dual_vertex,
    mcf_polymatroid_lp,
    mcf_vertex_lp,
)
from .retraction import retract_to_outerplanar
from .thinround import (
    CutCertificate,
    dyadic_preprocess,
    round_thin,
    thin_map,
    tilde_lengths,
)
from .tree import TreeMap
from .treeembed import embed_outerplanar, embed_sampler, is_star_shaped, is_thin


@dataclass
class ExperimentReport:
    instance_id: str
    seed: int
    samples: int
    mcf: Fraction
    phi_brute: Optional[Fraction]
    best_sparsity: Optional[Fraction]
    best_certificate: Optional[CutCertificate]
    gap_ratio: Optional[float]
    assertion_tallies: dict[str, int] = field(default_factory=dict)
    runtime_s: float = 0.0

    def lines(self) -> list[str]:
        out = [
            f"instance: {self.instance_id}",
            f"seed: {self.seed}  samples: {self.samples}",
            f"mcf: {self.mcf} = {float(self.mcf):.6g}",
        ]
        if self.phi_brute is not None:
            out.append(f"phi_brute: {self.phi_brute} = {float(self.phi_brute):.6g}")
        if self.best_sparsity is not None:
            out.append(
                f"best_sparsity: {self.best_sparsity}"
                f" = {float(self.best_sparsity):.6g}"
            )
        if self.gap_ratio is not None:
            out.append(f"gap_ratio: {self.gap_ratio:.6g}")
        for k in sorted(self.assertion_tallies):
            out.append(f"checked {k}: {self.assertion_tallies[k]}")
        out.append(f"runtime_s: {self.runtime_s:.2f}")
        return out


def _positive_dual_lengths(
    g: MetricGraph, length: dict, ell: AdaptedLengths
) -> tuple[MetricGraph, AdaptedLengths]:
    """Floor the dual lengths away from zero so downstream geometry
    (cycles, face retraction) stays nondegenerate; the floor is tiny
    relative to the smallest positive dual length and only perturbs the
    reported bound ratio, never the exact weak-duality comparison."""
    positive = [w for w in length.values() if w > 0]
    eps = (min(positive) if positive else Fraction(1)) / 1024
    new_edges = []
    new_ell: dict[int, dict] = {}
    for (u, v, _) in g.edges:
        e = (min(u, v), max(u, v))
        new_edges.append((u, v, length[e] + eps))
        new_ell.setdefault(u, {})[e] = ell.ell.get(u, {}).get(e, Fraction(0)) + eps / 2
        new_ell.setdefault(v, {})[e] = ell.ell.get(v, {}).get(e, Fraction(0)) + eps / 2
    for x in range(g.n):
        new_ell.setdefault(x, {})
    g2 = MetricGraph(g.n, tuple(new_edges))
    lens = {
        (min(u, v), max(u, v)): w for (u, v, w) in new_edges
    }
    return g2, AdaptedLengths(new_ell, lens)


def gap_experiment(
    inst: Instance,
    samples: int,
    seed: int,
    config: PipelineConfig = DEFAULT_CONFIG,
) -> ExperimentReport:
    """Pipeline vs LP on one capacitated instance with face demands."""
    t0 = time.monotonic()
    g = inst.graph
    caps = inst.caps()
    dem = inst.demand_matrix()
    tallies: dict[str, int] = {}

    def tally(key: str):
        tallies[key] = tallies.get(key, 0) + 1

    # Polymatroid-convention flow value and its optimal dual lengths.
    if caps.is_vertex_form():
        cap_dict = caps.vertex_caps
        mcf = mcf_vertex_lp(g, cap_dict, dem, endpoint_factor=1).epsilon
    else:
        # Dual lengths come from the vertex-capacity proxy rho_v(all).
        cap_dict = {
            v: caps.rho(v, caps.incident(v, g)) for v in range(g.n)
        }
        mcf = mcf_polymatroid_lp(g, caps, dem).epsilon
    length, ell, _ = mcf_dual_vertex(g, cap_dict, dem, endpoint_factor=1)
    best: Optional[CutCertificate] = None

    phi_brute = None
    if len(g.edges) <= config.edge_cut_max_edges:
        try:
            _, phi_brute = brute_sparsest_edge_cut(g, caps, dem, config)
        except (TooLarge, NoSeparatedDemand):
            phi_brute = None

    g2, ell2 = _positive_dual_lengths(g, length, ell)
    ell2 = dyadic_preprocess(g2, ell2)
    gr = reduce_lengths(g2)

    if inst.face is None:
        # No face: only the brute cut is available.
        pass
    else:
        pinst = PlanarInstance(gr, inst.face, inst.rotation)
        rng = random.Random(f"gap:{seed}")
        for i in range(samples):
            s_i = seed * 65_537 + i
            fr = retract_to_outerplanar(pinst, s_i, config)
            tally("retraction")
            emb = embed_outerplanar(fr.h, s_i, config)
            if not emb.is_lipschitz():
                raise InvariantViolation("embedding is not 1-Lipschitz")
            tally("embed_lipschitz")
            composed = TreeMap(
                emb.tree,
                {v: emb.mapping[fr.mapping[v]] for v in range(gr.n)},
                gr,
                root=emb.root,
            )
            if not is_star_shaped(composed):
                raise InvariantViolation("composed map is not star-shaped")
            tally("composition_star_shaped")
            thin = thin_map(composed, s_i, config)
            if not is_thin(thin, config.thinness):
                raise InvariantViolation("thinned map exceeds thinness bound")
            tally("thin")
            tl = tilde_lengths(g2, thin, ell2)
            try:
                cert = round_thin(
                    g2, thin, tl, caps, dem, config.thinness, config
                )
            except NoSeparatedDemand:
                continue
            tally("rounded")
            if best is None or cert.sparsity < best.sparsity:
                best = cert

    cands = [s for s in (phi_brute, best.sparsity if best else None) if s is not None]
    best_sparsity = min(cands) if cands else None
    ratio = float(best_sparsity / mcf) if best_sparsity is not None and mcf > 0 else None
    return ExperimentReport(
        instance_id=f"n{g.n}m{len(g.edges)}",
        seed=seed,
        samples=samples,
        mcf=mcf,
        phi_brute=phi_brute,
        best_sparsity=best_sparsity,
        best_certificate=best,
        gap_ratio=ratio,
        assertion_tallies=tallies,
        runtime_s=time.monotonic() - t0,
    )


# -- gap instance search ------------------------------------------------


def _witness_candidates() -> list[Instance]:
    """Hand-picked small instances known to exhibit a vertex flow/cut
    gap; tried before any random search.

    The 3x3 unit-capacity grid with the two diagonal boundary demands
    has mcf^v = 1 and Phi^v = 3/2 (cut {1, 3, 5} or {3, 4, 5})."""
    from .instances import grid_graph

    g, face = grid_graph(3, 3)
    dem = DemandMatrix.from_pairs(
        [(0, 8, Fraction(1)), (2, 6, Fraction(1))]
    )
    return [
        Instance(
            g,
            face=face,
            vcaps=tuple(Fraction(1) for _ in range(9)),
            demands=dem,
        )
    ]


def search_gap_instance(
    max_n: int,
    budget_s: float,
    seed: int = 0,
    target: Fraction = Fraction(7, 5),
    config: PipelineConfig = DEFAULT_CONFIG,
) -> tuple[Instance, Fraction, Fraction]:
    """Search small planar outer-face-demand instances for a vertex
    flow/cut gap Phi^v / mcf^v >= target; returns (instance, phi, mcf).

    Both values are recomputed exactly before returning."""
    if max_n > 14:
        raise ValueError("max_n must be <= 14")
    t0 = time.monotonic()
    best_ratio = Fraction(0)
    best_found = None
    rng = random.Random(f"search:{seed}")

    def consider(inst: Instance):
        nonlocal best_ratio, best_found
        g = inst.graph
        dem = inst.demand_matrix()
        cap = inst.cap_dict()
        try:
            mcf = mcf_vertex_lp(g, cap, dem, endpoint_factor=2).epsilon
            _, phi = brute_sparsest_vertex_cut(g, cap, dem, config)
        except (NoSeparatedDemand, TooLarge):
            return None
        if mcf <= 0:
            return None
        ratio = phi / mcf
        if ratio > best_ratio:
            best_ratio = ratio
            best_found = (inst, phi, mcf)
        if ratio >= target:
            return (inst, phi, mcf)
        return None

    for inst in _witness_candidates():
        if inst.graph.n > max_n:
            continue
        hit = consider(inst)
        if hit:
            return hit

    while time.monotonic() - t0 < budget_s:
        n = rng.randrange(5, max_n + 1)
        kind = rng.randrange(2)
        try:
            if kind == 0:
                g, face = random_outerplanar(n, rng.randrange(1 << 30))
            else:
                g, face = random_planar_with_face(n, rng.randrange(1 << 30))
        except ValueError:
            continue
        unit = rng.randrange(2) == 0
        caps = (
            tuple(Fraction(1) for _ in range(g.n))
            if unit
            else random_caps(g.n, rng.randrange(1 << 30))
        )
        try:
            dem = random_demands(face, rng.randrange(1 << 30))
        except ValueError:
            continue
        inst = Instance(g, face=face, vcaps=caps, demands=dem)
        hit = consider(inst)
        if hit:
            return hit
    raise BudgetExhausted(
        f"no instance with ratio >= {target} in {budget_s}s;"
        f" best ratio found {best_ratio} = {float(best_ratio):.4f}"
    )


# -- distortion ---------------------------------------------------------


@dataclass
class DistortionReport:
    samples: int
    # (u, v) -> (mean ratio, one-sided lower confidence bound)
    table: dict[tuple[int, int], tuple[float, float]]
    min_mean: float
    min_lcb: float


_Z99 = 2.3263478740408408


def distortion_experiment(
    g: MetricGraph,
    samples: int,
    seed: int,
    config: PipelineConfig = DEFAULT_CONFIG,
    embed_fn: Optional[Callable[[int], TreeMap]] = None,
) -> DistortionReport:
    """Per-pair empirical contraction d_T(F(u),F(v)) / d_G(u,v) of the
    random outerplanar tree embedding, with 99% one-sided lower
    confidence bounds on the means."""
    dmat = all_pairs_distances(g)
    if embed_fn is None:
        embed_fn = embed_sampler(g, config)
    pairs = [
        (u, v)
        for u in range(g.n)
        for v in range(u + 1, g.n)
        if dmat[u][v] not in (0, math.inf)
    ]
    sums = {p: 0.0 for p in pairs}
    sqs = {p: 0.0 for p in pairs}
    for i in range(samples):
        tm = embed_fn(seed * 65_537 + i)
        for (u, v) in pairs:
            r = float(tm.tree.dist(tm.mapping[u], tm.mapping[v]) / dmat[u][v])
            sums[(u, v)] += r
            sqs[(u, v)] += r * r
    table = {}
    for p in pairs:
        mean = sums[p] / samples
        var = max(0.0, sqs[p] / samples - mean * mean)
        se = math.sqrt(var / samples)
        table[p] = (mean, mean - _Z99 * se)
    min_mean = min(m for (m, _) in table.values()) if table else 0.0
    min_lcb = min(l for (_, l) in table.values()) if table else 0.0
    return DistortionReport(samples, table, min_mean, min_lcb)
