"""Ground-truth oracles for flows and cuts.

Polymatroid capacities, Lovász extensions, exact cut capacity, sparsest
cuts by enumeration, the vertex-capacitated concurrent-flow LP, and its
dual as length functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .config import DEFAULT_CONFIG, PipelineConfig
from .errors import (
    NegativeEntry,
    NoSeparatedDemand,
    TooLarge,
    TooLargeForExact,
    ZeroDenominator,
)
from .graph import MetricGraph, all_pairs_distances, dijkstra, frac, norm_edge
from .simplex import LPResult, check_solution, solve_lp

Edge = tuple[int, int]


# -- capacities ---------------------------------------------------------


@dataclass(frozen=True)
class PolymatroidCaps:
    """Per-vertex monotone submodular functions over incident edges.

    Either the vertex-capacity special form rho_v(S) = cap(v) for every
    nonempty S, or explicit tables keyed by frozensets of edges."""

    vertex_caps: Optional[dict[int, Fraction]] = None
    tables: Optional[dict[int, dict[frozenset, Fraction]]] = None

    @staticmethod
    def from_vertex_caps(caps) -> "PolymatroidCaps":
        return PolymatroidCaps(vertex_caps={v: frac(c) for v, c in dict(caps).items()})

    def is_vertex_form(self) -> bool:
        return self.vertex_caps is not None

    def rho(self, v: int, edges) -> Fraction:
        s = frozenset(norm_edge(*e) for e in edges)
        if not s:
            return Fraction(0)
        if self.vertex_caps is not None:
            return self.vertex_caps.get(v, Fraction(0))
        return self.tables[v][s]

    def incident(self, v: int, g: MetricGraph) -> list[Edge]:
        return [norm_edge(a, b) for (a, b, _) in g.edges if v in (a, b)]

    def validate_tables(self) -> None:
        """Exhaustive monotonicity/submodularity check of every table."""
        if self.tables is None:
            return
        for v, table in self.tables.items():
            ground = frozenset().union(*table) if table else frozenset()
            subsets = [
                frozenset(c)
                for r in range(len(ground) + 1)
                for c in itertools.combinations(sorted(ground), r)
            ]
            if table.get(frozenset(), Fraction(0)) != 0:
                raise ValueError(f"rho_{v}(empty) != 0")
            for a in subsets:
                for b in subsets:
                    fa = table.get(a, Fraction(0))
                    fb = table.get(b, Fraction(0))
                    if a <= b and fa > fb:
                        raise ValueError(f"rho_{v} not monotone at {a} <= {b}")
                    fi = table.get(a & b, Fraction(0))
                    fu = table.get(a | b, Fraction(0))
                    if fa + fb < fi + fu:
                        raise ValueError(f"rho_{v} not submodular at {a}, {b}")


@dataclass(frozen=True)
class DemandMatrix:
    """Symmetric nonnegative demands given as unordered-pair weights."""

    pairs: dict[Edge, Fraction]

    @staticmethod
    def from_pairs(items) -> "DemandMatrix":
        out: dict[Edge, Fraction] = {}
        for (u, v, w) in items:
            if u == v:
                raise ValueError("demand between a vertex and itself")
            w = frac(w)
            if w < 0:
                raise ValueError("negative demand")
            key = norm_edge(u, v)
            out[key] = out.get(key, Fraction(0)) + w
        return DemandMatrix(out)

    def dem(self, u: int, v: int) -> Fraction:
        return self.pairs.get(norm_edge(u, v), Fraction(0))

    def support(self) -> set[int]:
        out: set[int] = set()
        for (u, v), w in self.pairs.items():
            if w > 0:
                out |= {u, v}
        return out

    def items(self):
        return [(u, v, w) for (u, v), w in sorted(self.pairs.items()) if w > 0]

    def total(self) -> Fraction:
        return sum((w for w in self.pairs.values()), Fraction(0))


@dataclass(frozen=True)
class AdaptedLengths:
    """Per-vertex edge lengths with len(e) <= ell_u(e) + ell_v(e)."""

    ell: dict[int, dict[Edge, Fraction]]
    length: dict[Edge, Fraction]

    def check_adapted(self) -> None:
        for e, le in self.length.items():
            u, v = e
            s = self.ell.get(u, {}).get(e, Fraction(0)) + self.ell.get(v, {}).get(
                e, Fraction(0)
            )
            if le > s:
                raise ValueError(f"lengths not adapted at edge {e}: {le} > {s}")

    @staticmethod
    def split_evenly(g: MetricGraph) -> "AdaptedLengths":
        ell: dict[int, dict[Edge, Fraction]] = {v: {} for v in range(g.n)}
        length = {}
        for (u, v, w) in g.edges:
            e = norm_edge(u, v)
            length[e] = w
            ell[u][e] = w / 2
            ell[v][e] = w / 2
        return AdaptedLengths(ell, length)


# -- Lovász extension ---------------------------------------------------


def lovasz_extension(rho: Callable[[frozenset], Fraction], ell: dict) -> Fraction:
    """Exact level-set integral of a monotone set function with
    rho(empty) = 0, over nonnegative weights ``ell``: item -> value."""
    vals = {}
    for k, v in ell.items():
        v = frac(v)
        if v < 0:
            raise NegativeEntry(f"negative weight {v} at {k}")
        vals[k] = v
    taus = sorted({Fraction(0)} | set(vals.values()))
    out = Fraction(0)
    for i in range(len(taus) - 1):
        level = frozenset(k for k, v in vals.items() if v >= taus[i + 1])
        out += (taus[i + 1] - taus[i]) * rho(level)
    return out


def rho_hat(caps: PolymatroidCaps, v: int, ell_v: dict) -> Fraction:
    return lovasz_extension(lambda s: caps.rho(v, s), ell_v)


# -- cut capacity -------------------------------------------------------


def nu(
    s_edges,
    caps: PolymatroidCaps,
    limit: int = 20,
) -> tuple[Fraction, dict[Edge, int]]:
    """Exact minimum of sum_v rho_v(g^-1(v)) over all assignments of each
    cut edge to one of its endpoints."""
    edges = [norm_edge(*e) for e in s_edges]
    if len(edges) > limit:
        raise TooLargeForExact(f"{len(edges)} edges exceeds exact limit {limit}")
    if not edges:
        return Fraction(0), {}
    best = None
    best_assign = None
    for bits in itertools.product((0, 1), repeat=len(edges)):
        buckets: dict[int, list[Edge]] = {}
        for e, b in zip(edges, bits):
            buckets.setdefault(e[b], []).append(e)
        val = sum((caps.rho(v, es) for v, es in buckets.items()), Fraction(0))
        if best is None or val < best:
            best = val
            best_assign = {e: e[b] for e, b in zip(edges, bits)}
    return best, best_assign


def assignment_value(assign: dict[Edge, int], caps: PolymatroidCaps) -> Fraction:
    buckets: dict[int, list[Edge]] = {}
    for e, v in assign.items():
        if v not in e:
            raise ValueError(f"edge {e} assigned to non-endpoint {v}")
        buckets.setdefault(v, []).append(e)
    return sum((caps.rho(v, es) for v, es in buckets.items()), Fraction(0))


def sigma(g: MetricGraph, s_edges, u: int, v: int) -> int:
    """1 iff u and v are disconnected after deleting the edges in S."""
    cut = {norm_edge(*e) for e in s_edges}
    adj: dict[int, list[int]] = {x: [] for x in range(g.n)}
    for (a, b, _) in g.edges:
        if norm_edge(a, b) not in cut:
            adj[a].append(b)
            adj[b].append(a)
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        if x == v:
            return 0
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return 0 if v in seen else 1


def separated_demand(g: MetricGraph, s_edges, dem: DemandMatrix) -> Fraction:
    return sum(
        (w * sigma(g, s_edges, u, v) for (u, v, w) in dem.items()), Fraction(0)
    )


def sparsity(
    g: MetricGraph, s_edges, caps: PolymatroidCaps, dem: DemandMatrix
) -> Fraction:
    sep = separated_demand(g, s_edges, dem)
    if sep == 0:
        raise NoSeparatedDemand("cut separates no demand")
    val, _ = nu(s_edges, caps)
    return val / sep


# -- sparsest cuts by enumeration --------------------------------------


def vertex_rho_s(g: MetricGraph, s_verts: frozenset, u: int, v: int) -> Fraction:
    """Half-credit separation function of a vertex set."""
    inside = (u in s_verts) + (v in s_verts)
    if inside == 1:
        return Fraction(1, 2)
    if inside == 2:
        return Fraction(1)
    # Both outside: full credit iff they sit in distinct components of
    # the graph with S removed.
    adj: dict[int, list[int]] = {x: [] for x in range(g.n)}
    for (a, b, _) in g.edges:
        if a not in s_verts and b not in s_verts:
            adj[a].append(b)
            adj[b].append(a)
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return Fraction(0) if v in seen else Fraction(1)


def brute_sparsest_vertex_cut(
    g: MetricGraph,
    cap: dict[int, Fraction],
    dem: DemandMatrix,
    config: PipelineConfig = DEFAULT_CONFIG,
) -> tuple[frozenset, Fraction]:
    if g.n > config.vertex_cut_max_n:
        raise TooLarge(f"n = {g.n} too large for 2^n enumeration")
    best = None
    best_s = None
    found_separable = False
    for mask in range(1, 1 << g.n):
        s = frozenset(v for v in range(g.n) if mask >> v & 1)
        denom = sum(
            (w * vertex_rho_s(g, s, u, v) for (u, v, w) in dem.items()),
            Fraction(0),
        )
        if denom == 0:
            continue
        found_separable = True
        val = sum((frac(cap[v]) for v in s), Fraction(0)) / denom
        if best is None or val < best:
            best = val
            best_s = s
    if not found_separable:
        raise NoSeparatedDemand("no vertex set separates any demand")
    return best_s, best


def brute_sparsest_edge_cut(
    g: MetricGraph,
    caps: PolymatroidCaps,
    dem: DemandMatrix,
    config: PipelineConfig = DEFAULT_CONFIG,
) -> tuple[frozenset, Fraction]:
    edges = [norm_edge(u, v) for (u, v, _) in g.edges]
    if len(edges) > config.edge_cut_max_edges:
        raise TooLarge(f"|E| = {len(edges)} too large for enumeration")
    best = None
    best_s = None
    for mask in range(1, 1 << len(edges)):
        s = [e for i, e in enumerate(edges) if mask >> i & 1]
        sep = separated_demand(g, s, dem)
        if sep == 0:
            continue
        val, _ = nu(s, caps)
        val = val / sep
        if best is None or val < best:
            best = val
            best_s = frozenset(s)
    if best is None:
        raise NoSeparatedDemand("no edge set separates any demand")
    return best_s, best


# -- concurrent flow LP -------------------------------------------------


@dataclass
class FlowSolution:
    epsilon: Fraction
    # (commodity index, tail, head) -> flow
    flows: dict[tuple[int, int, int], Fraction]
    commodities: list[tuple[int, int, Fraction]]
    endpoint_factor: int

    def verify(self, g: MetricGraph, caps_at: dict[int, Fraction]) -> None:
        """Exact conservation and capacity recheck; raises on failure."""
        arcs = []
        for (u, v, _) in g.edges:
            arcs.append((u, v))
            arcs.append((v, u))
        for ci, (s, t, d) in enumerate(self.commodities):
            for v in range(g.n):
                if v == s:
                    continue
                bal = Fraction(0)
                for (a, b) in arcs:
                    f = self.flows.get((ci, a, b), Fraction(0))
                    if b == v:
                        bal += f
                    if a == v:
                        bal -= f
                want = self.epsilon * d if v == t else Fraction(0)
                if bal != want:
                    raise ValueError(f"conservation fails at ({ci}, {v})")
        for w in range(g.n):
            tot = Fraction(0)
            for (ci, a, b), f in self.flows.items():
                if w in (a, b):
                    tot += f
            if tot > self.endpoint_factor * caps_at.get(w, Fraction(0)):
                raise ValueError(f"capacity violated at vertex {w}")


def _mcf_lp_rows(g: MetricGraph, cap, dem: DemandMatrix, endpoint_factor: int):
    commodities = [(u, v, w) for (u, v, w) in dem.items()]
    arcs = []
    for (u, v, _) in g.edges:
        arcs.append((u, v))
        arcs.append((v, u))
    n_arc = len(arcs)
    k = len(commodities)
    nvar = k * n_arc + 1          # flows then epsilon (last)
    eps_i = nvar - 1

    def fvar(ci, ai):
        return ci * n_arc + ai

    rows = []
    for ci, (s, t, d) in enumerate(commodities):
        for v in range(g.n):
            if v == s:
                continue
            coeffs = [Fraction(0)] * nvar
            touched = False
            for ai, (a, b) in enumerate(arcs):
                if b == v:
                    coeffs[fvar(ci, ai)] += 1
                    touched = True
                if a == v:
                    coeffs[fvar(ci, ai)] -= 1
                    touched = True
            if v == t:
                coeffs[eps_i] = -d
                touched = True
            if touched:
                rows.append((coeffs, "=", Fraction(0)))
    for w in range(g.n):
        coeffs = [Fraction(0)] * nvar
        touched = False
        for ci in range(k):
            for ai, (a, b) in enumerate(arcs):
                if w in (a, b):
                    coeffs[fvar(ci, ai)] += 1
                    touched = True
        if touched:
            rows.append((coeffs, "<=", endpoint_factor * frac(cap.get(w, 0))))
    objective = [Fraction(0)] * nvar
    objective[eps_i] = Fraction(1)
    return objective, rows, commodities, arcs, nvar


def mcf_vertex_lp(
    g: MetricGraph, cap, dem: DemandMatrix, endpoint_factor: int = 2
) -> FlowSolution:
    """Maximum concurrent flow under vertex capacities.

    endpoint_factor=2 is the half-credit-at-endpoints convention (the
    constraint reads sum of incidences <= 2 cap); endpoint_factor=1 is
    the vertex-capacity polymatroid form."""
    cap = {v: frac(c) for v, c in dict(cap).items()}
    objective, rows, commodities, arcs, nvar = _mcf_lp_rows(
        g, cap, dem, endpoint_factor
    )
    if not commodities:
        return FlowSolution(Fraction(0), {}, [], endpoint_factor)
    res = solve_lp(objective, rows, maximize=True)
    if res.status != "optimal":
        # Disconnected demand pairs force epsilon = 0; the LP is always
        # feasible (zero flow), so anything else is a bug.
        raise RuntimeError(f"flow LP unexpectedly {res.status}")
    check_solution(objective, rows, res.x)
    flows = {}
    n_arc = len(arcs)
    for ci in range(len(commodities)):
        for ai, (a, b) in enumerate(arcs):
            f = res.x[ci * n_arc + ai]
            if f:
                flows[(ci, a, b)] = f
    sol = FlowSolution(res.objective, flows, commodities, endpoint_factor)
    sol.verify(g, cap)
    return sol


def mcf_dual_vertex(
    g: MetricGraph, cap, dem: DemandMatrix, endpoint_factor: int = 2
) -> tuple[dict[Edge, Fraction], AdaptedLengths, Fraction]:
    """Optimal dual of the concurrent-flow LP as length functions.

    Variables: a nonnegative vertex length t_v, and per-commodity node
    potentials.  Returns (edge lengths len = t_u + t_v, the adapted
    family ell_v(e) = t_v, objective = sum factor * cap(v) * t_v)."""
    cap = {v: frac(c) for v, c in dict(cap).items()}
    commodities = [(u, v, w) for (u, v, w) in dem.items()]
    k = len(commodities)
    if k == 0:
        raise ZeroDenominator("no demands")
    # Variables: t_v (n), then z+_{c,v}, z-_{c,v} for v != source_c.
    nvar = g.n + 2 * k * g.n

    def t_i(v):
        return v

    def zp(ci, v):
        return g.n + 2 * (ci * g.n + v)

    def zm(ci, v):
        return g.n + 2 * (ci * g.n + v) + 1

    rows = []
    for ci, (s, t, d) in enumerate(commodities):
        # Pin the source potential to zero.
        coeffs = [Fraction(0)] * nvar
        coeffs[zp(ci, s)] = 1
        coeffs[zm(ci, s)] = 1
        rows.append((coeffs, "=", Fraction(0)))
        for (u, v, _) in g.edges:
            for (a, b) in ((u, v), (v, u)):
                coeffs = [Fraction(0)] * nvar
                coeffs[zp(ci, b)] += 1
                coeffs[zm(ci, b)] -= 1
                coeffs[zp(ci, a)] -= 1
                coeffs[zm(ci, a)] += 1
                coeffs[t_i(u)] -= 1
                coeffs[t_i(v)] -= 1
                rows.append((coeffs, "<=", Fraction(0)))
    coeffs = [Fraction(0)] * nvar
    for ci, (s, t, d) in enumerate(commodities):
        coeffs[zp(ci, t)] += d
        coeffs[zm(ci, t)] -= d
    rows.append((coeffs, ">=", Fraction(1)))
    objective = [Fraction(0)] * nvar
    for v in range(g.n):
        objective[t_i(v)] = endpoint_factor * cap.get(v, Fraction(0))
    res = solve_lp(objective, rows, maximize=False)
    if res.status != "optimal":
        raise RuntimeError(f"dual LP unexpectedly {res.status}")
    check_solution(objective, rows, res.x)
    t_vals = [res.x[t_i(v)] for v in range(g.n)]
    length = {}
    ell: dict[int, dict[Edge, Fraction]] = {v: {} for v in range(g.n)}
    for (u, v, _) in g.edges:
        e = norm_edge(u, v)
        length[e] = t_vals[u] + t_vals[v]
        ell[u][e] = t_vals[u]
        ell[v][e] = t_vals[v]
    return length, AdaptedLengths(ell, length), res.objective


def dual_objective(
    g: MetricGraph,
    ell: AdaptedLengths,
    caps: PolymatroidCaps,
    dem: DemandMatrix,
) -> Fraction:
    """Evaluate sum_v rho_hat_v(ell_v) / sum dem * d_len exactly."""
    ell.check_adapted()
    adj: dict[int, list[tuple[int, Fraction]]] = {v: [] for v in range(g.n)}
    for (u, v, _) in g.edges:
        w = ell.length[norm_edge(u, v)]
        adj[u].append((v, w))
        adj[v].append((u, w))
    denom = Fraction(0)
    for (u, v, w) in dem.items():
        dist = dijkstra(adj, u)
        if v not in dist:
            raise ZeroDenominator(f"demand pair ({u},{v}) disconnected")
        denom += w * dist[v]
    if denom == 0:
        raise ZeroDenominator("all demand pairs at dual distance zero")
    numer = sum(
        (rho_hat(caps, v, ell.ell.get(v, {})) for v in range(g.n)), Fraction(0)
    )
    return numer / denom


def mcf_polymatroid_lp(
    g: MetricGraph, caps: PolymatroidCaps, dem: DemandMatrix
) -> FlowSolution:
    """Concurrent flow under general polymatroid capacities: for every
    vertex v and nonempty subset A of its incident edges, the total flow
    crossing A is at most rho_v(A)."""
    if caps.is_vertex_form():
        return mcf_vertex_lp(g, caps.vertex_caps, dem, endpoint_factor=1)
    commodities = [(u, v, w) for (u, v, w) in dem.items()]
    if not commodities:
        return FlowSolution(Fraction(0), {}, [], 1)
    arcs = []
    for (u, v, _) in g.edges:
        arcs.append((u, v))
        arcs.append((v, u))
    n_arc = len(arcs)
    k = len(commodities)
    nvar = k * n_arc + 1
    eps_i = nvar - 1

    def fvar(ci, ai):
        return ci * n_arc + ai

    rows = []
    for ci, (s, t, d) in enumerate(commodities):
        for v in range(g.n):
            if v == s:
                continue
            coeffs = [Fraction(0)] * nvar
            for ai, (a, b) in enumerate(arcs):
                if b == v:
                    coeffs[fvar(ci, ai)] += 1
                if a == v:
                    coeffs[fvar(ci, ai)] -= 1
            if v == t:
                coeffs[eps_i] = -d
            rows.append((coeffs, "=", Fraction(0)))
    for w in range(g.n):
        inc = caps.incident(w, g)
        for r in range(1, len(inc) + 1):
            for sub in itertools.combinations(inc, r):
                coeffs = [Fraction(0)] * nvar
                subset = set(sub)
                for ci in range(k):
                    for ai, (a, b) in enumerate(arcs):
                        if w in (a, b) and norm_edge(a, b) in subset:
                            coeffs[fvar(ci, ai)] += 1
                rows.append((coeffs, "<=", caps.rho(w, sub)))
    objective = [Fraction(0)] * nvar
    objective[eps_i] = Fraction(1)
    res = solve_lp(objective, rows, maximize=True)
    if res.status != "optimal":
        raise RuntimeError(f"polymatroid flow LP unexpectedly {res.status}")
    check_solution(objective, rows, res.x)
    flows = {}
    for ci in range(k):
        for ai, (a, b) in enumerate(arcs):
            f = res.x[fvar(ci, ai)]
            if f:
                flows[(ci, a, b)] = f
    return FlowSolution(res.objective, flows, commodities, 1)
