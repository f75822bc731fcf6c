"""
k-list orientations of one-inclusion graphs.

greedy_orientation peels a minimum-k-degree vertex at a time and rebuilds
the orientation in reverse: an edge of size > k keeps the list of the
smaller class, an edge of size <= k gains the returning vertex. The
outcome is that every edge is oriented to its (up to) k members peeled
last, and each vertex's outdegree equals its k-degree when it was peeled.
"""
import heapq
import itertools
import logging
import math
from dataclasses import dataclass

from listpac.config import DEFAULT_SETTINGS
from listpac.dims import kds_dimension, kexp_dimension
from listpac.errors import BudgetExceededError, DomainError, OrientationError
from listpac.oig import OneInclusionGraph

logger = logging.getLogger("listpac.orient")


@dataclass(frozen=True, eq=False)
class ListOrientation:
    graph: OneInclusionGraph
    k: int
    assignment: tuple
    claimed_outdegrees: tuple | None = None
    peel_order: tuple | None = None
    bound: float | None = None


@dataclass(frozen=True)
class OutdegreeReport:
    outdegrees: tuple
    max_outdegree: int
    empty_edges: tuple


def ds_regime_bound(G, k, cap=None):
    """Outdegree bound m-1 for a class on m coordinates whose k-DS dimension is below m."""
    m = G.hclass.num_coords
    report = kds_dimension(G.hclass, k, cap)
    if not report.exhaustive:
        raise BudgetExceededError("the DS-regime bound needs an exhaustive k-DS dimension")
    if report.value > m - 1:
        raise DomainError(f"class is k-DS shattered on all {m} coordinates; the DS-regime bound does not apply")
    return m - 1


def exp_regime_bound(G, k, cap=None):
    """Outdegree bound 4 k^2 d_E^k."""
    report = kexp_dimension(G.hclass, k, cap)
    if not report.exhaustive:
        raise BudgetExceededError("the exponential-dimension bound needs an exhaustive k-exponential dimension")
    return 4 * k * k * report.value


def natarajan_outdegree_bound(k, natarajan_dim, p):
    return 240 * k ** 4 * natarajan_dim * math.log(p)


def greedy_orientation(G, k, degree_bound_fn=None):
    """
    Build a k-list orientation by min-degree peeling (ties to the least row).

    degree_bound_fn(G, k), when given, supplies a bound B that every peeled
    vertex's k-degree must respect; exceeding it raises OrientationError.
    """
    if k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    bound = None if degree_bound_fn is None else degree_bound_fn(G, k)
    n = G.num_vertices
    sizes = [len(e) for e in G.edges]
    degree = [sum(1 for eid in G.incident[v] if sizes[eid] > k) for v in range(n)]
    heap = [(degree[v], v) for v in range(n)]
    heapq.heapify(heap)
    removed = [False] * n
    order = []
    outdegrees = [0] * n

    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != degree[v]:
            continue
        if bound is not None and d > bound:
            raise OrientationError(f"vertex {v} peeled with k-degree {d} above the bound {bound}")
        removed[v] = True
        order.append(v)
        outdegrees[v] = d
        for eid in G.incident[v]:
            sizes[eid] -= 1
            if sizes[eid] == k:
                for u in G.edges[eid].members:
                    if not removed[u]:
                        degree[u] -= 1
                        heapq.heappush(heap, (degree[u], u))

    rank = {v: pos for pos, v in enumerate(order)}
    assignment = tuple(
        tuple(sorted(sorted(edge.members, key=rank.__getitem__, reverse=True)[:k]))
        for edge in G.edges
    )
    logger.debug(f"Greedy {k}-orientation of {n} vertices, max outdegree {max(outdegrees, default=0)}")
    return ListOrientation(G, k, assignment, tuple(outdegrees), tuple(order), bound)


def exact_min_max_outdegree(G, k, cap=None):
    """
    Orientation minimizing the maximum k-outdegree, by branch-and-bound over
    the k-subsets of each edge larger than k. The greedy orientation is the
    starting incumbent. Only meant for tiny graphs.
    """
    cap = DEFAULT_SETTINGS.orient_search_cap if cap is None else cap
    greedy = greedy_orientation(G, k)
    best_value = validate(greedy).max_outdegree
    big = [eid for eid, edge in enumerate(G.edges) if len(edge) > k]
    lower = 1 if big else 0
    if best_value == lower:
        return greedy

    out = [0] * G.num_vertices
    chosen = {}
    best = None
    nodes = 0

    def search(idx):
        nonlocal nodes, best, best_value
        nodes += 1
        if nodes > cap:
            raise BudgetExceededError(
                f"exact orientation search passed {cap} nodes; use greedy_orientation for graphs this size")
        if idx == len(big):
            best_value = max(out)
            best = dict(chosen)
            return
        members = G.edges[big[idx]].members
        for keep in itertools.combinations(members, k):
            excluded = [v for v in members if v not in keep]
            if any(out[v] + 1 >= best_value for v in excluded):
                continue
            for v in excluded:
                out[v] += 1
            chosen[big[idx]] = keep
            search(idx + 1)
            for v in excluded:
                out[v] -= 1
            if best_value == lower:
                return

    search(0)
    if best is None:
        return greedy
    assignment = tuple(best.get(eid, edge.members) for eid, edge in enumerate(G.edges))
    logger.debug(f"Exact search improved max outdegree to {best_value} after {nodes} nodes")
    return ListOrientation(G, k, assignment)


def validate(sigma):
    """Recompute outdegrees from scratch; raise OrientationError on any violation."""
    G = sigma.graph
    if len(sigma.assignment) != G.num_edges:
        raise OrientationError(f"orientation covers {len(sigma.assignment)} edges, graph has {G.num_edges}")
    out = [0] * G.num_vertices
    empty = []
    for eid, (edge, chosen) in enumerate(zip(G.edges, sigma.assignment)):
        chosen = tuple(chosen)
        if len(set(chosen)) != len(chosen):
            raise OrientationError(f"edge {eid}: list {chosen} repeats a vertex")
        if len(chosen) > sigma.k:
            raise OrientationError(f"edge {eid}: list of size {len(chosen)} exceeds k={sigma.k}")
        stray = sorted(set(chosen) - set(edge.members))
        if stray:
            raise OrientationError(f"edge {eid}: vertex {stray[0]} is not a member of the edge")
        if not chosen:
            empty.append(eid)
        for v in edge.members:
            if v not in chosen:
                out[v] += 1
    if sigma.claimed_outdegrees is not None:
        for v, (actual, claimed) in enumerate(zip(out, sigma.claimed_outdegrees)):
            if actual != claimed:
                raise OrientationError(f"vertex {v}: outdegree {actual} differs from the recorded {claimed}")
    if empty:
        logger.warning(f"{len(empty)} edges have an empty list")
    return OutdegreeReport(tuple(out), max(out, default=0), tuple(empty))


def orientation_rows(sigma):
    """CSV rows (direction, off-direction key, oriented vertex ids)."""
    G = sigma.graph
    return [(edge.direction, ' '.join(map(str, edge.key)), ' '.join(map(str, chosen)))
            for edge, chosen in zip(G.edges, sigma.assignment)]
