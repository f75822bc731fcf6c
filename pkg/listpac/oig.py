"""One-inclusion hypergraphs and their degree statistics."""
import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from listpac.config import DEFAULT_SETTINGS
from listpac.dims import peel_core
from listpac.errors import DomainError
from listpac.hclass import HypothesisClass, restrict

logger = logging.getLogger("listpac.oig")


@dataclass(frozen=True)
class Edge:
    direction: int
    key: tuple
    members: tuple

    def __len__(self):
        return len(self.members)


class OneInclusionGraph:
    """
    Vertices are the rows of a class (vertex id = row position). For each
    direction i there is one edge per off-i projection, holding every row
    with that projection.
    """

    def __init__(self, hclass):
        self.hclass = hclass
        m = hclass.num_coords
        edges = []
        incident = [[0] * m for _ in hclass.rows]
        self._edge_index = {}
        for i in range(m):
            groups = {}
            for vid, row in enumerate(hclass.rows):
                groups.setdefault(row[:i] + row[i + 1:], []).append(vid)
            for key in sorted(groups):
                eid = len(edges)
                edges.append(Edge(i + 1, key, tuple(groups[key])))
                self._edge_index[(i + 1, key)] = eid
                for vid in groups[key]:
                    incident[vid][i] = eid
        self.edges = tuple(edges)
        self.incident = tuple(tuple(row) for row in incident)

    @property
    def num_vertices(self):
        return len(self.hclass)

    @property
    def num_edges(self):
        return len(self.edges)

    def find_edge(self, direction, key):
        """Edge id for a direction and off-direction key, or None."""
        return self._edge_index.get((direction, tuple(key)))

    def edge_of(self, vertex, direction):
        return self.incident[vertex][direction - 1]


def build_oig(H):
    return OneInclusionGraph(H)


@dataclass(frozen=True)
class DegreeStats:
    k: int
    degrees: tuple
    avd: Fraction
    savd: Fraction


def degree_stats(G, k):
    if k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    sizes = [len(e) for e in G.edges]
    degrees = tuple(sum(1 for eid in G.incident[v] if sizes[eid] > k) for v in range(G.num_vertices))
    n = G.num_vertices
    avd = Fraction(sum(s for s in sizes if s > k), n)
    savd = Fraction(sum(max(s - k, 0) for s in sizes), n)
    return DegreeStats(k, degrees, avd, savd)


def degree_histogram(stats):
    """Sorted (k-degree, vertex count) pairs."""
    return sorted(Counter(stats.degrees).items())


def avd_of_subset(G, subset, k):
    """Average k-degree of the sub-class induced by a set of vertex ids."""
    subset = set(subset)
    if not subset:
        raise DomainError("average degree of an empty sub-class is undefined")
    total = 0
    for edge in G.edges:
        size = sum(1 for v in edge.members if v in subset)
        if size > k:
            total += size
    return Fraction(total, len(subset))


@dataclass(frozen=True)
class MaximalAvd:
    value: Fraction
    witness: HypothesisClass
    exhaustive: bool


def _subclass(H, vertex_ids):
    return HypothesisClass(H.num_coords, H.label_bound, tuple(H.rows[v] for v in sorted(vertex_ids)))


def _local_search(G, k):
    """First-improvement add/remove hill climbing from the whole class."""
    n = G.num_vertices
    current = set(range(n))
    inside = [len(e) for e in G.edges]
    total = sum(s for s in inside if s > k)
    improved = True
    while improved:
        improved = False
        for v in range(n):
            step = -1 if v in current else 1
            count = len(current) + step
            if count == 0:
                continue
            new_total = total
            for eid in G.incident[v]:
                before, after = inside[eid], inside[eid] + step
                new_total += (after if after > k else 0) - (before if before > k else 0)
            if new_total * len(current) > total * count:
                for eid in G.incident[v]:
                    inside[eid] += step
                current.symmetric_difference_update({v})
                total = new_total
                improved = True
    return Fraction(total, len(current)), current


def maximal_avd(H, k, cap=None):
    """
    Maximum average k-degree over non-empty sub-classes of H.

    Exact by enumeration when 2^|H| - 1 <= cap. Otherwise the larger of the
    k-DS peeling core (worth m when non-empty, which is the ceiling) and a
    hill-climbing local optimum, flagged non-exhaustive.
    """
    cap = DEFAULT_SETTINGS.maximal_avd_cap if cap is None else cap
    G = build_oig(H)
    n = G.num_vertices

    if 2 ** n - 1 <= cap:
        masks = [sum(1 << v for v in e.members) for e in G.edges]
        best_total, best_count, best_mask = -1, 1, 0
        for subset in range(1, 2 ** n):
            total = 0
            for mask in masks:
                size = (mask & subset).bit_count()
                if size > k:
                    total += size
            count = subset.bit_count()
            if total * best_count > best_total * count:
                best_total, best_count, best_mask = total, count, subset
        chosen = [v for v in range(n) if best_mask >> v & 1]
        return MaximalAvd(Fraction(best_total, best_count), _subclass(H, chosen), True)

    core = peel_core(H, k)
    if core:
        return MaximalAvd(Fraction(H.num_coords), _subclass(H, core), True)
    value, chosen = _local_search(G, k)
    logger.warning(f"maximal average degree over {n} rows is a local-search lower bound ({value})")
    return MaximalAvd(value, _subclass(H, chosen), False)


@dataclass(frozen=True)
class DensityReport:
    value: Fraction
    coords: tuple
    witness: HypothesisClass
    exhaustive: bool


def density_mu(H, m_target, k, cap=None):
    """Max over coordinate sets of size m_target of the maximal average k-degree of H|_S."""
    if not 1 <= m_target <= H.num_coords:
        raise DomainError(f"m_target must lie in [1..{H.num_coords}], got {m_target}")
    best = None
    exhaustive = True
    for S in itertools.combinations(range(1, H.num_coords + 1), m_target):
        result = maximal_avd(restrict(H, S), k, cap)
        exhaustive = exhaustive and result.exhaustive
        if best is None or result.value > best.value:
            best = DensityReport(result.value, S, result.witness, False)
        if result.value == m_target:
            # average k-degree never exceeds the number of coordinates
            exhaustive = True
            break
    return DensityReport(best.value, best.coords, best.witness, exhaustive)
