"""
Shattering checks and dimensions of finite hypothesis classes.

Covers the k-DS, k-Natarajan and k-exponential dimensions (k=1 gives the
DS, Natarajan and exponential dimensions) and the list version of the
Sauer bound.
"""
import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from listpac.config import DEFAULT_SETTINGS
from listpac.errors import BudgetExceededError, DomainError
from listpac.hclass import HypothesisClass, check_coords, restrict

logger = logging.getLogger("listpac.dims")

# kind name -> (shattering family, whether k is fixed to 1)
KINDS = {
    'DS': ('kds', True),
    'kDS': ('kds', False),
    'Natarajan': ('knat', True),
    'kNatarajan': ('knat', False),
    'Exponential': ('kexp', True),
    'kExponential': ('kexp', False),
}


@dataclass(frozen=True)
class DimensionReport:
    kind: str
    k: int
    value: int
    witness: tuple | None
    exhaustive: bool

    def csv_row(self):
        witness = ' '.join(map(str, self.witness)) if self.witness else ''
        return f"{self.kind},{self.k},{self.value},{str(self.exhaustive).lower()},{witness}"


@dataclass(frozen=True)
class SauerReport:
    holds: bool
    size: int
    bound: int
    natarajan_dim: int


def _check_k(k):
    if k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")


def i_neighbors(H, f, i):
    """All rows differing from f exactly at coordinate i."""
    f = tuple(f)
    if f not in H:
        raise DomainError(f"row {f} is not in the class")
    i = check_coords(H, (i,))[0]
    arr = H.array
    mask = (arr[:, i - 1] != f[i - 1]) & ((arr != np.array(f)).sum(axis=1) == 1)
    return {H.rows[vid] for vid in np.flatnonzero(mask)}


def peel_core(H, k, order=None):
    """
    Ids of the rows surviving k-DS peeling of H over all its coordinates.

    A row is deleted while it has fewer than k i-neighbors among the
    surviving rows for some direction i. `order` fixes the initial queue
    order; the surviving core does not depend on it.
    """
    _check_k(k)
    n, m = len(H), H.num_coords
    groups = [dict() for _ in range(m)]
    keys = []
    for vid, row in enumerate(H.rows):
        row_keys = []
        for i in range(m):
            key = row[:i] + row[i + 1:]
            groups[i].setdefault(key, set()).add(vid)
            row_keys.append(key)
        keys.append(row_keys)

    if order is None:
        order = range(n)
    elif sorted(order) != list(range(n)):
        raise DomainError("peeling order must be a permutation of the row ids")

    def deficient(vid):
        return any(len(groups[i][keys[vid][i]]) - 1 < k for i in range(m))

    queue = deque(vid for vid in order if deficient(vid))
    queued = set(queue)
    alive = set(range(n))
    while queue:
        vid = queue.popleft()
        alive.discard(vid)
        for i in range(m):
            group = groups[i][keys[vid][i]]
            group.discard(vid)
            if len(group) - 1 < k:
                for other in group:
                    if other not in queued:
                        queue.append(other)
                        queued.add(other)
    return frozenset(alive)


def kds_shatters(H, S, k):
    """
    Returns:
        tuple: (shattered, core) where core is the maximal sub-class of H|_S
        with at least k i-neighbors in every direction, or None.
    """
    R = restrict(H, S)
    core = peel_core(R, k)
    if not core:
        return False, None
    return True, HypothesisClass(R.num_coords, R.label_bound, tuple(R.rows[v] for v in sorted(core)))


def knat_shatters(H, S, k):
    """
    Returns:
        tuple: (shattered, lists) where lists holds one (k+1)-label tuple per
        coordinate of S whose product lies inside H|_S, or None.
    """
    _check_k(k)
    R = restrict(H, S)
    d = R.num_coords

    # buckets: chosen-prefix -> rows of R carrying that prefix
    def search(j, buckets, chosen):
        if j == d:
            return chosen
        available = None
        for rows in buckets.values():
            labels = {row[j] for row in rows}
            available = labels if available is None else available & labels
        if len(available) < k + 1:
            return None
        for lists in itertools.combinations(sorted(available), k + 1):
            nxt = {}
            for prefix, rows in buckets.items():
                for a in lists:
                    nxt[prefix + (a,)] = [row for row in rows if row[j] == a]
            found = search(j + 1, nxt, chosen + (lists,))
            if found is not None:
                return found
        return None

    witness = search(0, {(): list(R.rows)}, ())
    return witness is not None, witness


def kexp_shatters(H, S, k):
    _check_k(k)
    S = check_coords(H, S)
    return len(restrict(H, S)) >= (k + 1) ** len(S)


def _dimension_search(H, kind, k, cap, check):
    m = H.num_coords
    coords = range(1, m + 1)
    if 2 ** m - 1 <= cap:
        for size in range(m, 0, -1):
            for S in itertools.combinations(coords, size):
                if check(S):
                    logger.debug(f"{kind} (k={k}) witness {S}")
                    return DimensionReport(kind, k, size, S, True)
        return DimensionReport(kind, k, 0, None, True)

    # Too many subsets: grow witnesses upward until a size level or the budget fails.
    logger.warning(f"{kind} search over {2 ** m - 1} subsets exceeds cap {cap}; reporting a lower bound")
    checks = 0
    best = None
    for size in range(1, m + 1):
        found = None
        for S in itertools.combinations(coords, size):
            if checks >= cap:
                break
            checks += 1
            if check(S):
                found = S
                break
        if found is None:
            break
        best = found
    return DimensionReport(kind, k, len(best) if best else 0, best, False)


def kds_dimension(H, k, cap=None):
    _check_k(k)
    cap = DEFAULT_SETTINGS.dimension_cap if cap is None else cap
    return _dimension_search(H, 'kDS', k, cap, lambda S: kds_shatters(H, S, k)[0])


def knat_dimension(H, k, cap=None):
    _check_k(k)
    cap = DEFAULT_SETTINGS.dimension_cap if cap is None else cap
    return _dimension_search(H, 'kNatarajan', k, cap, lambda S: knat_shatters(H, S, k)[0])


def kexp_dimension(H, k, cap=None):
    _check_k(k)
    cap = DEFAULT_SETTINGS.dimension_cap if cap is None else cap
    return _dimension_search(H, 'kExponential', k, cap, lambda S: kexp_shatters(H, S, k))


def dimension(H, kind, k=1, cap=None):
    """Dispatch on a kind name from KINDS; the k=1 kinds ignore k."""
    if kind not in KINDS:
        raise DomainError(f"unknown dimension kind '{kind}'; expected one of {', '.join(KINDS)}")
    family, fixed_k = KINDS[kind]
    if fixed_k:
        k = 1
    search = {'kds': kds_dimension, 'knat': knat_dimension, 'kexp': kexp_dimension}[family]
    report = search(H, k, cap)
    return DimensionReport(kind, k, report.value, report.witness, report.exhaustive)


# --- List Sauer bound ---

def sauer_bound(m, d, k, label_counts):
    """
    k^(m-d) * sum over coordinate sets S with |S| <= d of prod_{j in S} C(N_j, k+1).
    """
    label_counts = [int(n) for n in label_counts]
    if not 0 <= d <= m:
        raise DomainError(f"need 0 <= d <= m, got d={d}, m={m}")
    if k < 2:
        raise DomainError(f"the list Sauer bound needs k >= 2, got {k}")
    if len(label_counts) != m:
        raise DomainError(f"expected {m} label counts, got {len(label_counts)}")
    if any(n <= k + 1 for n in label_counts):
        raise DomainError(f"every label count must exceed k+1={k + 1}")

    # elementary symmetric sums of the C(N_j, k+1)
    sums = [1] + [0] * m
    for n in label_counts:
        c = math.comb(n, k + 1)
        for i in range(m, 0, -1):
            sums[i] += sums[i - 1] * c
    return k ** (m - d) * sum(sums[:d + 1])


def sauer_corollary_bound(m, d, k, p):
    """Uniform-alphabet form: k^(m-d) * sum_{i<=d} C(m,i) C(p,k+1)^i."""
    if not 0 <= d <= m:
        raise DomainError(f"need 0 <= d <= m, got d={d}, m={m}")
    if k < 2 or p <= k + 1:
        raise DomainError(f"need k >= 2 and p > k+1, got k={k}, p={p}")
    c = math.comb(p, k + 1)
    return k ** (m - d) * sum(math.comb(m, i) * c ** i for i in range(d + 1))


def sauer_check(H, k, cap=None):
    """Compare |H| with the list Sauer bound at the exact k-Natarajan dimension."""
    if k < 2 or H.label_bound <= k + 1:
        raise DomainError(f"sauer check needs k >= 2 and p > k+1, got k={k}, p={H.label_bound}")
    report = knat_dimension(H, k, cap)
    if not report.exhaustive:
        raise BudgetExceededError("the Sauer check needs an exhaustive k-Natarajan dimension; raise the cap")
    bound = sauer_corollary_bound(H.num_coords, report.value, k, H.label_bound)
    holds = len(H) <= bound
    if not holds:
        logger.error(f"Sauer bound violated: |H|={len(H)} > {bound}")
    return SauerReport(holds, len(H), bound, report.value)


def kexp_from_natarajan_bound(k, natarajan_dim, p):
    """60 k^2 d_N log p, an upper bound on the k-exponential dimension."""
    return 60 * k ** 2 * natarajan_dim * math.log(p)
