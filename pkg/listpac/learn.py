"""
List learners built on one-inclusion graph orientations, and the two-stage
list sample compression scheme.

Stage 1 covers the sample greedily with weak-learner lists (union of at
most k' labels per point). Stage 2 runs the list-restricted one-inclusion
learner on l sequences of n examples each and keeps the k most frequent
labels per point. Both stages are reproduced exactly by `reconstruct`
from the selected examples and the parameter header.
"""
import functools
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, fields
from fractions import Fraction
from functools import cached_property

import numpy as np

from listpac.config import DEFAULT_SETTINGS
from listpac.dims import kds_dimension, knat_dimension
from listpac.errors import ClassFormatError, CompressionError, DomainError, RealizabilityError
from listpac.hclass import HypothesisClass, LabeledSample, require_realizable, restrict
from listpac.oig import build_oig
from listpac.orient import greedy_orientation
from listpac.rng import make_rng, sub_seed

logger = logging.getLogger("listpac.learn")


@dataclass(frozen=True)
class ListHypothesis:
    list_size_bound: int
    table: tuple
    label_bound: int | None = None

    def __post_init__(self):
        if self.list_size_bound < 1:
            raise DomainError(f"list size bound must be positive, got {self.list_size_bound}")
        items = self.table.items() if isinstance(self.table, dict) else self.table
        table = []
        for x, labels in sorted(items):
            labels = tuple(sorted(set(int(y) for y in labels)))
            if len(labels) > self.list_size_bound:
                raise DomainError(f"list {labels} at point {x} exceeds the bound {self.list_size_bound}")
            if labels and labels[0] < 1:
                raise DomainError(f"list {labels} at point {x} holds a non-positive label")
            if labels and self.label_bound is not None and labels[-1] > self.label_bound:
                raise DomainError(f"list {labels} at point {x} holds a label above {self.label_bound}")
            table.append((int(x), labels))
        object.__setattr__(self, 'table', tuple(table))

    @cached_property
    def _lookup(self):
        return dict(self.table)

    def __call__(self, x):
        return self._lookup.get(x, ())

    def covers(self, x, y):
        return y in self(x)

    @property
    def points(self):
        return tuple(x for x, _ in self.table)


def _check_k(k):
    if k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")


def _as_sample(S):
    return S if isinstance(S, LabeledSample) else LabeledSample(tuple(S))


def _canonical_pairs(pairs):
    """Distinct (point, label) pairs sorted by point; a point with two labels is not realizable."""
    labelled = {}
    for x, y in pairs:
        if labelled.setdefault(x, y) != y:
            raise RealizabilityError(f"point {x} carries both label {labelled[x]} and {y}")
    return tuple(sorted(labelled.items()))


# --- One-inclusion list algorithm (with optional list filter) ---

@functools.lru_cache(maxsize=1024)
def _oriented(restricted, k):
    graph = build_oig(restricted)
    return graph, greedy_orientation(graph, k)


def _filter_by_lists(restricted, points, mu):
    allowed = [set(mu(x)) for x in points]
    rows = tuple(row for row in restricted.rows if all(v in allowed[j] for j, v in enumerate(row)))
    if not rows:
        raise RealizabilityError("no row survives the list filter; the sample is not list-realizable")
    return HypothesisClass(restricted.num_coords, restricted.label_bound, rows)


@functools.lru_cache(maxsize=65536)
def _predict(H, pairs, x, k, mu):
    labelled = dict(pairs)
    if x in labelled:
        return (labelled[x],)
    points = tuple(sorted(set(labelled) | {x}))
    restricted = restrict(H, points)
    if mu is not None:
        restricted = _filter_by_lists(restricted, points, mu)
    j = points.index(x)
    key = tuple(labelled[q] for q in points if q != x)
    graph, sigma = _oriented(restricted, k)
    eid = graph.find_edge(j + 1, key)
    if eid is None:
        raise RealizabilityError(f"no consistent row extends the sample to point {x}")
    return tuple(sorted(restricted.rows[v][j] for v in sigma.assignment[eid]))


def _check_point(H, x):
    if not 1 <= x <= H.num_coords:
        raise DomainError(f"point {x} outside [1..{H.num_coords}]")


def one_inclusion_predict(H, S, x, k):
    """
    Restrict H to the sample points plus x, orient its one-inclusion graph,
    and return the labels at x of the list on the edge the sample selects.
    """
    _check_k(k)
    S = _as_sample(S)
    S.check_against(H)
    _check_point(H, x)
    require_realizable(H, S)
    return _predict(H, _canonical_pairs(S), x, k, None)


def one_inclusion_predict_with_list(H, mu, S, x, k):
    """Same as one_inclusion_predict after dropping rows that leave mu's lists anywhere."""
    _check_k(k)
    S = _as_sample(S)
    S.check_against(H)
    _check_point(H, x)
    for xi, yi in S:
        if not mu.covers(xi, yi):
            raise RealizabilityError(f"label {yi} at point {xi} is outside the list {mu(xi)}")
    require_realizable(H, S)
    return _predict(H, _canonical_pairs(S), x, k, mu)


# --- Weak list learner ---

def _weak_hypothesis(H, pairs, d_ds, k, domain):
    n = len(pairs)
    lists = {x: set() for x in domain}
    for idx in itertools.combinations(range(n), d_ds):
        sub = _canonical_pairs(pairs[i] for i in idx)
        for x in domain:
            lists[x].update(_predict(H, sub, x, k, None))
    return ListHypothesis(k * math.comb(n, n - d_ds), lists, H.label_bound)


def _resolve_kds(H, k, d_ds, cap):
    if d_ds is not None:
        return d_ds
    report = kds_dimension(H, k, cap)
    if not report.exhaustive:
        logger.warning(f"k-DS dimension {report.value} is only a lower bound; bound checks do not apply")
    return report.value


def _resolve_knat(H, k, d_nat, cap):
    if d_nat is not None:
        return d_nat
    report = knat_dimension(H, k, cap)
    if not report.exhaustive:
        logger.warning(f"k-Natarajan dimension {report.value} is only a lower bound; bound checks do not apply")
    return report.value


def weak_list_learn(H, S, t, k, d_ds=None, cap=None, domain=None):
    """
    Union, per point, of the one-inclusion lists learned from every
    size-d_DS subsample of S (|S| = d_DS + t).

    Returns:
        ListHypothesis: lists of size at most k * C(|S|, t).
    """
    _check_k(k)
    S = _as_sample(S)
    d_ds = _resolve_kds(H, k, d_ds, cap)
    if t < 0 or len(S) != d_ds + t:
        raise DomainError(f"weak learner needs |S| = d_DS + t = {d_ds + t}, got {len(S)}")
    S.check_against(H)
    require_realizable(H, S)
    domain = tuple(range(1, H.num_coords + 1)) if domain is None else tuple(domain)
    return _weak_hypothesis(H, S.pairs, d_ds, k, domain)


def topk_merge(lists, k):
    """k most frequent labels across lists (set membership counts), ties to the smaller label."""
    _check_k(k)
    counts = Counter()
    for labels in lists:
        counts.update(set(labels))
    ranked = sorted(counts, key=lambda y: (-counts[y], y))
    return tuple(sorted(ranked[:k]))


# --- Compression ---

@dataclass(frozen=True)
class ReconstructionParams:
    k: int
    t: int
    d_ds: int
    d_nat: int
    segment_size: int
    stage1_rounds: int
    k_prime: int
    sequence_length: int
    num_sequences: int
    num_coords: int

    @property
    def stage1_size(self):
        return self.segment_size * self.stage1_rounds

    @property
    def stage2_size(self):
        return self.sequence_length * self.num_sequences

    def header(self):
        return 'params ' + ' '.join(f"{f.name}={getattr(self, f.name)}" for f in fields(self))

    @classmethod
    def from_header(cls, line):
        tokens = line.split()
        if not tokens or tokens[0] != 'params':
            raise ClassFormatError("compression file must start with a 'params' line", 1)
        try:
            values = dict(token.split('=', 1) for token in tokens[1:])
            return cls(**{f.name: int(values[f.name]) for f in fields(cls)})
        except (KeyError, ValueError) as e:
            raise ClassFormatError(f"bad params header: {e}", 1)


@dataclass(frozen=True)
class Stage1Result:
    selected: tuple
    segment_size: int
    rounds: int
    hypothesis: ListHypothesis


@dataclass(frozen=True, eq=False)
class Stage2Result:
    selected: np.ndarray
    sequence_length: int
    num_sequences: int
    rounds: int
    hypothesis: ListHypothesis
    miss_rate: float


@dataclass(frozen=True, eq=False)
class CompressionResult:
    sample: LabeledSample
    selected_indices: np.ndarray
    params: ReconstructionParams
    hypothesis: ListHypothesis
    certified: bool

    @property
    def size(self):
        return len(self.selected_indices)

    @property
    def selected(self):
        pairs = self.sample.pairs
        return LabeledSample(tuple(pairs[i] for i in self.selected_indices.tolist()))


def _stage1_round_cap(m, alpha):
    if alpha == 1:
        return 1
    return max(1, math.ceil(math.log(2 * m) / -math.log1p(-float(alpha))))


def compress_stage1(H, S, t, k, d_ds=None, seed=0, settings=None, cap=None):
    """
    Greedy cover of S by weak-learner lists: each round picks a size
    d_DS + t subsample of the residual whose weak hypothesis covers at least
    a (t+1)/(d_DS+t+1) fraction of it, then drops the covered examples.
    """
    settings = settings or DEFAULT_SETTINGS
    _check_k(k)
    S = _as_sample(S)
    if not len(S):
        raise DomainError("compression needs a non-empty sample")
    S.check_against(H)
    require_realizable(H, S)
    d_ds = _resolve_kds(H, k, d_ds, cap)
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")

    segment = d_ds + t
    domain = tuple(range(1, H.num_coords + 1))
    pairs = S.pairs
    residual = list(range(len(S)))
    round_cap = _stage1_round_cap(len(S), Fraction(t + 1, segment + 1))
    segments = []
    hypotheses = []

    def attempt(picks):
        mu = _weak_hypothesis(H, tuple(pairs[i] for i in picks), d_ds, k, domain)
        covered = {i for i in residual if mu.covers(*pairs[i])}
        if len(covered) * (segment + 1) >= (t + 1) * len(residual):
            return mu, covered
        return None

    while residual:
        if len(segments) >= round_cap:
            raise CompressionError(f"stage 1 used its {round_cap} rounds with {len(residual)} examples uncovered")
        rng = make_rng(sub_seed(seed, len(segments), settings.seed_stride))
        found = None
        for _ in range(settings.stage1_retries):
            picks = tuple(rng.choice(residual, size=segment, replace=True).tolist())
            outcome = attempt(picks)
            if outcome:
                found = (picks,) + outcome
                break
        if found is None:
            logger.warning(f"stage 1 round {len(segments) + 1}: sampling failed, enumerating subsamples")
            candidates = itertools.combinations_with_replacement(residual, segment)
            for picks in itertools.islice(candidates, settings.stage1_exhaustive_cap):
                outcome = attempt(picks)
                if outcome:
                    found = (picks,) + outcome
                    break
        if found is None:
            raise CompressionError(f"stage 1 found no covering subsample for {len(residual)} residual examples")
        picks, mu, covered = found
        segments.append(picks)
        hypotheses.append(mu)
        residual = [i for i in residual if i not in covered]
        logger.debug(f"stage 1 round {len(segments)}: covered {len(covered)}, {len(residual)} left")

    k_prime = k * math.comb(segment, t) * len(segments)
    union = {x: set().union(*(mu(x) for mu in hypotheses)) for x in domain}
    logger.info(f"stage 1 done: {len(segments)} rounds, list size bound {k_prime}")
    return Stage1Result(tuple(i for picks in segments for i in picks), segment, len(segments),
                        ListHypothesis(k_prime, union, H.label_bound))


def stage2_defaults(k, d_nat, k_prime, m):
    """Sequence length n = ceil(960 k^5 d_N log k') and count l = ceil(12 k log 2m), each at least 1."""
    n = max(1, math.ceil(960 * k ** 5 * d_nat * math.log(k_prime)))
    l = max(1, math.ceil(12 * k * math.log(2 * m)))
    return n, l


def _sequence_lists(H, mu, pairs, seq, k, query):
    """Per-point lists of the list-restricted learner trained on one sequence."""
    sub = _canonical_pairs(pairs[i] for i in np.unique(seq).tolist())
    lists = {}
    for x in query:
        try:
            lists[x] = _predict(H, sub, x, k, mu)
        except RealizabilityError:
            # no row inside the lists extends this sequence to x
            lists[x] = ()
    return lists


def _certified(misses, count, k):
    return bool(np.all(misses * (k + 1) < count))


def _multiplicative_weights(H, mu, S, k, n, l, eta, rng, round_cap):
    pairs = S.pairs
    size = len(pairs)
    query = sorted(set(S.points))
    weights = np.ones(size)
    pool = []
    pool_misses = np.zeros(size)
    best_rate = 1.0
    for rnd in range(1, round_cap + 1):
        probs = weights / weights.sum()
        batch = [rng.choice(size, size=n, p=probs).astype(np.int32) for _ in range(l)]
        misses = np.zeros(size)
        for seq in batch:
            lists = _sequence_lists(H, mu, pairs, seq, k, query)
            misses += [y not in lists[x] for x, y in pairs]
        pool.extend(batch)
        pool_misses += misses
        if _certified(misses, l, k):
            return batch, rnd, float(misses.max() / l)
        if _certified(pool_misses, len(pool), k):
            return pool, rnd, float(pool_misses.max() / len(pool))
        rate = misses / l
        best_rate = min(best_rate, float(rate.max()), float(pool_misses.max() / len(pool)))
        logger.debug(f"MW round {rnd}: worst miss rate {rate.max():.4f}")
        weights = weights * np.exp(eta * rate)
        weights /= weights.sum()
    return None, round_cap, best_rate


def _stage2_hypothesis(H, mu, pairs, sequences, k, domain):
    per_sequence = [_sequence_lists(H, mu, pairs, seq, k, domain) for seq in sequences]
    merged = {x: topk_merge((lists[x] for lists in per_sequence), k) for x in domain}
    return ListHypothesis(k, merged, H.label_bound)


def compress_stage2(H, mu_prime, S, k, d_nat=None, seed=0, settings=None, n=None, l=None, cap=None):
    """
    Find sequences of n examples from S such that every example is missed by
    fewer than a 1/(k+1) fraction of their list-restricted one-inclusion
    lists; the top-k merge of those lists then covers S. The sampling
    distribution over S is driven by multiplicative weights.
    """
    settings = settings or DEFAULT_SETTINGS
    _check_k(k)
    S = _as_sample(S)
    if not len(S):
        raise DomainError("compression needs a non-empty sample")
    S.check_against(H)
    for x, y in S:
        if not mu_prime.covers(x, y):
            raise RealizabilityError(f"label {y} at point {x} is outside the stage-1 list {mu_prime(x)}")
    require_realizable(H, S)
    d_nat = _resolve_knat(H, k, d_nat, cap)

    n_default, l_default = stage2_defaults(k, d_nat, mu_prime.list_size_bound, len(S))
    n = n or settings.stage2_n or n_default
    l = l or settings.stage2_l or l_default
    round_cap = max(1, math.ceil(64 * k * math.log(2 * len(S)) * math.log(len(S))))
    domain = tuple(range(1, H.num_coords + 1))

    best_rate = 1.0
    for attempt in range(settings.stage2_seed_retries + 1):
        rng = make_rng(sub_seed(seed, attempt, settings.seed_stride))
        sequences, rounds, rate = _multiplicative_weights(H, mu_prime, S, k, n, l, settings.mw_eta, rng, round_cap)
        if sequences is None:
            best_rate = min(best_rate, rate)
            logger.warning(f"stage 2 attempt {attempt + 1}: no certificate after {rounds} MW rounds (best miss rate {rate:.4f})")
            continue
        hypothesis = _stage2_hypothesis(H, mu_prime, S.pairs, sequences, k, domain)
        uncovered = [(x, y) for x, y in S if not hypothesis.covers(x, y)]
        if uncovered:
            raise CompressionError(f"top-{k} lists miss {uncovered[0]} despite the miss-rate certificate", rate)
        logger.info(f"stage 2 done: {len(sequences)} sequences of {n} examples after {rounds} MW rounds")
        return Stage2Result(np.concatenate(sequences), n, len(sequences), rounds, hypothesis, rate)
    raise CompressionError(f"stage 2 found no certificate; best miss rate {best_rate:.4f}", best_rate)


def _reconstruct_arrays(H, points, labels, params):
    if len(points) != params.stage1_size + params.stage2_size:
        raise DomainError(f"expected {params.stage1_size + params.stage2_size} selected examples, got {len(points)}")
    if H.num_coords != params.num_coords:
        raise DomainError(f"class has {H.num_coords} coordinates, compression was built for {params.num_coords}")
    domain = tuple(range(1, H.num_coords + 1))
    pairs = tuple(zip(points.tolist(), labels.tolist()))

    stage1_lists = {x: set() for x in domain}
    seg = params.segment_size
    for j in range(params.stage1_rounds):
        mu = _weak_hypothesis(H, pairs[j * seg:(j + 1) * seg], params.d_ds, params.k, domain)
        for x in domain:
            stage1_lists[x].update(mu(x))
    mu_prime = ListHypothesis(params.k_prime, stage1_lists, H.label_bound)

    offset = params.stage1_size
    n = params.sequence_length
    codes = np.arange(len(pairs), dtype=np.int64)
    sequences = [codes[offset + j * n:offset + (j + 1) * n] for j in range(params.num_sequences)]
    return _stage2_hypothesis(H, mu_prime, pairs, sequences, params.k, domain)


def reconstruct(H, selected, params):
    """Rebuild the compressed k-list hypothesis from the selected examples alone."""
    selected = _as_sample(selected)
    return _reconstruct_arrays(H, np.array(selected.points, dtype=np.int64),
                               np.array(selected.labels, dtype=np.int64), params)


def compress(H, S, k, t, seed=0, d_ds=None, d_nat=None, settings=None, n=None, l=None, cap=None):
    """
    Two-stage k-list compression of a realizable sample.

    Returns:
        CompressionResult: selected example indices (stage 1 segments, then
        stage 2 sequences), the parameter header and the reconstructed
        hypothesis, certified against every example of S.
    """
    settings = settings or DEFAULT_SETTINGS
    S = _as_sample(S)
    if not len(S):
        raise DomainError("compression needs a non-empty sample")
    S.check_against(H)
    require_realizable(H, S)
    d_ds = _resolve_kds(H, k, d_ds, cap)
    d_nat = _resolve_knat(H, k, d_nat, cap)

    stage1 = compress_stage1(H, S, t, k, d_ds, seed=sub_seed(seed, 0, settings.seed_stride), settings=settings)
    stage2 = compress_stage2(H, stage1.hypothesis, S, k, d_nat, seed=sub_seed(seed, 1, settings.seed_stride),
                             settings=settings, n=n, l=l)
    params = ReconstructionParams(k, t, d_ds, d_nat, stage1.segment_size, stage1.rounds,
                                  stage1.hypothesis.list_size_bound, stage2.sequence_length,
                                  stage2.num_sequences, H.num_coords)
    selected = np.concatenate([np.array(stage1.selected, dtype=np.int64), stage2.selected.astype(np.int64)])

    pairs = np.array(S.pairs, dtype=np.int64)
    hypothesis = _reconstruct_arrays(H, pairs[selected, 0], pairs[selected, 1], params)
    if hypothesis != stage2.hypothesis:
        raise CompressionError("reconstruction disagrees with the hypothesis built during compression")
    certified = all(hypothesis.covers(x, y) for x, y in S)
    logger.info(f"compressed {len(S)} examples to {len(selected)} (certified={certified})")
    return CompressionResult(S, selected, params, hypothesis, certified)


# --- Size bounds ---

def stage1_size_bound(d_ds, t, m):
    return (d_ds + t + 1) / (t + 1) * (d_ds + t) * math.log(2 * m)


def stage2_size_bound(k, d_nat, k_prime, m):
    return 11520 * k ** 6 * d_nat * math.log(k_prime) * math.log(2 * m)


def compression_size_bound(d_ds, d_nat, k, t, m):
    """Total selected examples allowed by the two stages together."""
    log2m = math.log(2 * m)
    k_prime = k * math.comb(d_ds + t + 1, t + 1) * log2m
    return ((d_ds + t + 1) / (t + 1) * (d_ds + t) + 11520 * k ** 6 * d_nat * math.log(k_prime)) * log2m


def integral_compression_size_bound(d_ds, d_nat, k, t, m):
    """compression_size_bound with round and sequence counts rounded up to integers."""
    rounds = math.ceil((d_ds + t + 1) / (t + 1) * math.log(2 * m))
    k_prime = k * math.comb(d_ds + t, t) * rounds
    n, l = stage2_defaults(k, d_nat, k_prime, m)
    return (d_ds + t) * rounds + n * l


def suggested_t(d_ds):
    """t close to sqrt(d_DS) keeps the stage-1 size near d_DS^1.5."""
    return max(1, round(math.sqrt(d_ds)))


# --- Compression files ---

def format_compression(result):
    lines = ['# listpac compression', result.params.header()]
    lines.extend(f"{x} {y}" for x, y in result.selected)
    return '\n'.join(lines) + '\n'


def write_compression(result, path):
    with open(path, 'w') as f:
        f.write(format_compression(result))


def parse_compression(text):
    """
    Returns:
        tuple: (ReconstructionParams, LabeledSample of selected examples)
    """
    params = None
    pairs = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        if params is None:
            params = ReconstructionParams.from_header(stripped)
            continue
        tokens = stripped.split()
        try:
            x, y = (int(tok) for tok in tokens)
        except ValueError:
            raise ClassFormatError(f"expected 'point label', found '{stripped}'", number)
        pairs.append((x, y))
    if params is None:
        raise ClassFormatError("compression file has no 'params' line")
    return params, LabeledSample(tuple(pairs))


def read_compression(path):
    with open(path, 'r') as f:
        return parse_compression(f.read())


# --- Empirical risk ---

def erm(H, S):
    """
    Returns:
        tuple: (row, mistakes) of the lexicographically least empirical risk minimizer.
    """
    S = _as_sample(S)
    S.check_against(H)
    if not len(S):
        return H.rows[0], 0
    points = np.array(S.points) - 1
    mistakes = (H.array[:, points] != np.array(S.labels)).sum(axis=1)
    best = int(np.argmin(mistakes))
    return H.rows[best], int(mistakes[best])


def empirical_loss(mu, S):
    S = _as_sample(S)
    if not len(S):
        return Fraction(0)
    return Fraction(sum(1 for x, y in S if not mu.covers(x, y)), len(S))


def agnostic_learn(H, S, k, t, seed=0, d_ds=None, d_nat=None, settings=None, n=None, l=None):
    """Compress the examples an empirical risk minimizer gets right."""
    S = _as_sample(S)
    row, mistakes = erm(H, S)
    consistent = LabeledSample(tuple((x, y) for x, y in S if row[x - 1] == y))
    logger.info(f"ERM row {row} makes {mistakes} of {len(S)} mistakes")
    if not len(consistent):
        return ListHypothesis(k, {x: (row[x - 1],) for x in range(1, H.num_coords + 1)}, H.label_bound)
    return compress(H, consistent, k, t, seed=seed, d_ds=d_ds, d_nat=d_nat, settings=settings, n=n, l=l).hypothesis
