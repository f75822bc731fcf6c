"""
Experiment harness: finite distributions, exact and sampled error of list
hypotheses, the density-driven hard instance, learning curves and the
generalization bounds for compression-based list learners.
"""
import csv
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from listpac.config import DEFAULT_SETTINGS
from listpac.dims import kds_dimension, knat_dimension
from listpac.errors import BudgetExceededError, DomainError
from listpac.hclass import LabeledSample, require_realizable, restrict
from listpac.learn import compress, empirical_loss, one_inclusion_predict
from listpac.oig import density_mu
from listpac.rng import PRNG_NAME, make_rng, sub_seed

logger = logging.getLogger("listpac.xp")

CURVE_COLUMNS = ('m', 'trials', 'mean_error', 'std_error', 'mean_r', 'mean_bound', 'exceed_fraction', 'epsilon_fraction',
                 'max_train_loss')


@dataclass(frozen=True)
class FiniteDistribution:
    support: tuple
    weights: tuple

    def __post_init__(self):
        support = tuple(tuple(s) if isinstance(s, (tuple, list)) else s for s in self.support)
        weights = tuple(Fraction(w) for w in self.weights)
        if not support or len(support) != len(weights):
            raise DomainError("distribution needs one weight per support entry")
        if len(set(support)) != len(support):
            raise DomainError("distribution support entries must be distinct")
        if any(w < 0 for w in weights) or sum(weights) != 1:
            raise DomainError("distribution weights must be non-negative and sum to 1")
        object.__setattr__(self, 'support', support)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def uniform(cls, support):
        support = tuple(support)
        return cls(support, (Fraction(1, len(support)),) * len(support))

    @classmethod
    def labelled_by(cls, row, points=None, weights=None):
        """Distribution over (x, row[x]) pairs; uniform over the points unless weights are given."""
        points = tuple(range(1, len(row) + 1)) if points is None else tuple(points)
        support = tuple((x, row[x - 1]) for x in points)
        if weights is None:
            return cls.uniform(support)
        return cls(support, tuple(weights))

    @property
    def labelled(self):
        return all(isinstance(s, tuple) and len(s) == 2 for s in self.support)

    def sample(self, n, rng):
        probs = np.array([float(w) for w in self.weights])
        probs /= probs.sum()
        return tuple(self.support[i] for i in rng.choice(len(self.support), size=n, p=probs).tolist())


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    trials: int
    m_grid: tuple
    k: int
    t: int
    delta: float = 0.1
    epsilon: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, 'm_grid', tuple(int(m) for m in self.m_grid))
        if self.trials < 1 or self.k < 1 or self.t < 0 or not self.m_grid or min(self.m_grid) < 1:
            raise DomainError("trials, k and sample sizes must be positive and t non-negative")
        for name in ('delta', 'epsilon'):
            if not 0 < getattr(self, name) < 1:
                raise DomainError(f"{name} must lie in (0, 1), got {getattr(self, name)}")


def _require_labelled(D):
    if not D.labelled:
        raise DomainError("error estimation needs a distribution over (point, label) pairs")


def estimate_error(mu, D):
    """Exact probability under D that mu's list misses the label."""
    _require_labelled(D)
    return sum((w for (x, y), w in zip(D.support, D.weights) if not mu.covers(x, y)), Fraction(0))


def estimate_error_mc(mu, D, trials, seed):
    _require_labelled(D)
    draws = D.sample(trials, make_rng(seed))
    return Fraction(sum(1 for x, y in draws if not mu.covers(x, y)), trials)


# --- Transductive error ---

def _one_inclusion(H, pairs, x, k):
    return one_inclusion_predict(H, LabeledSample(pairs), x, k)


def _fixed_list(H, pairs, x, k):
    return tuple(range(1, min(k, H.label_bound) + 1))


def _full_list(H, pairs, x, k):
    if H.label_bound > k:
        raise DomainError(f"the full label set has {H.label_bound} labels, more than k={k}")
    return tuple(range(1, H.label_bound + 1))


ALGORITHMS = {
    'one-inclusion': _one_inclusion,
    'fixed-list': _fixed_list,
    'full-list': _full_list,
}


def transductive_loo_error(H, k, algorithm, S_star, F, cap=None):
    """
    Exact miss probability when m-1 sample points and a test point are drawn
    uniformly from S_star and the target is uniform over F restricted to S_star.
    """
    cap = DEFAULT_SETTINGS.enumeration_cap if cap is None else cap
    if algorithm not in ALGORITHMS:
        raise DomainError(f"unknown algorithm '{algorithm}'; expected one of {', '.join(ALGORITHMS)}")
    predict = ALGORITHMS[algorithm]
    S_star = tuple(S_star)
    targets = restrict(F, S_star).rows
    m = len(S_star)
    cases = m ** m * len(targets)
    if cases > cap:
        raise BudgetExceededError(f"{cases} transductive cases exceed the enumeration cap of {cap}")

    misses = 0
    for h in targets:
        label_of = dict(zip(S_star, h))
        for draw in itertools.product(S_star, repeat=m):
            *sample_points, x = draw
            pairs = tuple((p, label_of[p]) for p in sample_points)
            if label_of[x] not in predict(H, pairs, x, k):
                misses += 1
    return Fraction(misses, cases)


def hard_instance_bound(mu, k, m):
    """mu / (e (k+1) m)."""
    return float(mu) / (math.e * (k + 1) * m)


def hard_instance_rational_bound(mu, k, m):
    """mu (1 - 1/m)^(m-1) / ((k+1) m), which dominates hard_instance_bound."""
    return Fraction(mu) * (1 - Fraction(1, m)) ** (m - 1) / ((k + 1) * m)


@dataclass(frozen=True)
class HardInstanceReport:
    coords: tuple
    mu: Fraction
    bound: float
    rational_bound: Fraction
    exact: Fraction | None
    estimate: Fraction
    holds: bool | None


def hard_instance_error(H, k, m, trials, seed, settings=None):
    """
    Leave-one-out error of the one-inclusion list learner on the hard
    instance: uniform points on the densest size-m coordinate set, target
    uniform over the densest sub-class there.
    """
    settings = settings or DEFAULT_SETTINGS
    density = density_mu(H, m, k, settings.maximal_avd_cap)
    H_star = restrict(H, density.coords)
    F = density.witness
    points = tuple(range(1, m + 1))
    rational = hard_instance_rational_bound(density.value, k, m)

    exact = None
    if m ** m * len(F) <= settings.enumeration_cap:
        exact = transductive_loo_error(H_star, k, 'one-inclusion', points, F, settings.enumeration_cap)

    rng = make_rng(seed)
    misses = 0
    for _ in range(trials):
        draw = rng.integers(1, m + 1, size=m).tolist()
        h = F.rows[int(rng.integers(len(F)))]
        *sample_points, x = draw
        pairs = tuple((p, h[p - 1]) for p in sample_points)
        if h[x - 1] not in _one_inclusion(H_star, pairs, x, k):
            misses += 1
    estimate = Fraction(misses, trials) if trials else Fraction(0)

    holds = None if exact is None else exact >= rational
    if holds is False:
        logger.error(f"hard-instance error {exact} fell below {rational}")
    return HardInstanceReport(density.coords, density.value, hard_instance_bound(density.value, k, m),
                              rational, exact, estimate, holds)


# --- Generalization bounds ---

def _check_bound_args(m, delta):
    if m < 1:
        raise DomainError(f"sample size must be positive, got {m}")
    if not 0 < delta <= 1:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")


def _check_compression_size(r, m):
    if r < 0 or 2 * r > m:
        raise DomainError(f"compression size {r} must lie in [0, m/2] for m={m}")


def bernstein_bound(L_S, m, delta):
    _check_bound_args(m, delta)
    if not 0 <= L_S <= 1:
        raise DomainError(f"empirical loss must lie in [0, 1], got {L_S}")
    log_term = math.log(1 / delta)
    return float(L_S) + math.sqrt(2 * float(L_S) * log_term / m) + 4 * log_term / m


def compression_bound(r, m, delta):
    _check_bound_args(m, delta)
    _check_compression_size(r, m)
    return (8 * r * math.log(m) + 8 * math.log(1 / delta)) / m


def agnostic_bound(r, m, delta):
    _check_bound_args(m, delta)
    _check_compression_size(r, m)
    log2, logm, logd = math.log(2), math.log(m), math.log(1 / delta)
    return (math.sqrt(math.log(2 / delta) / (2 * m))
            + math.sqrt((4 * log2 + 4 * r * logm + 4 * logd) / m)
            + (8 * log2 + 8 * r * logm + 8 * logd + r) / m)


def validation_bound(L_V, r, m, delta):
    """Realizable-compression bound with validation loss L_V on the m - r unselected examples."""
    _check_bound_args(m, delta)
    _check_compression_size(r, m)
    log_term = r * math.log(m) + math.log(1 / delta)
    return float(L_V) + math.sqrt(float(L_V) * 4 * log_term / m) + 8 * log_term / m


# --- Learning curves ---

@dataclass(frozen=True)
class TrialOutcome:
    error: Fraction
    size: int
    bound: float
    train_loss: Fraction


@dataclass(frozen=True)
class CurveRow:
    m: int
    trials: int
    mean_error: float
    std_error: float
    mean_r: float
    mean_bound: float
    exceed_fraction: float
    epsilon_fraction: float
    max_train_loss: float

    def as_tuple(self):
        return tuple(getattr(self, c) for c in CURVE_COLUMNS)


def learning_curve(H, D, k, t, config, settings=None, d_ds=None, d_nat=None):
    """
    For every m in the grid run `trials` independent compress/reconstruct
    trials on S ~ D^m and summarize exact errors against the realizable
    compression bound at each trial's own compression size, and count the
    trials whose error exceeds config.epsilon.
    """
    settings = settings or DEFAULT_SETTINGS
    _require_labelled(D)
    require_realizable(H, LabeledSample(D.support))
    if d_ds is None:
        d_ds = kds_dimension(H, k, settings.dimension_cap).value
    if d_nat is None:
        d_nat = knat_dimension(H, k, settings.dimension_cap).value

    rows = []
    for m in config.m_grid:
        base = sub_seed(config.seed, m, settings.seed_stride)

        def trial(index, m=m, base=base):
            seed = sub_seed(base, index, settings.seed_stride)
            S = LabeledSample(D.sample(m, make_rng(seed)))
            result = compress(H, S, k, t, seed=seed, d_ds=d_ds, d_nat=d_nat, settings=settings)
            bound = compression_bound(result.size, m, config.delta) if 2 * result.size <= m else math.inf
            return TrialOutcome(estimate_error(result.hypothesis, D), result.size, bound,
                                empirical_loss(result.hypothesis, S))

        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            outcomes = list(pool.map(trial, range(config.trials)))

        errors = np.array([float(o.error) for o in outcomes])
        bounds = [o.bound for o in outcomes]
        row = CurveRow(
            m=m,
            trials=config.trials,
            mean_error=float(errors.mean()),
            std_error=float(errors.std()),
            mean_r=float(np.mean([o.size for o in outcomes])),
            mean_bound=float(np.mean(bounds)),
            exceed_fraction=sum(1 for o in outcomes if o.error > o.bound) / config.trials,
            epsilon_fraction=sum(1 for o in outcomes if o.error > config.epsilon) / config.trials,
            max_train_loss=float(max(o.train_loss for o in outcomes)),
        )
        logger.info(f"m={m}: mean error {row.mean_error:.4f} (std {row.std_error:.4f}), mean r {row.mean_r:.1f}")
        rows.append(row)
    return rows


def write_curve_csv(rows, stream, settings=None):
    """Write curve rows to an open text stream under a versioned schema header."""
    settings = settings or DEFAULT_SETTINGS
    stream.write(f"# schema={settings.csv_schema} prng={PRNG_NAME}\n")
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(CURVE_COLUMNS)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row.as_tuple()])
