"""
Finite hypothesis classes stored as label vectors.

A class over m coordinates with labels in [1..p] is a non-empty set of
length-m integer vectors kept in canonical lexicographic order, so a row's
position doubles as its vertex id everywhere downstream.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from listpac.config import DEFAULT_SETTINGS
from listpac.errors import BudgetExceededError, ClassFormatError, DomainError, RealizabilityError
from listpac.rng import make_rng

logger = logging.getLogger("listpac.hclass")


@dataclass(frozen=True, eq=False)
class HypothesisClass:
    num_coords: int
    label_bound: int
    rows: tuple

    def __post_init__(self):
        if self.num_coords < 1:
            raise DomainError(f"num_coords must be positive, got {self.num_coords}")
        if self.label_bound < 1:
            raise DomainError(f"label_bound must be positive, got {self.label_bound}")
        rows = sorted({tuple(int(v) for v in row) for row in self.rows})
        if not rows:
            raise DomainError("a hypothesis class needs at least one row")
        for row in rows:
            if len(row) != self.num_coords:
                raise DomainError(f"row {row} has length {len(row)}, expected {self.num_coords}")
            if min(row) < 1 or max(row) > self.label_bound:
                raise DomainError(f"row {row} has a label outside [1..{self.label_bound}]")
        object.__setattr__(self, 'rows', tuple(rows))

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __contains__(self, row):
        return tuple(row) in self.vertex_ids

    def __eq__(self, other):
        if not isinstance(other, HypothesisClass):
            return NotImplemented
        return (self.num_coords, self.label_bound, self.rows) == (other.num_coords, other.label_bound, other.rows)

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.num_coords, self.label_bound, self.rows))

    @cached_property
    def vertex_ids(self):
        return {row: vid for vid, row in enumerate(self.rows)}

    @cached_property
    def array(self):
        return np.array(self.rows, dtype=np.int64).reshape(len(self.rows), self.num_coords)

    def index_of(self, row):
        try:
            return self.vertex_ids[tuple(row)]
        except KeyError:
            raise DomainError(f"row {tuple(row)} is not in the class")

    def label_counts(self):
        """Number of distinct labels realized at each coordinate."""
        return tuple(len(set(column)) for column in zip(*self.rows))

    def potential(self):
        """Sum of all labels over all rows."""
        return int(self.array.sum())


@dataclass(frozen=True)
class LabeledSample:
    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(x), int(y)) for x, y in self.pairs)
        for x, y in pairs:
            if x < 1 or y < 1:
                raise DomainError(f"sample pair ({x}, {y}) must use positive point and label")
        object.__setattr__(self, 'pairs', pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, item):
        return self.pairs[item]

    @property
    def points(self):
        return tuple(x for x, _ in self.pairs)

    @property
    def labels(self):
        return tuple(y for _, y in self.pairs)

    def check_against(self, H):
        for x, y in self.pairs:
            if x > H.num_coords:
                raise DomainError(f"sample point {x} outside [1..{H.num_coords}]")
            if y > H.label_bound:
                raise DomainError(f"sample label {y} outside [1..{H.label_bound}]")


def check_coords(H, coords):
    """Validate a coordinate sequence against H; returns it as a tuple."""
    coords = tuple(int(c) for c in coords)
    if not coords:
        raise DomainError("coordinate sequence must be non-empty")
    if len(set(coords)) != len(coords):
        raise DomainError(f"coordinate sequence {coords} repeats an index")
    for c in coords:
        if not 1 <= c <= H.num_coords:
            raise DomainError(f"coordinate {c} outside [1..{H.num_coords}]")
    return coords


def restrict(H, coords):
    """H|_S: distinct projections of H's rows onto coords, in that order."""
    coords = check_coords(H, coords)
    projected = np.unique(H.array[:, [c - 1 for c in coords]], axis=0)
    return HypothesisClass(len(coords), H.label_bound, tuple(map(tuple, projected.tolist())))


def consistent_rows(H, S):
    """Ids of rows that agree with every pair of the sample."""
    S.check_against(H)
    if not len(S):
        return list(range(len(H)))
    points = np.array(S.points) - 1
    labels = np.array(S.labels)
    mask = np.all(H.array[:, points] == labels, axis=1)
    return np.flatnonzero(mask).tolist()


def is_realizable(H, S):
    return bool(consistent_rows(H, S))


def require_realizable(H, S):
    if not is_realizable(H, S):
        raise RealizabilityError(f"no row of the class is consistent with the {len(S)}-example sample")


# --- HCF text format ---

def _tokens(text):
    if hasattr(text, 'read'):
        text = text.read()
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        try:
            yield number, [int(tok) for tok in stripped.split()]
        except ValueError:
            raise ClassFormatError(f"non-integer token in '{stripped}'", number)


def parse_class(text):
    """
    Parse HCF text: an `m p` header, then one row of m labels per line.

    Returns:
        HypothesisClass: deduplicated, rows in canonical order.
    """
    header = None
    rows = []
    for number, values in _tokens(text):
        if header is None:
            if len(values) != 2 or values[0] < 1 or values[1] < 1:
                raise ClassFormatError("header must be 'm p' with positive integers", number)
            header = values
            continue
        m, p = header
        if len(values) != m:
            raise ClassFormatError(f"expected {m} labels, found {len(values)}", number)
        for v in values:
            if not 1 <= v <= p:
                raise ClassFormatError(f"label {v} outside [1..{p}]", number)
        rows.append(tuple(values))
    if header is None:
        raise ClassFormatError("missing 'm p' header")
    if not rows:
        raise ClassFormatError("class has no rows")
    return HypothesisClass(header[0], header[1], tuple(rows))


def serialize_class(H):
    lines = [f"{H.num_coords} {H.label_bound}"]
    lines.extend(' '.join(map(str, row)) for row in H.rows)
    return '\n'.join(lines) + '\n'


def read_class(path):
    with open(path, 'r') as f:
        H = parse_class(f)
    logger.debug(f"Read {len(H)} rows over {H.num_coords} coordinates from {path}")
    return H


def write_class(H, path):
    with open(path, 'w') as f:
        f.write(serialize_class(H))


def parse_sample(text):
    """Sample text: one `x y` pair per line, `#` comments allowed."""
    pairs = []
    for number, values in _tokens(text):
        if len(values) != 2:
            raise ClassFormatError(f"expected 'point label', found {len(values)} values", number)
        if values[0] < 1 or values[1] < 1:
            raise ClassFormatError("points and labels must be positive", number)
        pairs.append(tuple(values))
    return LabeledSample(tuple(pairs))


def serialize_sample(S):
    return ''.join(f"{x} {y}\n" for x, y in S.pairs)


def read_sample(path):
    with open(path, 'r') as f:
        return parse_sample(f)


# --- Generators ---

def generate_grid(d, labels, cap=None):
    """The full grid [labels]^d."""
    cap = DEFAULT_SETTINGS.grid_row_cap if cap is None else cap
    if d < 1 or labels < 1:
        raise DomainError(f"grid needs d >= 1 and labels >= 1, got d={d}, labels={labels}")
    if labels ** d > cap:
        raise BudgetExceededError(f"grid [{labels}]^{d} has {labels ** d} rows, above the cap of {cap}")
    return HypothesisClass(d, labels, tuple(itertools.product(range(1, labels + 1), repeat=d)))


def generate_example1(m, num_blocks):
    """
    Finite truncation of the 2-DS example: block b is {3b-2, 3b-1, 3b}^3 on
    coordinates 1..3 times {2b-1, 2b}^(m-3) on coordinates 4..m.
    """
    if m < 4 or num_blocks < 1:
        raise DomainError(f"example class needs m >= 4 and num_blocks >= 1, got m={m}, num_blocks={num_blocks}")
    rows = []
    for b in range(1, num_blocks + 1):
        head = (3 * b - 2, 3 * b - 1, 3 * b)
        tail = (2 * b - 1, 2 * b)
        for prefix in itertools.product(head, repeat=3):
            for suffix in itertools.product(tail, repeat=m - 3):
                rows.append(prefix + suffix)
    return HypothesisClass(m, 3 * num_blocks, tuple(rows))


def random_class(m, p, size, seed):
    """`size` distinct rows drawn uniformly from [p]^m (fewer if p^m is smaller)."""
    if m < 1 or p < 1 or size < 1:
        raise DomainError(f"random class needs positive m, p, size; got {m}, {p}, {size}")
    total = p ** m
    size = min(size, total)
    rng = make_rng(seed)
    if total <= 1_000_000:
        codes = rng.choice(total, size=size, replace=False)
        powers = p ** np.arange(m - 1, -1, -1, dtype=np.int64)
        rows = (codes[:, None] // powers) % p + 1
        return HypothesisClass(m, p, tuple(map(tuple, rows.tolist())))
    rows = set()
    while len(rows) < size:
        rows.add(tuple(rng.integers(1, p + 1, size=m).tolist()))
    return HypothesisClass(m, p, tuple(rows))


def from_labelled_rows(rows):
    """
    Build a class from rows over arbitrary sortable label alphabets.

    Returns:
        tuple: (HypothesisClass, list of per-coordinate {original label: 1..p} maps)
    """
    rows = [tuple(row) for row in rows]
    if not rows:
        raise DomainError("a hypothesis class needs at least one row")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise DomainError("rows must all have the same length")
    mappings = []
    for column in zip(*rows):
        mappings.append({label: i for i, label in enumerate(sorted(set(column)), start=1)})
    encoded = tuple(tuple(mappings[j][v] for j, v in enumerate(row)) for row in rows)
    p = max(len(mapping) for mapping in mappings)
    return HypothesisClass(width, p, encoded), mappings
