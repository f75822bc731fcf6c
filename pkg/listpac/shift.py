import itertools
import logging
from dataclasses import dataclass

from listpac.hclass import HypothesisClass, check_coords

logger = logging.getLogger("listpac.shift")


@dataclass(frozen=True)
class ShiftStep:
    direction: int
    size_before: int
    size_after: int
    potential_before: int
    potential_after: int

    @property
    def changed(self):
        return self.potential_after != self.potential_before


@dataclass(frozen=True)
class ShiftTrace:
    steps: tuple
    final: HypothesisClass
    rounds: int


def _groups(H, i):
    groups = {}
    for row in H.rows:
        groups.setdefault(row[:i] + row[i + 1:], []).append(row)
    return groups


def shift_one(H, i):
    """Push every direction-i edge down so its labels at i become 1..|e|."""
    i = check_coords(H, (i,))[0] - 1
    rows = []
    for members in _groups(H, i).values():
        # ascending original label -> new label 1..|e|
        for new_label, row in enumerate(sorted(members, key=lambda r: r[i]), start=1):
            rows.append(row[:i] + (new_label,) + row[i + 1:])
    return HypothesisClass(H.num_coords, H.label_bound, tuple(rows))


def shift_fixed_point(H):
    """
    Apply shift_one for directions 1..m round-robin until a full round
    changes nothing.

    Returns:
        ShiftTrace: every applied step, the downward-closed fixed point and
        the number of rounds run.
    """
    steps = []
    current = H
    potential = current.potential()
    rounds = 0
    while True:
        rounds += 1
        changed = False
        for i in range(1, H.num_coords + 1):
            shifted = shift_one(current, i)
            shifted_potential = shifted.potential()
            steps.append(ShiftStep(i, len(current), len(shifted), potential, shifted_potential))
            if shifted_potential != potential:
                changed = True
            current, potential = shifted, shifted_potential
        if not changed:
            break
    logger.debug(f"Shifting reached a fixed point after {rounds} rounds ({len(steps)} steps)")
    return ShiftTrace(tuple(steps), current, rounds)


def is_downward_closed(H, method='auto', literal_cap=100000):
    """
    True if every row's coordinate-wise dominated vectors are all rows.

    method 'literal' enumerates dominated vectors, 'edges' checks that each
    edge's labels in its direction are exactly 1..|e|; 'auto' picks the
    literal check when the dominated-vector count fits under literal_cap.
    """
    if method == 'auto':
        work = 0
        for row in H.rows:
            count = 1
            for v in row:
                count *= v
            work += count
        method = 'literal' if work <= literal_cap else 'edges'

    if method == 'literal':
        rows = H.vertex_ids
        for row in H.rows:
            for dominated in itertools.product(*(range(1, v + 1) for v in row)):
                if dominated not in rows:
                    return False
        return True

    for i in range(H.num_coords):
        for members in _groups(H, i).values():
            if sorted(row[i] for row in members) != list(range(1, len(members) + 1)):
                return False
    return True


def shift_trace_rows(trace):
    """CSV rows (step, direction, changed, potential) for a trace."""
    return [(n, step.direction, int(step.changed), step.potential_after)
            for n, step in enumerate(trace.steps, start=1)]
