import itertools

import pytest

from listpac.dims import kexp_dimension
from listpac.errors import DomainError
from listpac.hclass import HypothesisClass, generate_grid, random_class, restrict
from listpac.oig import build_oig, degree_stats
from listpac.shift import is_downward_closed, shift_fixed_point, shift_one, shift_trace_rows

# 4x4 0/1 matrix, rows top to bottom, columns left to right.
LEFT = ("0101",
        "1011",
        "1011",
        "1001")
RIGHT = ("1111",
         "1011",
         "1001",
         "0001")


def matrix_class(matrix):
    """Each 1 at (row r, column c) becomes the hypothesis (r, c)."""
    cells = [(r, c) for r, line in enumerate(matrix, start=1) for c, bit in enumerate(line, start=1) if bit == "1"]
    return HypothesisClass(2, 4, tuple(cells))


def test_matrix_column_counts():
    H = matrix_class(LEFT)
    assert len(H) == 10
    counts = [sum(1 for r, c in H.rows if c == col) for col in range(1, 5)]
    assert counts == [3, 1, 2, 4]


def test_matrix_shift_pushes_columns_up():
    assert shift_one(matrix_class(LEFT), 1) == matrix_class(RIGHT)


def test_shift_one_single_edge():
    H = HypothesisClass(1, 3, ((2,), (3,)))
    assert shift_one(H, 1).rows == ((1,), (2,))


def test_shift_one_fixed_direction(grid3x3):
    assert shift_one(grid3x3, 2) == grid3x3
    H = HypothesisClass(2, 3, ((1, 1), (2, 1), (1, 3)))
    assert shift_one(H, 1) == H


def test_shift_one_rejects_bad_direction(square):
    with pytest.raises(DomainError):
        shift_one(square, 3)


def test_fixed_point_of_grid(grid3x3):
    trace = shift_fixed_point(grid3x3)
    assert trace.final == grid3x3
    assert trace.rounds == 1
    assert not any(step.changed for step in trace.steps)


def test_fixed_point_of_singleton():
    trace = shift_fixed_point(HypothesisClass(2, 3, ((2, 2),)))
    assert trace.final.rows == ((1, 1),)


def test_fixed_point_of_random_class():
    H = random_class(4, 5, 30, seed=8)
    trace = shift_fixed_point(H)
    assert len(trace.final) == len(H)
    assert is_downward_closed(trace.final)


def test_trace_rows_and_potential():
    H = HypothesisClass(2, 3, ((3, 3), (2, 3)))
    trace = shift_fixed_point(H)
    rows = shift_trace_rows(trace)
    assert [row[0] for row in rows] == list(range(1, len(trace.steps) + 1))
    assert rows[-1][3] == trace.final.potential()
    for step in trace.steps:
        assert step.size_before == step.size_after
        if step.changed:
            assert step.potential_after < step.potential_before
        else:
            assert step.potential_after == step.potential_before
    assert trace.final.rows == ((1, 1), (2, 1))


def _shift_properties(H, k):
    current = H
    for i in itertools.cycle(range(1, H.num_coords + 1)):
        shifted = shift_one(current, i)
        assert len(shifted) == len(current)
        for size in range(1, H.num_coords + 1):
            for coords in itertools.combinations(range(1, H.num_coords + 1), size):
                assert len(restrict(shifted, coords)) <= len(restrict(current, coords))
        assert degree_stats(build_oig(shifted), k).savd >= degree_stats(build_oig(current), k).savd
        if shifted == current and is_downward_closed(current):
            break
        current = shifted
    assert kexp_dimension(current, k).value <= kexp_dimension(H, k).value
    return current


def test_shifting_properties(random_classes):
    for H in random_classes(60, max_m=4, max_p=4, max_rows=20, seed=9):
        final = _shift_properties(H, 1)
        assert final == shift_fixed_point(H).final


@pytest.mark.slow
def test_shifting_properties_many(random_classes):
    for index, H in enumerate(random_classes(500, max_m=6, max_p=4, max_rows=30, seed=10)):
        _shift_properties(H, 1 + index % 2)


# --- Downward closure ---

def test_downward_closed_examples(grid3x3):
    diagonal = HypothesisClass(2, 2, ((1, 1), (2, 2)))
    for method in ("literal", "edges", "auto"):
        assert is_downward_closed(grid3x3, method=method)
        assert not is_downward_closed(diagonal, method=method)


def test_methods_agree(random_classes):
    for H in random_classes(100, max_m=4, max_p=4, max_rows=25, seed=11):
        literal = is_downward_closed(H, method="literal")
        assert literal == is_downward_closed(H, method="edges")
        final = shift_fixed_point(H).final
        assert is_downward_closed(final, method="literal")
        assert is_downward_closed(final, method="edges")


def test_auto_switches_to_edges():
    H = generate_grid(6, 4)
    assert is_downward_closed(H, literal_cap=10)
