import math

import pytest

from listpac.dims import kds_dimension, kexp_dimension, knat_dimension
from listpac.errors import DomainError, OrientationError
from listpac.hclass import HypothesisClass, generate_grid
from listpac.oig import build_oig
from listpac.orient import (ListOrientation, ds_regime_bound, exact_min_max_outdegree, exp_regime_bound,
                            greedy_orientation, natarajan_outdegree_bound, orientation_rows, validate)


def test_singleton_orientation(singleton):
    G = build_oig(singleton)
    sigma = greedy_orientation(G, 1)
    assert sigma.assignment == ((0,), (0,), (0,))
    assert validate(sigma).max_outdegree == 0


@pytest.mark.parametrize("k, d", [(1, 2), (2, 1), (2, 2)])
def test_greedy_is_valid_on_full_grids(k, d):
    G = build_oig(generate_grid(d + 1, k + 1))
    sigma = greedy_orientation(G, k)
    report = validate(sigma)
    assert all(len(chosen) == k for chosen in sigma.assignment)
    assert report.outdegrees == sigma.claimed_outdegrees
    assert sorted(sigma.peel_order) == list(range(G.num_vertices))


def test_small_edges_keep_every_member():
    G = build_oig(generate_grid(3, 2))
    sigma = greedy_orientation(G, 2)
    assert all(chosen == edge.members for chosen, edge in zip(sigma.assignment, G.edges))
    assert validate(sigma).max_outdegree == 0


def test_greedy_is_deterministic(random_classes):
    for H in random_classes(10, max_m=4, max_p=4, max_rows=30, seed=12):
        G = build_oig(H)
        assert greedy_orientation(G, 1).assignment == greedy_orientation(G, 1).assignment


def test_greedy_valid_on_random_classes(random_classes):
    for H in random_classes(200, max_m=5, max_p=5, max_rows=40, seed=13):
        for k in (1, 2):
            sigma = greedy_orientation(build_oig(H), k)
            report = validate(sigma)
            assert report.max_outdegree == max(sigma.claimed_outdegrees)


def test_greedy_rejects_bad_k(square):
    with pytest.raises(DomainError):
        greedy_orientation(build_oig(square), 0)


def test_greedy_enforces_degree_bound(square):
    with pytest.raises(OrientationError):
        greedy_orientation(build_oig(square), 1, lambda graph, k: 0)


# --- Exact search ---

def test_exact_small_values(singleton, square):
    assert validate(exact_min_max_outdegree(build_oig(singleton), 1)).max_outdegree == 0
    assert validate(exact_min_max_outdegree(build_oig(square), 1)).max_outdegree == 1
    assert validate(exact_min_max_outdegree(build_oig(generate_grid(1, 3)), 2)).max_outdegree == 1


def test_exact_never_worse_than_greedy(random_classes):
    tiny = [H for H in random_classes(80, max_m=3, max_p=3, max_rows=10, seed=14) if len(H) <= 10]
    for H in tiny:
        G = build_oig(H)
        for k in (1, 2):
            exact = validate(exact_min_max_outdegree(G, k)).max_outdegree
            assert exact <= validate(greedy_orientation(G, k)).max_outdegree


def test_exact_on_two_crossing_edges():
    H = HypothesisClass(2, 3, ((1, 1), (1, 2), (2, 1), (1, 3), (3, 1)))
    G = build_oig(H)
    exact = validate(exact_min_max_outdegree(G, 1)).max_outdegree
    assert exact <= validate(greedy_orientation(G, 1)).max_outdegree
    assert exact == 1


# --- Validation ---

def test_validate_rejects_stray_vertex(square):
    G = build_oig(square)
    good = greedy_orientation(G, 1)
    edge = G.edges[0]
    stray = next(v for v in range(G.num_vertices) if v not in edge.members)
    bad = ListOrientation(G, 1, ((stray,),) + good.assignment[1:])
    with pytest.raises(OrientationError):
        validate(bad)


def test_validate_rejects_oversized_list(square):
    G = build_oig(square)
    good = greedy_orientation(G, 1)
    bad = ListOrientation(G, 1, (G.edges[0].members,) + good.assignment[1:])
    with pytest.raises(OrientationError):
        validate(bad)


def test_validate_rejects_wrong_claims(square):
    G = build_oig(square)
    good = greedy_orientation(G, 1)
    bad = ListOrientation(G, 1, good.assignment, claimed_outdegrees=(0,) * G.num_vertices)
    with pytest.raises(OrientationError):
        validate(bad)


def test_validate_reports_empty_lists(square):
    G = build_oig(square)
    report = validate(ListOrientation(G, 1, ((),) * G.num_edges))
    assert report.empty_edges == tuple(range(G.num_edges))
    assert report.max_outdegree == 2


# --- Outdegree bounds ---

def test_greedy_stays_below_m_when_kds_is_small(random_classes):
    checked = 0
    for H in random_classes(150, max_m=4, max_p=4, max_rows=40, seed=15):
        for k in (1, 2):
            report = kds_dimension(H, k)
            if report.value < H.num_coords:
                sigma = greedy_orientation(build_oig(H), k)
                assert validate(sigma).max_outdegree <= H.num_coords - 1
                checked += 1
    assert checked > 0


def test_ds_regime_bound():
    G = build_oig(HypothesisClass(2, 2, ((1, 1), (1, 2), (2, 1))))
    assert ds_regime_bound(G, 1) == 1
    sigma = greedy_orientation(G, 1, ds_regime_bound)
    assert sigma.bound == 1
    with pytest.raises(DomainError):
        ds_regime_bound(build_oig(generate_grid(2, 2)), 1)


def test_exponential_and_natarajan_bounds(random_classes):
    for H in random_classes(100, max_m=4, max_p=5, max_rows=40, seed=16):
        G = build_oig(H)
        for k in (1, 2):
            outdegree = validate(greedy_orientation(G, k)).max_outdegree
            d_exp = kexp_dimension(H, k).value
            assert outdegree <= 4 * k * k * d_exp
            assert exp_regime_bound(G, k) == 4 * k * k * d_exp
            d_nat = knat_dimension(H, k).value
            assert outdegree <= natarajan_outdegree_bound(k, d_nat, H.label_bound)


def test_natarajan_outdegree_bound_value():
    assert natarajan_outdegree_bound(1, 2, 3) == pytest.approx(480 * math.log(3))


def test_orientation_rows(square):
    sigma = greedy_orientation(build_oig(square), 2)
    rows = orientation_rows(sigma)
    assert rows[0] == (1, "1", "0 2")
    assert len(rows) == 4
