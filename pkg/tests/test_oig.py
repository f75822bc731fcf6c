from fractions import Fraction

import pytest

from listpac.dims import kexp_dimension
from listpac.errors import DomainError
from listpac.hclass import HypothesisClass, generate_grid
from listpac.oig import avd_of_subset, build_oig, degree_histogram, degree_stats, density_mu, maximal_avd
from listpac.rng import make_rng


def test_singleton_graph(singleton):
    G = build_oig(singleton)
    assert G.num_vertices == 1
    assert G.num_edges == 3
    assert all(len(edge) == 1 for edge in G.edges)


def test_square_is_a_4_cycle(square):
    G = build_oig(square)
    assert G.num_vertices == 4
    assert [edge.direction for edge in G.edges] == [1, 1, 2, 2]
    assert all(len(edge) == 2 for edge in G.edges)


def test_grid_edges(grid3x3):
    G = build_oig(grid3x3)
    for direction in (1, 2):
        edges = [edge for edge in G.edges if edge.direction == direction]
        assert len(edges) == 3
        assert all(len(edge) == 3 for edge in edges)


def test_edges_partition_vertices_per_direction(random_classes):
    for H in random_classes(40, max_m=4, max_p=4, max_rows=30, seed=4):
        G = build_oig(H)
        for direction in range(1, H.num_coords + 1):
            sizes = [len(edge) for edge in G.edges if edge.direction == direction]
            assert sum(sizes) == len(H)
        for v in range(G.num_vertices):
            for direction in range(1, H.num_coords + 1):
                assert v in G.edges[G.edge_of(v, direction)].members


def test_find_edge(square):
    G = build_oig(square)
    eid = G.find_edge(1, (2,))
    assert G.edges[eid].members == (square.index_of((1, 2)), square.index_of((2, 2)))
    assert G.find_edge(1, (3,)) is None


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_grid_degrees(k, d):
    stats = degree_stats(build_oig(generate_grid(d, k + 1)), k)
    assert set(stats.degrees) == {d}
    assert stats.avd == d
    assert stats.savd == Fraction(d, k + 1)


def test_small_edges_have_no_k_degree():
    stats = degree_stats(build_oig(generate_grid(3, 2)), 2)
    assert stats.avd == 0
    assert stats.savd == 0
    assert degree_histogram(stats) == [(0, 8)]


def test_grid_statistics(grid3x3):
    stats = degree_stats(build_oig(grid3x3), 1)
    assert stats.avd == 2
    assert stats.savd == Fraction(4, 3)


def test_avd_savd_sandwich(random_classes):
    for H in random_classes(60, max_m=4, max_p=5, max_rows=40, seed=5):
        for k in (1, 2):
            stats = degree_stats(build_oig(H), k)
            assert stats.savd <= stats.avd <= (k + 1) * stats.savd


def test_avd_of_subset_matches_whole(grid3x3):
    G = build_oig(grid3x3)
    assert avd_of_subset(G, range(G.num_vertices), 1) == degree_stats(G, 1).avd
    assert avd_of_subset(G, [0], 1) == 0
    with pytest.raises(DomainError):
        avd_of_subset(G, [], 1)


def test_degree_stats_rejects_bad_k(square):
    with pytest.raises(DomainError):
        degree_stats(build_oig(square), 0)


# --- Maximal average degree ---

@pytest.mark.parametrize("k, d", [(1, 1), (1, 2), (2, 2)])
def test_maximal_avd_of_grid(k, d):
    result = maximal_avd(generate_grid(d, k + 1), k)
    assert result.value == d
    assert result.exhaustive


def test_maximal_avd_singleton(singleton):
    assert maximal_avd(singleton, 1).value == 0


def test_maximal_avd_square(square):
    result = maximal_avd(square, 1)
    assert result.value == 2
    assert result.witness == square


def test_maximal_avd_core_shortcut():
    result = maximal_avd(generate_grid(4, 2), 1, cap=100)
    assert result.value == 4
    assert result.exhaustive


def test_maximal_avd_local_search():
    H = HypothesisClass(2, 2, ((1, 1), (1, 2), (2, 2)))
    exact = maximal_avd(H, 1)
    assert exact.value == Fraction(4, 3)
    searched = maximal_avd(H, 1, cap=5)
    assert not searched.exhaustive
    assert searched.value == Fraction(4, 3)


def test_maximal_avd_dominates_whole_class(random_classes):
    for H in random_classes(20, max_m=3, max_p=3, max_rows=12, seed=6):
        assert maximal_avd(H, 1).value >= degree_stats(build_oig(H), 1).avd


def test_maximal_avd_dominates_random_subsets(random_classes):
    rng = make_rng(50)
    for H in random_classes(30, max_m=4, max_p=3, max_rows=12, seed=51):
        G = build_oig(H)
        for k in (1, 2):
            best = maximal_avd(H, k)
            assert best.exhaustive
            for _ in range(10):
                size = int(rng.integers(1, len(H) + 1))
                subset = rng.choice(len(H), size=size, replace=False).tolist()
                assert best.value >= avd_of_subset(G, subset, k)


def test_avd_below_exponential_dimension_bound(random_classes):
    for H in random_classes(100, max_m=4, max_p=5, max_rows=40, seed=52):
        G = build_oig(H)
        for k in (1, 2):
            assert degree_stats(G, k).avd <= 4 * k * k * kexp_dimension(H, k).value


# --- Density ---

@pytest.mark.parametrize("k, d", [(1, 2), (2, 2), (1, 3)])
def test_density_of_grid(k, d):
    report = density_mu(generate_grid(d, k + 1), d, k)
    assert report.value == d
    assert report.exhaustive


def test_density_tracks_kds_shattering(example1_6_2):
    shattered = density_mu(example1_6_2, 3, 2)
    assert shattered.value == 3
    assert shattered.coords == (1, 2, 3)
    assert density_mu(example1_6_2, 4, 2).value < 4


def test_density_range(square):
    with pytest.raises(DomainError):
        density_mu(square, 3, 1)
    with pytest.raises(DomainError):
        density_mu(square, 0, 1)
