import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from meshfree import StencilError, find_closest_stencils
from meshfree.geometry.nodeset import NodeSet

from conftest import brute_force_knn


def cloud(n, d, seed, types=None):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (n, d))
    if types is None:
        types = np.ones(n, dtype=np.int64)
    return NodeSet(pts, types)


def test_matches_brute_force_random_cloud():
    nodes = cloud(60, 2, seed=0)
    out = find_closest_stencils(nodes, 7)
    pool = np.arange(60)
    for i in range(60):
        expect = brute_force_knn(nodes.positions, i, pool, 7)
        assert np.array_equal(out.stencil(i), expect), f"node {i}"


def test_self_comes_first():
    nodes = cloud(40, 3, seed=3)
    out = find_closest_stencils(nodes, 5)
    for i in range(40):
        assert out.stencil(i)[0] == i


def test_exact_ties_resolved_by_ascending_index():
    # integer grid: the 4 axis neighbors of an interior point are equidistant
    g = np.stack(np.meshgrid(np.arange(5.0), np.arange(5.0), indexing="ij"), axis=-1)
    nodes = NodeSet(g.reshape(-1, 2), np.ones(25, dtype=np.int64))
    out = find_closest_stencils(nodes, 4)
    pool = np.arange(25)
    for i in range(25):
        assert np.array_equal(out.stencil(i), brute_force_knn(nodes.positions, i, pool, 4))
    # center node 12: three slots after self, smallest-index neighbors win
    assert out.stencil(12).tolist() == [12, 7, 11, 13]


def test_for_which_limits_targets():
    types = np.ones(30, dtype=np.int64)
    types[:6] = -1
    nodes = cloud(30, 2, seed=1, types=types)
    out = find_closest_stencils(nodes, 4, for_which="interior")
    assert all(out.has_stencil(i) for i in range(6, 30))
    assert not any(out.has_stencil(i) for i in range(6))


def test_search_among_restricts_pool():
    types = np.ones(30, dtype=np.int64)
    types[:6] = -1
    nodes = cloud(30, 2, seed=2, types=types)
    out = find_closest_stencils(nodes, 4, search_among="interior")
    interior = set(range(6, 30))
    for i in range(30):
        members = set(out.stencil(i).tolist())
        assert members <= interior
    # a boundary target is not in the pool, so it cannot lead its stencil
    assert out.stencil(0)[0] != 0


def test_size_validation():
    nodes = cloud(10, 2, seed=0)
    with pytest.raises(StencilError):
        find_closest_stencils(nodes, 11)
    with pytest.raises(StencilError):
        find_closest_stencils(nodes, 0)


def test_stencil_matrix_view():
    nodes = find_closest_stencils(cloud(12, 2, seed=5), 4)
    mat = nodes.stencil_matrix()
    assert mat.shape == (12, 4)
    assert np.array_equal(mat[3], nodes.stencil(3))


@given(st.integers(0, 2**31 - 1), st.integers(1, 12), st.integers(2, 3))
def test_property_matches_brute_force(seed, n, d):
    nodes = cloud(16, d, seed=seed)
    out = find_closest_stencils(nodes, n)
    pool = np.arange(16)
    for i in range(16):
        assert np.array_equal(out.stencil(i), brute_force_knn(nodes.positions, i, pool, n))
