import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rulsif.errors import DataError, DegenerateGeometryError, DimensionMismatchError
from rulsif.kernel import (
    KernelSpec,
    as_samples,
    gaussian_kernel,
    kernel_matrix,
    median_pairwise_distance,
    select_center_indices,
    select_centers,
)

coords = st.floats(-50, 50, allow_nan=False)
widths = st.floats(0.05, 20.0)


def point_sets(min_rows=1, max_rows=12, dim=2):
    return arrays(np.float64, st.tuples(st.integers(min_rows, max_rows), st.just(dim)), elements=coords)


def test_kernel_at_identical_points_is_one():
    assert gaussian_kernel([0.0, 0.0], [0.0, 0.0], 1.0) == 1.0


@pytest.mark.parametrize("sigma", [0.3, 1.0, 7.5])
def test_kernel_one_over_e_at_sigma_root_two(sigma):
    assert gaussian_kernel([0.0], [sigma * math.sqrt(2.0)], sigma) == pytest.approx(math.exp(-1.0), rel=1e-14)


@given(st.lists(coords, min_size=3, max_size=3), st.lists(coords, min_size=3, max_size=3), widths)
def test_kernel_symmetric_and_bounded(x, c, sigma):
    k = gaussian_kernel(x, c, sigma)
    assert k == gaussian_kernel(c, x, sigma)
    assert 0.0 <= k <= 1.0


def test_kernel_rejects_bad_width():
    with pytest.raises(ValueError):
        gaussian_kernel([0.0], [0.0], 0.0)
    with pytest.raises(ValueError):
        KernelSpec(-1.0, np.zeros((1, 1)))


def test_kernel_rejects_mismatched_vectors():
    with pytest.raises(DimensionMismatchError):
        gaussian_kernel([0.0, 1.0], [0.0], 1.0)


def test_kernel_matrix_single_point():
    np.testing.assert_array_equal(kernel_matrix([[2.0]], KernelSpec(1.0, [[2.0]])), [[1.0]])


def test_kernel_matrix_two_points():
    got = kernel_matrix([[0.0], [1.0]], KernelSpec(1.0, [[0.0]]))
    np.testing.assert_allclose(got, [[1.0], [math.exp(-0.5)]], rtol=1e-15)


def test_kernel_matrix_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        kernel_matrix(np.zeros((3, 2)), KernelSpec(1.0, np.zeros((1, 3))))


@given(point_sets(), widths)
def test_kernel_matrix_self_has_unit_diagonal(points, sigma):
    k = kernel_matrix(points, KernelSpec(sigma, points))
    np.testing.assert_array_equal(np.diag(k), 1.0)
    assert np.all(k >= 0.0) and np.all(k <= 1.0)


@given(point_sets(), widths, st.lists(st.floats(-100, 100), min_size=2, max_size=2))
def test_kernel_matrix_translation_invariant(points, sigma, shift):
    k0 = kernel_matrix(points, KernelSpec(sigma, points[:3]))
    moved = points + np.asarray(shift)
    k1 = kernel_matrix(moved, KernelSpec(sigma, moved[:3]))
    np.testing.assert_allclose(k0, k1, atol=1e-9)


def test_median_of_three_points():
    assert median_pairwise_distance([[0.0], [1.0], [3.0]]) == 2.0


def test_median_of_two_points():
    assert median_pairwise_distance([[0.0, 0.0], [3.0, 4.0]]) == 5.0


def test_median_even_count_averages_middle_pair():
    # distances 1, 2, 4, 1, 3, 2 -> sorted 1 1 2 2 3 4 -> median 2
    assert median_pairwise_distance([[0.0], [1.0], [2.0], [4.0]]) == 2.0


def test_median_errors():
    with pytest.raises(DataError):
        median_pairwise_distance([[1.0]])
    with pytest.raises(DegenerateGeometryError):
        median_pairwise_distance(np.ones((5, 2)))


grid_sets = arrays(
    np.float64, st.tuples(st.integers(2, 12), st.just(2)), elements=st.integers(-40, 40).map(lambda v: v / 4)
)


@given(grid_sets, st.lists(st.floats(-100, 100), min_size=2, max_size=2), st.floats(0.1, 10.0))
def test_median_translation_and_scale(points, shift, scale):
    try:
        m = median_pairwise_distance(points)
    except DegenerateGeometryError:
        return
    assert median_pairwise_distance(points + np.asarray(shift)) == pytest.approx(m, rel=1e-6, abs=1e-9)
    assert median_pairwise_distance(points * scale) == pytest.approx(m * scale, rel=1e-9)


def test_select_centers_keeps_small_sets_in_order(rng):
    x = rng.normal(size=(50, 2))
    np.testing.assert_array_equal(select_centers(x, 100, seed=3), x)


def test_select_centers_subsample_is_reproducible():
    a = select_center_indices(500, 100, seed=11)
    b = select_center_indices(500, 100, seed=11)
    c = select_center_indices(500, 100, seed=12)
    np.testing.assert_array_equal(a, b)
    assert len(set(a.tolist())) == 100 and len(set(c.tolist())) == 100
    assert a.min() >= 0 and a.max() < 500


def test_as_samples_shapes_and_validation():
    assert as_samples([1.0, 2.0, 3.0]).shape == (3, 1)
    with pytest.raises(DataError):
        as_samples([])
    with pytest.raises(DataError):
        as_samples([[1.0, np.nan]])
    with pytest.raises(DataError):
        as_samples(np.zeros((2, 2, 2)))
