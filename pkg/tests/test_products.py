"""Tests for scaled sphere products and their sampled curvature data."""

import math

import numpy as np
import pytest

from conekit.products import (
    NormalRadiusEstimate,
    ProductLink,
    SphereFactor,
    as_link_data,
    curvature_model,
    hypersurface_factor,
    minimal_product,
    normal_radius,
    numeric_second_fundamental_form,
    replication_search,
)


def _clifford():
    return minimal_product([SphereFactor.round(1), SphereFactor.round(1)],
                           samples=40, seed=0)


def _simons():
    return minimal_product([SphereFactor.round(3), SphereFactor.round(3)],
                           samples=40, seed=0)


def test_sphere_factor_validation():
    f = SphereFactor.round(3)
    assert f.is_round and f.dim == 3 and f.ambient == 3
    with pytest.raises(ValueError):
        SphereFactor(dim=0, ambient=2)
    with pytest.raises(ValueError):
        SphereFactor(dim=3, ambient=2)
    with pytest.raises(ValueError, match="unit"):
        SphereFactor(dim=1, ambient=2, points=np.array([[1.0, 1.0, 0.0]]))
    pts = np.array([[1.0, 0.0, 0.0]])
    with pytest.raises(ValueError, match="orthogonal"):
        SphereFactor(dim=1, ambient=2, points=pts, normals=pts)


def test_minimal_product_assembly():
    link = minimal_product([SphereFactor.round(1), SphereFactor.round(3)],
                           samples=25, seed=3)
    assert link.k == 4 and link.ambient_sphere_dim == 5
    np.testing.assert_allclose(link.lambdas, [0.5, math.sqrt(3) / 2])
    pts = link.embedded_points()
    assert pts.shape == (25, 6)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
    assert [s.stop - s.start for s in link.block_slices] == [2, 4]
    tup = link.point_tuple(0)
    assert len(tup) == 2 and tup[0].size == 2 and tup[1].size == 4


def test_clifford_shape_matrix_eigenvalues():
    link = _clifford()
    xs = link.point_tuple(0)
    b = np.array([1.0, -1.0]) / math.sqrt(2)
    v = np.zeros(4)
    for i, sl in enumerate(link.block_slices):
        v[sl] = b[i] * xs[i]
    H = numeric_second_fundamental_form(link, xs, v)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(H)), [-1.0, 1.0],
                               atol=1e-6)


def test_unequal_product_principal_curvatures():
    # S^1 x S^3 scaled by (1/2, sqrt(3)/2): the single mixing normal has
    # shape eigenvalues -sqrt(3) on the circle block and 1/sqrt(3) thrice
    link = minimal_product([SphereFactor.round(1), SphereFactor.round(3)],
                           samples=10, seed=4)
    lam = link.lambdas
    xs = link.point_tuple(2)
    b = np.array([lam[1], -lam[0]])
    v = np.zeros(link.ambient_sphere_dim + 1)
    for i, sl in enumerate(link.block_slices):
        v[sl] = b[i] * xs[i]
    H = numeric_second_fundamental_form(link, xs, v)
    eigs = np.sort(np.linalg.eigvalsh(H))
    expected = [-math.sqrt(3), 1 / math.sqrt(3), 1 / math.sqrt(3),
                1 / math.sqrt(3)]
    np.testing.assert_allclose(eigs, expected, atol=1e-6)
    # minimality: every shape matrix is trace free
    assert abs(np.trace(H)) < 1e-6


def test_sff_rejects_bad_normals():
    link = _clifford()
    xs = link.point_tuple(0)
    with pytest.raises(ValueError, match="unit"):
        numeric_second_fundamental_form(link, xs, np.zeros(4))
    x0 = link.embedded_points()[0]
    with pytest.raises(ValueError, match="orthogonal"):
        numeric_second_fundamental_form(link, xs, x0)


def test_curvature_model_clifford():
    model = curvature_model(_clifford(), point_samples=4, normal_samples=16)
    assert model.k == 2
    assert abs(model.alpha - math.sqrt(2)) < 1e-6
    assert abs(model.p2 + 1.0) < 1e-5
    for t in (0.0, 0.3, 0.7):
        assert abs(model.p_fn(t) - (1.0 - t * t)) < 1e-5


def test_curvature_model_equal_three_spheres():
    model = curvature_model(_simons(), point_samples=3, normal_samples=16)
    assert model.k == 6
    assert abs(model.alpha - math.sqrt(6)) < 1e-6
    # quadratic fit of (1 - t^2)^3 over the default window carries a small
    # quartic bias, so p2 is only good to about one percent
    assert abs(model.p2 + 3.0) < 1e-2
    assert abs(model.p_fn(0.5) - 0.421875) < 1e-5


def test_curvature_model_single_round_factor():
    link = minimal_product([SphereFactor.round(3)], samples=10, seed=5)
    model = curvature_model(link)
    assert model.alpha == 0.0 and model.p2 == 0.0 and model.p_fn(0.4) == 1.0


def test_normal_radius_clifford_is_quarter_pi():
    est = normal_radius(_clifford())
    assert isinstance(est, NormalRadiusEstimate)
    assert abs(float(est) - math.pi / 4) < 1e-6
    assert est.binding == "focal"
    assert abs(est.focal_bound - math.pi / 4) < 1e-6


def test_normal_radius_totally_geodesic_equator():
    link = minimal_product([SphereFactor.round(3)], samples=10, seed=6)
    est = normal_radius(link)
    assert abs(float(est) - math.pi / 2) < 1e-12


def test_hypersurface_factor_round_trip():
    link = _simons()
    factor = hypersurface_factor(link)
    assert factor.dim == link.k and factor.ambient == link.ambient_sphere_dim
    dots = np.sum(factor.points * factor.normals, axis=1)
    np.testing.assert_allclose(dots, 0.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(factor.normals, axis=1), 1.0,
                               atol=1e-12)
    triple = minimal_product([SphereFactor.round(1)] * 3, samples=5, seed=7)
    with pytest.raises(ValueError, match="two-factor"):
        hypersurface_factor(triple)


def test_as_link_data_bundles_inputs():
    link = _clifford()
    data = as_link_data(link, point_samples=3, normal_samples=8)
    assert data.k == 2
    assert abs(data.alpha - math.sqrt(2)) < 1e-6
    assert abs(data.normal_radius - math.pi / 4) < 1e-6
    assert abs(data.p_fn(0.5) - 0.75) < 1e-5


def test_replication_search_small_products_fail():
    # a few circles are far too curved relative to their normal radius
    out = replication_search(SphereFactor.round(1), 4, "F", seed=0,
                             samples=40)
    assert out["n_pass"] is None
    assert [n for n, _ in out["verdicts"]] == [2, 3, 4]
    assert all(not v.passes for _, v in out["verdicts"])
    with pytest.raises(ValueError):
        replication_search(SphereFactor.round(1), 1)
