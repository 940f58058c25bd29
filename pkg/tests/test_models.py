"""Target catalog: densities, metrics, reference samplers, propagator algebra."""

import math
import os

import numpy as np
import pytest

from geomc import linalg
from geomc.geometry import finite_difference_partials
from geomc.models import (
    BananaModel,
    FlatMetric,
    GeodesicModel,
    GridUnderflowError,
    HarmonicModel,
    LogisticModel,
    MisspecifiedModel,
    StudentTModel,
    UnstableRegimeError,
    k_step_esjd_from_propagators,
    load_logistic_csv,
    make_banana_data,
    make_logistic_data,
    one_step_esjd_closed_form,
    propagator_matrix,
)


def fd_gradient(fun, q, h=1e-6):
    grad = np.empty(q.size)
    for k in range(q.size):
        step = np.zeros(q.size)
        step[k] = h
        grad[k] = (fun(q + step) - fun(q - step)) / (2.0 * h)
    return grad


def assert_model_derivatives(model, q):
    grad = model.grad_log_density(q)
    fd = fd_gradient(model.log_density, q)
    scale = 1.0 + np.abs(fd).max()
    assert np.abs(grad - fd).max() / scale < 1e-6

    partials = model.metric_partials(q)
    fd_parts = finite_difference_partials(model, q)
    scale = 1.0 + np.abs(fd_parts).max()
    assert np.abs(partials - fd_parts).max() / scale < 1e-5


def assert_spd_everywhere(model, count=1000, seed=0, spread=2.0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        q = spread * rng.standard_normal(model.dim)
        g = model.metric(q)
        np.testing.assert_allclose(g, g.T, atol=1e-10)
        linalg.cholesky_factorize(g)  # raises if not PD


# ---------------------------------------------------------------------------
# banana posterior


@pytest.fixture(scope="module")
def banana():
    return BananaModel.default()


def test_banana_fixture_matches_generator(banana):
    regenerated = BananaModel(make_banana_data())
    assert regenerated.n == banana.n == 100
    assert regenerated.sum_y == pytest.approx(banana.sum_y, rel=1e-12)
    assert regenerated.sum_y_sq == pytest.approx(banana.sum_y_sq, rel=1e-12)


def test_banana_derivatives(banana):
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert_model_derivatives(banana, rng.standard_normal(2))


def test_banana_metric_spd(banana):
    assert_spd_everywhere(banana)


def test_banana_log_density_finite_far_out(banana):
    assert np.isfinite(banana.log_density(np.array([80.0, -40.0])))


def test_banana_marginal_cdf_endpoints(banana):
    grid, cdf = banana._marginal_table()
    assert cdf[0] == 0.0
    assert abs(cdf[-1] - 1.0) < 1e-10
    assert np.all(np.diff(cdf) >= 0.0)


def test_banana_conditional_matches_quadrature(banana):
    # integrate theta1 out of the joint at fixed theta2 and compare moments
    t2 = 0.7
    tau = banana.n / banana.sigma_sq_y + 1.0 / banana.sigma_sq_theta
    mean_closed = (banana.sum_y - banana.n * t2 * t2) / (banana.sigma_sq_y * tau)

    t1_grid = np.linspace(mean_closed - 8.0 / math.sqrt(tau),
                          mean_closed + 8.0 / math.sqrt(tau), 4001)
    log_joint = np.array(
        [banana.log_density(np.array([t1, t2])) for t1 in t1_grid]
    )
    dens = np.exp(log_joint - log_joint.max())
    dens /= np.trapezoid(dens, t1_grid)
    mean_quad = np.trapezoid(t1_grid * dens, t1_grid)
    var_quad = np.trapezoid((t1_grid - mean_quad) ** 2 * dens, t1_grid)

    assert mean_quad == pytest.approx(mean_closed, abs=1e-8)
    assert var_quad == pytest.approx(1.0 / tau, rel=1e-6)


def test_banana_reference_sampler_conditional_law(banana):
    rng = np.random.default_rng(1)
    draws = banana.reference_sampler(200_000, rng)
    t1, t2 = draws[:, 0], draws[:, 1]
    band = np.abs(t2 - 0.7) < 0.02
    assert band.sum() > 2000
    tau = banana.n / banana.sigma_sq_y + 1.0 / banana.sigma_sq_theta
    mean_closed = (banana.sum_y - banana.n * 0.49) / (banana.sigma_sq_y * tau)
    assert t1[band].mean() == pytest.approx(mean_closed, abs=0.02)
    assert t1[band].var() == pytest.approx(1.0 / tau, rel=0.25)


def test_banana_reference_batches_agree(banana):
    from geomc.diagnostics import ks_ergodicity

    rng = np.random.default_rng(2)
    a = banana.reference_sampler(100_000, rng)
    b = banana.reference_sampler(100_000, rng)
    stats = ks_ergodicity(a, b, rng=np.random.default_rng(3))
    assert np.mean(stats) < 0.01


def test_banana_grid_underflow(banana):
    distant = BananaModel(np.full(100, 150.0))
    with pytest.raises(GridUnderflowError):
        distant.reference_sampler(10, np.random.default_rng(0))


# ---------------------------------------------------------------------------
# logistic regression


def test_logistic_shapes_and_derivatives():
    model = LogisticModel(*make_logistic_data(60, 4, seed=3))
    assert model.dim == 4
    rng = np.random.default_rng(4)
    for _ in range(5):
        assert_model_derivatives(model, 0.5 * rng.standard_normal(4))


def test_logistic_metric_spd():
    model = LogisticModel(*make_logistic_data(60, 4, seed=3))
    assert_spd_everywhere(model, count=200, seed=5)


def test_logistic_metric_closed_form():
    x, y = make_logistic_data(30, 3, seed=6)
    model = LogisticModel(x, y)
    beta = np.array([0.2, -0.4, 0.1])
    z = 1.0 / (1.0 + np.exp(-(x @ beta)))
    expected = x.T @ (x * (z * (1.0 - z))[:, None]) + model.alpha * np.eye(3)
    np.testing.assert_allclose(model.metric(beta), expected, rtol=1e-12)


def test_logistic_csv_round_trip(tmp_path):
    x, y = make_logistic_data(20, 3, seed=7)
    path = os.path.join(tmp_path, "data.csv")
    header = ",".join([f"x{j}" for j in range(3)] + ["label"])
    body = np.column_stack([x, y])
    np.savetxt(path, body, delimiter=",", header=header, comments="")
    x2, y2 = load_logistic_csv(path)
    np.testing.assert_allclose(x2, x, rtol=1e-12)
    np.testing.assert_array_equal(y2, y)


# ---------------------------------------------------------------------------
# student-t


@pytest.fixture(scope="module")
def student():
    return StudentTModel()


def test_student_t_defaults(student):
    assert student.dim == 20
    assert student.dof == 5e3
    assert student.sigma_sq == 1e2


def test_student_t_log_density_displays(student):
    # differences of log densities depend only on the quadratic form
    rng = np.random.default_rng(8)
    x = rng.standard_normal(20)
    y = rng.standard_normal(20)
    sigma_inv = np.ones(20)
    sigma_inv[-1] = 1.0 / student.sigma_sq
    form = lambda u: float(u * sigma_inv @ u)
    expected = -0.5 * (student.dof + 20) * (
        math.log1p(form(x) / student.dof) - math.log1p(form(y) / student.dof)
    )
    assert student.log_density(x) - student.log_density(y) == pytest.approx(
        expected, rel=1e-12
    )


def test_student_t_derivatives(student):
    rng = np.random.default_rng(9)
    for _ in range(3):
        assert_model_derivatives(student, rng.standard_normal(20))


def test_student_t_metric_spd(student):
    assert_spd_everywhere(student, count=100, seed=10, spread=5.0)


def test_student_t_reference_moments(student):
    rng = np.random.default_rng(11)
    draws = student.reference_sampler(100_000, rng)
    cov = np.cov(draws.T)
    diag = np.diag(cov)
    expected = np.ones(20)
    expected[-1] = student.sigma_sq
    # eta/(eta-2) correction is 1.0004 at eta=5e3, invisible at this tolerance
    assert np.abs(diag / expected - 1.0).max() < 0.05
    three_sigma = 3.0 * np.sqrt(expected / draws.shape[0])
    assert np.all(np.abs(draws.mean(axis=0)) < three_sigma)


# ---------------------------------------------------------------------------
# geodesic and harmonic closed forms


def test_geodesic_exact_flow():
    q, v = GeodesicModel.exact_flow(1.0, 1.0, 0.3)
    assert q == pytest.approx(math.exp(0.3), rel=1e-15)
    assert v == pytest.approx(math.exp(0.3), rel=1e-15)
    q, v = GeodesicModel.exact_flow(2.0, 0.5, 0.1)
    assert q == pytest.approx(2.0 * math.exp(0.1), rel=1e-15)
    assert v == pytest.approx(2.0 * math.exp(0.1), rel=1e-15)


def test_geodesic_metric_and_partials():
    model = GeodesicModel()
    q = np.array([2.0])
    assert model.metric(q)[0, 0] == pytest.approx(0.25, rel=1e-15)
    assert model.metric_partials(q)[0, 0, 0] == pytest.approx(-0.25, rel=1e-12)


def test_geodesic_target_potential_vanishes():
    # log density is chosen to cancel the half-log-det term exactly
    from geomc.geometry import RiemannianTarget

    target = RiemannianTarget(GeodesicModel())
    for q in (0.5, 1.0, 3.7):
        point = target.point(np.array([q]))
        assert point.potential == pytest.approx(0.0, abs=1e-14)
        assert np.abs(point.grad_potential).max() < 1e-12


def test_harmonic_exact_flow_round_trip():
    model = HarmonicModel(omega=1.7)
    q, v = model.exact_flow(0.8, -0.3, 0.47)
    q0, v0 = model.exact_flow(q, v, -0.47)
    assert q0 == pytest.approx(0.8, rel=1e-12)
    assert v0 == pytest.approx(-0.3, rel=1e-12)


def test_harmonic_stationary_law():
    model = HarmonicModel(omega=2.0)
    rng = np.random.default_rng(12)
    draws = model.reference_sampler(50_000, rng)
    assert draws[:, 0].std() == pytest.approx(0.5, rel=0.03)


# ---------------------------------------------------------------------------
# wrappers


def test_flat_metric_wraps_density_only(banana):
    flat = FlatMetric(banana)
    q = np.array([0.4, -0.9])
    assert flat.euclidean
    assert flat.log_density(q) == banana.log_density(q)
    np.testing.assert_array_equal(flat.metric(q), np.eye(2))
    assert np.abs(flat.metric_partials(q)).max() == 0.0


def test_misspecified_zero_delta_is_identity(banana):
    wrapped = MisspecifiedModel(banana, delta=0.0)
    q = np.array([0.3, 0.8])
    np.testing.assert_array_equal(wrapped.metric_partials(q), banana.metric_partials(q))


def test_misspecified_partials_break_derivative_link(banana):
    wrapped = MisspecifiedModel(banana, delta=0.3)
    q = np.array([0.3, 0.8])
    np.testing.assert_array_equal(wrapped.metric(q), banana.metric(q))
    assert wrapped.log_density(q) == banana.log_density(q)
    perturbed = wrapped.metric_partials(q)
    np.testing.assert_allclose(perturbed, 1.3 * banana.metric_partials(q), rtol=1e-15)
    for k in range(2):
        np.testing.assert_array_equal(perturbed[k], perturbed[k].T)
    true_parts = finite_difference_partials(banana, q)
    assert np.abs(perturbed - true_parts).max() > 1e-3


def test_misspecified_selected_indices(banana):
    wrapped = MisspecifiedModel(banana, delta=0.5, indices=(1,))
    q = np.array([-0.2, 1.1])
    parts = wrapped.metric_partials(q)
    base = banana.metric_partials(q)
    np.testing.assert_array_equal(parts[0], base[0])
    np.testing.assert_allclose(parts[1], 1.5 * base[1], rtol=1e-15)


# ---------------------------------------------------------------------------
# harmonic propagator algebra


def test_propagator_entries():
    eps, omega = 0.5, 1.0
    x = eps * eps * omega * omega
    leap = propagator_matrix(omega, eps, "leapfrog")
    np.testing.assert_allclose(
        leap,
        [[1.0 - x / 2.0, eps], [-eps * omega * omega * (1.0 - x / 4.0), 1.0 - x / 2.0]],
        rtol=1e-15,
    )
    inv = propagator_matrix(omega, eps, "inverted")
    np.testing.assert_allclose(
        inv,
        [[1.0 - x / 2.0, eps * (1.0 - x / 4.0)], [-eps * omega * omega, 1.0 - x / 2.0]],
        rtol=1e-15,
    )


def test_propagators_have_unit_determinant():
    for method in ("leapfrog", "inverted"):
        for eps in (0.1, 0.9, 1.7):
            mat = propagator_matrix(1.0, eps, method)
            assert np.linalg.det(mat) == pytest.approx(1.0, abs=1e-14)


def test_one_step_esjd_free_particle_limit():
    assert one_step_esjd_closed_form(0.0, 0.7, "leapfrog") == pytest.approx(0.49)
    assert one_step_esjd_closed_form(0.0, 0.7, "inverted") == pytest.approx(0.49)


def test_one_step_esjd_unit_values():
    # the inverted value follows the stationary covariance of its propagator,
    # (M00 - 1)^2/omega^2 + M01^2, not the naive unsquared drift term
    assert one_step_esjd_closed_form(1.0, 1.0, "leapfrog") == pytest.approx(1.25)
    assert one_step_esjd_closed_form(1.0, 1.0, "inverted") == pytest.approx(0.8125)
    mat = propagator_matrix(1.0, 1.0, "inverted")
    derived = (mat[0, 0] - 1.0) ** 2 + mat[0, 1] ** 2
    assert one_step_esjd_closed_form(1.0, 1.0, "inverted") == pytest.approx(
        derived, abs=1e-14
    )


def test_one_step_esjd_matches_k_one():
    for method in ("leapfrog", "inverted"):
        for eps in (0.3, 1.1, 1.8):
            closed = one_step_esjd_closed_form(1.0, eps, method)
            from_prop = k_step_esjd_from_propagators(1.0, eps, 1, method)
            assert from_prop == pytest.approx(closed, abs=1e-12)


def test_k_step_esjd_ballistic_limit():
    value = k_step_esjd_from_propagators(1.0, 1e-3, 50, "leapfrog")
    assert value == pytest.approx((50 * 1e-3) ** 2, rel=1e-2)


def test_unstable_regime_raises():
    with pytest.raises(UnstableRegimeError):
        one_step_esjd_closed_form(1.0, 2.0, "leapfrog")
    with pytest.raises(UnstableRegimeError):
        k_step_esjd_from_propagators(2.0, 1.0, 3, "inverted")
