"""Numerical certification of the toolkit's structural claims: local-error
order, Jacobian determinants against finite differences, self-adjointness and
involution properties, propagator ESJD algebra, and the robustness of the
Lagrangian methods to misspecified metric derivatives."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .diagnostics import ks_ergodicity
from .geometry import RiemannianTarget
from .integrators import (
    IntegratorConfig,
    generalized_leapfrog_step,
    integrate_trajectory,
    inverted_lagrangian_leapfrog_step,
    inverted_leapfrog_step,
    lagrangian_leapfrog_step,
    standard_leapfrog_step,
)
from .models import GeodesicModel, MisspecifiedModel
from .sampler import run_chain

_VELOCITY_STEPPERS = (lagrangian_leapfrog_step, inverted_lagrangian_leapfrog_step)

# Euclidean twin of each metric-aware stepper, for degeneracy checks.
_EUCLIDEAN_TWINS = {
    lagrangian_leapfrog_step: standard_leapfrog_step,
    inverted_lagrangian_leapfrog_step: inverted_leapfrog_step,
    generalized_leapfrog_step: standard_leapfrog_step,
}

DEFAULT_ORDER_GRID = tuple(2.0 ** (-k) for k in range(4, 13))


# ---------------------------------------------------------------------------
# local-error order study


@dataclass
class OrderStudyResult:
    step_sizes: np.ndarray
    local_errors: np.ndarray  # squared errors ||dq||^2 + ||dv||^2
    fitted_slope: float  # slope of the (non-squared) error on log-log axes
    degenerate: bool  # errors at float noise; the fit is meaningless


def run_order_study(stepper, eps_grid=None, model=None, initial=(1.0, 1.0)):
    """Single-step local error against an exact flow, by default the geodesic
    system started from (q, p) = (1, 1).

    One integrator step per step size; the recorded quantity is the squared
    error, and the fitted slope is halved so it reports the error itself
    (expected 3 for the third-order-accurate steps). Implicit solves run at
    tolerance 1e-14 so the fixed-point residual stays far below the measured
    error at the smallest step size. Any model exposing exact_flow(q0, p0, t)
    can substitute for the geodesic one.
    """
    if eps_grid is None:
        eps_grid = DEFAULT_ORDER_GRID
    eps_grid = np.asarray(sorted(eps_grid, reverse=True), dtype=float)
    if model is None:
        model = GeodesicModel()
    target = RiemannianTarget(model)
    q0, p0 = float(initial[0]), float(initial[1])
    errors = np.empty(eps_grid.shape[0])
    for i, eps in enumerate(eps_grid):
        cfg = IntegratorConfig(
            step_size=float(eps), fixed_point_tol=1e-14, fixed_point_max_iters=500
        )
        state = target.point([q0], p=[p0])
        result = stepper(target, state, cfg)
        q_exact, v_exact = model.exact_flow(q0, p0, float(eps))
        dq = float(result.next.q[0]) - q_exact
        dv = float(result.next.v[0]) - v_exact
        errors[i] = dq * dq + dv * dv
    degenerate = bool((errors < 1e-24).all())
    if degenerate:
        slope = math.nan
    else:
        fit = np.polyfit(np.log(eps_grid), np.log(errors), 1)
        slope = 0.5 * float(fit[0])
    return OrderStudyResult(eps_grid, errors, slope, degenerate)


def euler_step(target, state, cfg):
    """First-order explicit Euler in velocity form; slope-fit calibration only."""
    from .integrators import StepResult

    eps = cfg.step_size
    q = state.q
    v = state.v
    m = target.dim
    accel = -((v @ state.gamma_flat).reshape(m, m) @ v)  # Gamma contracted twice
    accel -= linalg.plu_solve(state.metric_plu, state.grad_potential)
    nxt = target.point(q + eps * v)
    nxt.set_velocity(v + eps * accel)
    return StepResult(nxt, 0.0, 0, False)


# ---------------------------------------------------------------------------
# finite-difference Jacobian oracle


@dataclass
class JacobianCheckResult:
    analytic_log_abs_det: float
    fd_log_abs_det: float
    rel_error: float


def finite_difference_jacobian(target, q, p, cfg, stepper, h=1e-6):
    """Central-difference log |det| of one step's (q, p) -> (q_new, p_new) map.

    The map includes the Legendre conversions at both ends for velocity-based
    steppers, which is exactly what their analytic Jacobian accounts for.
    Columns are Richardson-extrapolated from probes at h and h/2, pushing the
    truncation error below the roundoff floor.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    m = q.shape[0]

    def apply(qi, pi):
        result = stepper(target, target.point(qi, p=pi), cfg)
        if result.diverged:
            raise RuntimeError("stepper diverged inside the Jacobian oracle")
        return np.concatenate([result.next.q, result.next.p]), result.log_abs_jacobian

    def column(base, j, width):
        bump = np.zeros(2 * m)
        bump[j] = width
        hi = base + bump
        lo = base - bump
        out_hi, _ = apply(hi[:m], hi[m:])
        out_lo, _ = apply(lo[:m], lo[m:])
        return (out_hi - out_lo) / (2.0 * width)

    base = np.concatenate([q, p])
    _, analytic = apply(q, p)
    jac = np.empty((2 * m, 2 * m))
    for j in range(2 * m):
        coarse = column(base, j, h)
        fine = column(base, j, 0.5 * h)
        jac[:, j] = (4.0 * fine - coarse) / 3.0
    fd, _ = linalg.log_abs_det(jac)
    rel = abs(analytic - fd) / max(abs(fd), 1e-12)
    return JacobianCheckResult(analytic, fd, rel)


def scaled_rel_error(check, floor=1e-3):
    """Relative error with the denominator floored at a meaningful scale.

    The raw rel_error field divides by |fd| no matter how small; log |det|
    crosses zero along any non-volume-preserving orbit, so thresholding that
    ratio punishes exactly the states where both numbers vanish together.
    Below the floor this becomes an absolute comparison at floor * tolerance.
    """
    return abs(check.analytic_log_abs_det - check.fd_log_abs_det) / max(
        abs(check.fd_log_abs_det), floor
    )


# ---------------------------------------------------------------------------
# structure-property suite


@dataclass
class PropertySuiteResult:
    self_adjoint_residual: float
    involution_residual: float
    euclidean_residual: Optional[float]
    energy_halving_ratio: float
    passed: bool
    failures: list = field(default_factory=list)


def _native_state(result_point, velocity_native):
    if velocity_native:
        return result_point.q, result_point.v
    return result_point.q, result_point.p


def run_property_suite(
    stepper,
    target,
    cfg,
    trials=100,
    seed=0,
    self_adjoint_tol=1e-10,
    involution_tol=1e-8,
    euclidean_tol=1e-12,
):
    """Randomized checks of the step map's structure.

    Per trial: self-adjointness (a forward step then a negated-step returns the
    start state) and the involution property of flip-after-k-steps applied
    twice. When the target is Euclidean, the stepper must degenerate to its
    Euclidean twin. One extra trajectory measures the energy-error halving
    ratio, expected near 4 for the second-order step maps. States are drawn
    from the model's reference sampler when it has one, with momenta refreshed
    from N(0, G(q)).
    """
    if not isinstance(target, RiemannianTarget):
        target = RiemannianTarget(target)
    rng = np.random.default_rng(seed)
    velocity_native = stepper in _VELOCITY_STEPPERS
    model = target.model
    if hasattr(model, "reference_sampler"):
        positions = model.reference_sampler(trials, rng)
    else:
        positions = 0.5 * rng.standard_normal((trials, target.dim))

    back_cfg = IntegratorConfig(
        -cfg.step_size, cfg.num_steps, cfg.fixed_point_tol, cfg.fixed_point_max_iters
    )
    twin = _EUCLIDEAN_TWINS.get(stepper)
    failures = []
    max_self = 0.0
    max_invol = 0.0
    max_eucl = 0.0 if (target.euclidean and twin is not None) else None

    for q0 in positions:
        point = target.point(q0)
        chol = point.metric_chol
        p0 = chol @ rng.standard_normal(target.dim)
        point.set_momentum(p0)
        ref_q, ref_w = _native_state(point, velocity_native)
        ref_w = ref_w.copy()

        forward = stepper(target, point, cfg)
        if forward.diverged:
            failures.append("diverged during self-adjointness check")
            continue
        back = stepper(target, forward.next, back_cfg)
        if back.diverged:
            failures.append("diverged during self-adjointness check")
            continue
        bq, bw = _native_state(back.next, velocity_native)
        res = max(np.abs(bq - ref_q).max(), np.abs(bw - ref_w).max())
        max_self = max(max_self, res)

        point = target.point(q0, p=p0)
        first = integrate_trajectory(target, point, cfg, stepper)
        if first.diverged:
            failures.append("diverged during involution check")
            continue
        first.next.flip_momentum()
        second = integrate_trajectory(target, first.next, cfg, stepper)
        if second.diverged:
            failures.append("diverged during involution check")
            continue
        second.next.flip_momentum()
        iq, iw = _native_state(second.next, velocity_native)
        res = max(np.abs(iq - ref_q).max(), np.abs(iw - ref_w).max())
        max_invol = max(max_invol, res)

        if max_eucl is not None:
            ours = stepper(target, target.point(q0, p=p0), cfg)
            theirs = twin(target, target.point(q0, p=p0), cfg)
            res = max(
                np.abs(ours.next.q - theirs.next.q).max(),
                np.abs(ours.next.p - theirs.next.p).max(),
            )
            max_eucl = max(max_eucl, res)

    ratio = _energy_halving_ratio(stepper, target, cfg, positions[0], rng)

    if max_self > self_adjoint_tol:
        failures.append("self-adjointness residual %.3e" % max_self)
    if max_invol > involution_tol:
        failures.append("involution residual %.3e" % max_invol)
    if max_eucl is not None and max_eucl > euclidean_tol:
        failures.append("euclidean degeneracy residual %.3e" % max_eucl)
    if not (3.5 <= ratio <= 4.5):
        failures.append("energy halving ratio %.3f" % ratio)
    return PropertySuiteResult(
        self_adjoint_residual=max_self,
        involution_residual=max_invol,
        euclidean_residual=max_eucl,
        energy_halving_ratio=ratio,
        passed=not failures,
        failures=failures,
    )


def _max_energy_drift(stepper, target, cfg, q0, p0):
    point = target.point(q0, p=p0)
    h0 = target.hamiltonian(point)
    worst = 0.0
    for _ in range(cfg.num_steps):
        result = stepper(target, point, cfg)
        if result.diverged:
            return math.nan
        point = result.next
        worst = max(worst, abs(target.hamiltonian(point) - h0))
    return worst


def _energy_halving_ratio(stepper, target, cfg, q0, rng):
    # Measured at a quarter of the working step size; at the working size the
    # O(eps^4) remainder still shifts the ratio visibly away from 4.
    point = target.point(q0)
    p0 = point.metric_chol @ rng.standard_normal(target.dim)
    coarse_cfg = IntegratorConfig(
        0.25 * cfg.step_size,
        cfg.num_steps,
        cfg.fixed_point_tol,
        cfg.fixed_point_max_iters,
    )
    coarse = _max_energy_drift(stepper, target, coarse_cfg, q0, p0)
    half_cfg = IntegratorConfig(
        0.5 * coarse_cfg.step_size,
        2 * coarse_cfg.num_steps,
        cfg.fixed_point_tol,
        cfg.fixed_point_max_iters,
    )
    fine = _max_energy_drift(stepper, target, half_cfg, q0, p0)
    if not (math.isfinite(coarse) and math.isfinite(fine)) or fine == 0.0:
        return math.nan
    return coarse / fine


# ---------------------------------------------------------------------------
# stationary one-step ESJD, measured

def one_step_esjd_empirical(omega, eps, method, draws, rng):
    """Monte Carlo E[(q_new - q)^2]: one (inverted) leapfrog step applied to
    stationary draws of the harmonic oscillator, no accept step.

    The update arithmetic is applied to the whole draw vector at once; the
    scalar steppers are pinned to the same maps by the propagator tests.
    """
    q = rng.standard_normal(draws) / omega
    p = rng.standard_normal(draws)
    w2 = omega * omega
    if method == "leapfrog":
        p_half = p - 0.5 * eps * w2 * q
        q_new = q + eps * p_half
    elif method == "inverted":
        q_mid = q + 0.5 * eps * p
        p_new = p - eps * w2 * q_mid
        q_new = q_mid + 0.5 * eps * p_new
    else:
        raise ValueError("unknown method %r" % (method,))
    d = q_new - q
    return float(d @ d) / draws


# ---------------------------------------------------------------------------
# robustness to misspecified metric derivatives


@dataclass
class RobustnessResult:
    per_method: dict  # method -> {"ks_mean", "acceptance_rate", "ks_stats"}
    ordering_ok: bool  # rmhmc degraded past both Lagrangian methods


def run_robustness_experiment(
    base_model, delta, chain_cfgs, reference_draws=100000, ref_seed=2024, ks_seed=7
):
    """Sample the true target through a model whose metric partials are scaled
    by (1 + delta), then score every chain against the exact reference.

    The misspecification changes only the reported dG/dq_k, so the target
    density (and its i.i.d. reference sampler) are untouched; what differs is
    whether each method's acceptance correction stays valid. All methods see
    the identical projection directions.
    """
    wrong = MisspecifiedModel(base_model, delta)
    target = RiemannianTarget(wrong)
    reference = base_model.reference_sampler(
        reference_draws, np.random.default_rng(ref_seed)
    )
    per_method = {}
    for cfg in chain_cfgs:
        samples, records = run_chain(target, cfg)
        stats = ks_ergodicity(
            samples, reference, 100, np.random.default_rng(ks_seed)
        )
        accepted = sum(1 for r in records if r.accepted) / len(records)
        per_method[cfg.method] = {
            "ks_mean": float(stats.mean()),
            "acceptance_rate": accepted,
            "ks_stats": stats,
        }
    ordering_ok = False
    if {"rmhmc", "lmc", "ilmc"} <= per_method.keys():
        rm = per_method["rmhmc"]["ks_mean"]
        ordering_ok = (
            rm > per_method["lmc"]["ks_mean"] and rm > per_method["ilmc"]["ks_mean"]
        )
    return RobustnessResult(per_method, ordering_ok)
