"""The five single-step integrators and the trajectory composer.

Each stepper maps a phase point to a StepResult holding the new point, the
step's log |Jacobian| of the (q, p) -> (q_new, p_new) map, the fixed-point
iteration count (zero for explicit methods), and a divergence flag. The
symplectic maps (standard, inverted, generalized leapfrog) report a Jacobian
of exactly zero; the Lagrangian maps report the metric log-determinant ratio
plus their Omega determinants:

    Lagrangian:           4 Omega determinants per step
    inverted Lagrangian:  2 Omega determinants per step

A module-level counter records every Omega-determinant evaluation so tests can
audit those counts. Divergences are soft failures: fixed-point non-convergence,
singular (Id + Omega), a metric that stops being positive definite, non-finite
coordinates, or any coordinate beyond 1e10 all mark the result diverged and
leave the caller to reject the proposal.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .geometry import PhasePoint

COORD_LIMIT = 1e10
ENERGY_ERROR_LIMIT = 1e3

# Errors that signal a numerically invalid step rather than a caller bug.
_STEP_ERRORS = (
    linalg.SingularMatrixError,
    linalg.NotPositiveDefiniteError,
    ValueError,
    OverflowError,
    ZeroDivisionError,
)

_omega_det_count = 0


def omega_det_count():
    """Total Omega-determinant evaluations since the last reset."""
    return _omega_det_count


def reset_omega_det_count():
    global _omega_det_count
    _omega_det_count = 0


@dataclass
class IntegratorConfig:
    step_size: float
    num_steps: int = 1
    fixed_point_tol: float = 1e-6
    fixed_point_max_iters: int = 100


@dataclass
class StepResult:
    next: PhasePoint
    log_abs_jacobian: float
    fixed_point_iters: int
    diverged: bool


def _in_bounds(arr):
    # NaN compares false, so this also rejects non-finite coordinates
    if arr.shape[0] == 2:
        return bool(abs(arr[0]) < COORD_LIMIT) and bool(abs(arr[1]) < COORD_LIMIT)
    return bool((np.abs(arr) < COORD_LIMIT).all())


def _omega_log_det(mat):
    """log |det| of an (Id +/- c Omega) matrix; counted."""
    global _omega_det_count
    _omega_det_count += 1
    if mat.shape[0] == 2:
        d = float(mat[0, 0]) * float(mat[1, 1]) - float(mat[0, 1]) * float(mat[1, 0])
        if not abs(d) > linalg.PIVOT_TOL:  # also rejects NaN
            raise linalg.SingularMatrixError("Omega determinant underflow")
        return math.log(abs(d))
    val, _ = linalg.log_abs_det(mat)
    return val


def _omega_log_det_from_plu(factors):
    """Same accounting for a determinant read off an existing factorization."""
    global _omega_det_count
    _omega_det_count += 1
    val, _ = linalg.plu_log_abs_det(factors)
    return val


def standard_leapfrog_step(target, state, cfg):
    """Kick-drift-kick leapfrog for Euclidean metrics; volume preserving."""
    eps = cfg.step_size
    try:
        p_half = state.p - (0.5 * eps) * state.grad_potential
        q_new = state.q + eps * p_half
        nxt = target.point(q_new)
        p_new = p_half - (0.5 * eps) * nxt.grad_potential
    except _STEP_ERRORS:
        return StepResult(state, 0.0, 0, True)
    nxt.set_momentum(p_new)
    return StepResult(nxt, 0.0, 0, not (_in_bounds(q_new) and _in_bounds(p_new)))


def inverted_leapfrog_step(target, state, cfg):
    """Drift-kick-drift leapfrog: full kick at the position midpoint."""
    eps = cfg.step_size
    try:
        q_mid = state.q + (0.5 * eps) * state.p
        mid = target.point(q_mid)
        p_new = state.p - eps * mid.grad_potential
        q_new = q_mid + (0.5 * eps) * p_new
    except _STEP_ERRORS:
        return StepResult(state, 0.0, 0, True)
    nxt = target.point(q_new, p=p_new)
    return StepResult(nxt, 0.0, 0, not (_in_bounds(q_new) and _in_bounds(p_new)))


def _quad_form(partials, w):
    # component k is w^T (dG/dq_k) w
    return (partials @ w) @ w


def generalized_leapfrog_step(target, state, cfg):
    """Implicit leapfrog for Riemannian HMC in momentum coordinates.

    Half-kick and drift are fixed-point solves (initial iterates: the current
    momentum and position); the closing half-kick is explicit, evaluated
    entirely at the new position. Volume preserving up to the solve tolerance.
    """
    eps = cfg.step_size
    half = 0.5 * eps
    tol = cfg.fixed_point_tol
    max_iters = cfg.fixed_point_max_iters
    q = state.q
    p = state.p
    # a non-contracting fixed-point iteration overflows before it is cut off
    with np.errstate(over="ignore", invalid="ignore"):
        return _generalized_leapfrog_inner(target, state, q, p, half, tol, max_iters)


def _generalized_leapfrog_inner(target, state, q, p, half, tol, max_iters):
    try:
        grad_u = state.grad_potential
        plu = state.metric_plu
        partials = state.metric_partials

        # implicit half kick: p_half = p - (eps/2) dH/dq(q, p_half)
        p_half = p
        iters_kick = 0
        converged = False
        while iters_kick < max_iters:
            iters_kick += 1
            w = linalg.plu_solve(plu, p_half)
            candidate = p - half * (grad_u - 0.5 * _quad_form(partials, w))
            delta = np.abs(candidate - p_half).max()
            p_half = candidate
            if delta < tol:
                converged = True
                break
        if not converged:
            return StepResult(state, 0.0, iters_kick, True)

        # implicit drift: q_new = q + (eps/2)(G(q)^-1 + G(q_new)^-1) p_half
        v_here = linalg.plu_solve(plu, p_half)
        q_it = q
        iters_drift = 0
        converged = False
        while iters_drift < max_iters:
            iters_drift += 1
            there = target.point(q_it) if iters_drift > 1 else state
            candidate = q + half * (v_here + linalg.plu_solve(there.metric_plu, p_half))
            delta = np.abs(candidate - q_it).max()
            q_it = candidate
            if delta < tol:
                converged = True
                break
        if not converged or not _in_bounds(q_it):
            return StepResult(state, 0.0, max(iters_kick, iters_drift), True)

        # explicit half kick at the new position
        nxt = target.point(q_it)
        w_new = linalg.plu_solve(nxt.metric_plu, p_half)
        p_new = p_half - half * (
            nxt.grad_potential - 0.5 * _quad_form(nxt.metric_partials, w_new)
        )
    except _STEP_ERRORS:
        return StepResult(state, 0.0, 0, True)
    nxt.set_momentum(p_new)
    diverged = not _in_bounds(p_new)
    return StepResult(nxt, 0.0, max(iters_kick, iters_drift), diverged)


def lagrangian_leapfrog_step(target, state, cfg):
    """Explicit Lagrangian leapfrog in velocity coordinates.

    Both velocity half-updates solve an (Id + Omega) system; the Jacobian
    collects the metric log-determinant ratio and four Omega determinants.
    """
    eps = cfg.step_size
    half = 0.5 * eps
    q = state.q
    eye = target._eye
    try:
        v = state.v
        gamma = state.gamma_flat
        m = target.dim
        ginv_grad = linalg.plu_solve(state.metric_plu, state.grad_potential)

        omega_v = (0.5 * eps) * (v @ gamma).reshape(m, m)
        factors_1 = linalg.plu_factorize(eye + omega_v)
        v_half = linalg.plu_solve(factors_1, v - half * ginv_grad)
        log_det_plus_1 = _omega_log_det_from_plu(factors_1)

        omega_vh = (0.5 * eps) * (v_half @ gamma).reshape(m, m)
        log_det_minus_1 = _omega_log_det(eye - omega_vh)

        q_new = q + eps * v_half
        nxt = target.point(q_new)
        gamma_new = nxt.gamma_flat
        ginv_grad_new = linalg.plu_solve(nxt.metric_plu, nxt.grad_potential)

        omega_vh_new = (0.5 * eps) * (v_half @ gamma_new).reshape(m, m)
        factors_2 = linalg.plu_factorize(eye + omega_vh_new)
        v_new = linalg.plu_solve(factors_2, v_half - half * ginv_grad_new)
        log_det_plus_2 = _omega_log_det_from_plu(factors_2)

        omega_vn = (0.5 * eps) * (v_new @ gamma_new).reshape(m, m)
        log_det_minus_2 = _omega_log_det(eye - omega_vn)

        log_jac = (
            nxt.log_det_metric - state.log_det_metric
            + log_det_minus_2 + log_det_minus_1
            - log_det_plus_2 - log_det_plus_1
        )
    except _STEP_ERRORS:
        return StepResult(state, 0.0, 0, True)
    nxt.set_velocity(v_new)
    return StepResult(
        nxt, log_jac, 0, not (_in_bounds(q_new) and _in_bounds(v_new))
    )


def inverted_lagrangian_leapfrog_step(target, state, cfg):
    """Drift-kick-drift Lagrangian leapfrog; two Omega determinants per step.

    The full velocity update at the midpoint solves (Id + 2 Omega); by
    linearity 2 Omega(eps, ., .) is Omega(2 eps, ., .).
    """
    eps = cfg.step_size
    half = 0.5 * eps
    q = state.q
    eye = target._eye
    try:
        v = state.v
        q_mid = q + half * v
        mid = target.point(q_mid)
        gamma = mid.gamma_flat
        m = target.dim
        ginv_grad = linalg.plu_solve(mid.metric_plu, mid.grad_potential)

        omega2_v = eps * (v @ gamma).reshape(m, m)
        factors = linalg.plu_factorize(eye + omega2_v)
        v_new = linalg.plu_solve(factors, v - eps * ginv_grad)
        log_det_plus = _omega_log_det_from_plu(factors)

        omega2_vn = eps * (v_new @ gamma).reshape(m, m)
        log_det_minus = _omega_log_det(eye - omega2_vn)

        q_new = q_mid + half * v_new
        nxt = target.point(q_new)
        log_jac = (
            nxt.log_det_metric - state.log_det_metric
            + log_det_minus - log_det_plus
        )
    except _STEP_ERRORS:
        return StepResult(state, 0.0, 0, True)
    nxt.set_velocity(v_new)
    return StepResult(
        nxt, log_jac, 0, not (_in_bounds(q_new) and _in_bounds(v_new))
    )


def integrate_trajectory(target, state, cfg, stepper):
    """Compose cfg.num_steps steps, summing log-Jacobians in log space.

    The first diverged step aborts the trajectory and marks the whole result
    diverged. Velocity/momentum conversions happen only where a stepper (or the
    caller) asks for the missing representation, so Lagrangian trajectories
    stay in velocity form between endpoints.
    """
    log_jac = 0.0
    iters = 0
    current = state
    # Overflow in a blowing-up trajectory is an expected soft failure; the
    # finiteness guards turn it into a divergence rather than a warning.
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(cfg.num_steps):
            result = stepper(target, current, cfg)
            log_jac += result.log_abs_jacobian
            if result.fixed_point_iters > iters:
                iters = result.fixed_point_iters
            if result.diverged:
                return StepResult(result.next, log_jac, iters, True)
            current = result.next
    return StepResult(current, log_jac, iters, False)
