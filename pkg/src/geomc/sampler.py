"""Involutive Monte Carlo transition kernel and chain runner.

Each transition refreshes the momentum from N(0, G(q)), integrates k steps
with the method's integrator, applies the momentum flip, and accepts with

    alpha = min{1, exp(H(q, p) - H(q_new, p_new) + log |J|)}

where log |J| is the trajectory's accumulated log-Jacobian (zero for the
symplectic methods). Diverged trajectories are rejected outright (alpha = 0).
Method and integrator are paired permanently:

    hmc   -> standard leapfrog (Euclidean metric required)
    rmhmc -> generalized leapfrog
    lmc   -> Lagrangian leapfrog
    ilmc  -> inverted Lagrangian leapfrog

Chains are reproducible: chain i of a run seeded with s draws from a fresh
generator seeded by SeedSequence((s, i)).
"""

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .geometry import RiemannianTarget
from .integrators import (
    ENERGY_ERROR_LIMIT,
    IntegratorConfig,
    generalized_leapfrog_step,
    integrate_trajectory,
    inverted_lagrangian_leapfrog_step,
    lagrangian_leapfrog_step,
    standard_leapfrog_step,
)

# method -> (stepper, carries velocity between steps)
METHOD_STEPPERS = {
    "hmc": (standard_leapfrog_step, False),
    "rmhmc": (generalized_leapfrog_step, False),
    "lmc": (lagrangian_leapfrog_step, True),
    "ilmc": (inverted_lagrangian_leapfrog_step, True),
}


@dataclass
class ChainConfig:
    method: str
    integrator: IntegratorConfig
    num_samples: int
    initial_position: np.ndarray
    burn_in: Optional[int] = None  # None -> 10% of num_samples
    seed: int = 0


@dataclass(slots=True)
class ChainRecord:
    accepted: bool
    accept_prob: float
    log_abs_jacobian: float
    current_energy: float
    proposal_energy: float
    sq_jump_distance: float
    wall_clock_nanos: int
    fixed_point_iters: int
    diverged: bool


def resample_momentum(target, q, rng):
    """Draw p ~ N(0, G(q)) through the metric's Cholesky factor."""
    point = q if hasattr(q, "metric_chol") else target.point(q)
    z = rng.standard_normal(target.dim)
    if target.euclidean:
        return z
    return point.metric_chol @ z


def transition_step(target, state, cfg, rng):
    """One involutive Monte Carlo transition from a phase point.

    Returns (next_point, ChainRecord); on rejection the returned point is the
    input point (its cached geometry intact), with stale momentum to be
    refreshed by the next call.
    """
    t0 = time.perf_counter_ns()
    stepper, use_velocity = METHOD_STEPPERS[cfg.method]

    z = rng.standard_normal(target.dim)
    if target.euclidean:
        state.set_momentum(z)
    else:
        chol = state.metric_chol
        state.set_momentum(chol @ z)
        if use_velocity:
            state._v = linalg.triangular_solve(chol, z, transpose=True)
    kinetic = 0.5 * float(z @ z)
    current_energy = state.potential + kinetic

    result = integrate_trajectory(target, state, cfg.integrator, stepper)
    proposal = result.next
    proposal.flip_momentum()

    diverged = result.diverged
    if diverged:
        proposal_energy = math.inf
        accept_prob = 0.0
    else:
        proposal_energy = proposal.potential + target.kinetic(proposal)
        log_ratio = current_energy - proposal_energy + result.log_abs_jacobian
        if math.isnan(log_ratio):
            diverged = True
            accept_prob = 0.0
            proposal_energy = math.inf
        elif proposal_energy - current_energy > ENERGY_ERROR_LIMIT:
            diverged = True
            accept_prob = 0.0
        else:
            accept_prob = 1.0 if log_ratio >= 0.0 else math.exp(log_ratio)

    accepted = rng.random() < accept_prob
    jump = proposal.q - state.q
    record = ChainRecord(
        accepted=accepted,
        accept_prob=accept_prob,
        log_abs_jacobian=result.log_abs_jacobian,
        current_energy=current_energy,
        proposal_energy=proposal_energy,
        sq_jump_distance=float(jump @ jump),
        wall_clock_nanos=time.perf_counter_ns() - t0,
        fixed_point_iters=result.fixed_point_iters,
        diverged=diverged,
    )
    return (proposal if accepted else state), record


def run_chain(target, cfg, chain_index=0):
    """Run one chain; returns (samples, records) past burn-in.

    Burn-in defaults to 10% of num_samples; samples and records cover exactly
    the retained transitions, one row of positions per transition.
    """
    if not isinstance(target, RiemannianTarget):
        target = RiemannianTarget(target)
    if cfg.method not in METHOD_STEPPERS:
        raise ValueError("unknown method %r" % (cfg.method,))
    if cfg.method == "hmc" and not target.euclidean:
        raise ValueError("hmc needs a Euclidean metric; wrap the model in FlatMetric")
    if cfg.num_samples < 1:
        raise ValueError("num_samples must be >= 1")

    burn_in = cfg.burn_in if cfg.burn_in is not None else cfg.num_samples // 10
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, chain_index)))
    point = target.point(np.asarray(cfg.initial_position, dtype=float))

    samples = np.empty((cfg.num_samples, target.dim))
    records = []
    for i in range(burn_in + cfg.num_samples):
        point, record = transition_step(target, point, cfg, rng)
        if i >= burn_in:
            samples[i - burn_in] = point.q
            records.append(record)
    return samples, records


def run_chains(target, cfg, num_chains):
    """Run independent chains sequentially; returns a list of (samples, records).

    Chain i uses the substream SeedSequence((cfg.seed, i)), so results are
    reproducible and independent of execution order.
    """
    return [run_chain(target, cfg, chain_index=i) for i in range(num_chains)]
