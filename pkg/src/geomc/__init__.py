"""Geometric MCMC toolkit: Riemannian-manifold HMC, Lagrangian Monte Carlo,
inverted Lagrangian Monte Carlo, and a verification harness for their
structural guarantees (integrator order, self-adjointness, Jacobians,
robustness to metric-derivative misspecification)."""

__version__ = "0.1.0"
