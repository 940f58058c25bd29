"""Riemannian machinery: metric-model contract, Christoffel symbols, the Omega
contraction, Legendre transforms, and Hamiltonian/potential evaluation.

A metric model is any object with:

    dim                   -- state dimension m
    log_density(q)        -- log target density L(q), up to a constant
    grad_log_density(q)   -- gradient of L, shape (m,)
    metric(q)             -- SPD metric G(q), shape (m, m)
    metric_partials(q)    -- array of shape (m, m, m); entry [k] is dG/dq_k
    euclidean             -- optional flag; True means G is identically the identity

The potential is always U(q) = -L(q) + (1/2) log det G(q), which makes the
position marginal of exp(-H) proportional to exp(L). The metric inverse is
never formed; every application of it goes through a PLU solve, and the same
factorization feeds the log-determinants.

`PhasePoint` carries a position plus lazily cached geometry (metric factors,
log-determinant, potential gradient, Christoffel symbols), so integrators that
share trajectory endpoints never evaluate the model twice at the same point.
"""

import math

import numpy as np

from . import linalg


class RiemannianTarget:
    """A metric model lifted to phase space: potential, kinetic energy, geometry."""

    def __init__(self, model):
        self.model = model
        self.dim = model.dim
        self.euclidean = bool(getattr(model, "euclidean", False))
        self._eye = np.eye(self.dim)
        self._zero_gamma = np.zeros((self.dim, self.dim * self.dim))

    def point(self, q, p=None, v=None):
        """Wrap a position (and optional momentum/velocity) as a PhasePoint."""
        return PhasePoint(self, np.asarray(q, dtype=float), p, v)

    def potential(self, point):
        u = -self.model.log_density(point.q)
        if self.euclidean:
            return u
        return u + 0.5 * point.log_det_metric

    def grad_potential(self, point):
        grad_l = self.model.grad_log_density(point.q)
        if self.euclidean:
            return -grad_l
        if self.dim == 2:
            i00, i01, i11 = _metric_inverse_2x2(point.metric)
            pk = point.metric_partials
            t0 = (i00 * pk[0, 0, 0] + i01 * (pk[0, 0, 1] + pk[0, 1, 0])
                  + i11 * pk[0, 1, 1])
            t1 = (i00 * pk[1, 0, 0] + i01 * (pk[1, 0, 1] + pk[1, 1, 0])
                  + i11 * pk[1, 1, 1])
            return np.array([0.5 * t0 - grad_l[0], 0.5 * t1 - grad_l[1]])
        # trace term: (1/2) tr(G^{-1} dG/dq_k) for each k, all via one solve
        m = self.dim
        partials = point.metric_partials
        rhs = partials.transpose(1, 0, 2).reshape(m, m * m)
        sol = linalg.plu_solve(point.metric_plu, rhs).reshape(m, m, m)
        traces = np.einsum("iki->k", sol)
        return -grad_l + 0.5 * traces

    def christoffel(self, point):
        """Christoffel symbols at the point, shape (m, m, m), index [k, i, j].

        Gamma^k_ij = (1/2) sum_l G^{-1}_kl (dG_lj/dq_i + dG_li/dq_j - dG_ij/dq_l),
        built from whatever partials the model reports (misspecified ones included)
        and solved against the metric factorization. Symmetric in (i, j).
        """
        m = self.dim
        p = point.metric_partials
        t = p.transpose(1, 0, 2) + p.transpose(1, 2, 0) - p
        sol = linalg.plu_solve(point.metric_plu, t.reshape(m, m * m))
        return 0.5 * sol.reshape(m, m, m)

    def omega(self, eps, point, u):
        """Omega(eps, q, u): entry (i, j) is (eps/2) sum_k Gamma^i_kj u_k."""
        m = self.dim
        return (0.5 * eps) * (u @ point.gamma_flat).reshape(m, m)

    def kinetic(self, point):
        if self.euclidean:
            p = point.p
            return 0.5 * float(p @ p)
        if point._v is not None:
            v = point._v
            return 0.5 * float(v @ (point.metric @ v))
        p = point._p
        return 0.5 * float(p @ linalg.plu_solve(point.metric_plu, p))

    def hamiltonian(self, point):
        return point.potential + self.kinetic(point)


def _metric_inverse_2x2(g):
    """Inverse entries (i00, i01, i11) of a symmetric 2x2 metric."""
    a = float(g[0, 0])
    b = float(g[0, 1])
    c = float(g[1, 1])
    d = a * c - b * b
    if not abs(d) > linalg.PIVOT_TOL:  # also rejects NaN
        raise linalg.SingularMatrixError("2x2 metric determinant underflow")
    return c / d, -b / d, a / d


def _gamma_flat_2x2(point):
    """Flattened Christoffel rows for a 2-d metric, all in scalar arithmetic.

    Row i of the result is [Gamma^0_i0, Gamma^0_i1, Gamma^1_i0, Gamma^1_i1],
    the layout the Omega contraction consumes.
    """
    i00, i01, i11 = _metric_inverse_2x2(point.metric)
    p = point.metric_partials
    p000 = float(p[0, 0, 0])
    p001 = float(p[0, 0, 1])
    p011 = float(p[0, 1, 1])
    p100 = float(p[1, 0, 0])
    p101 = float(p[1, 0, 1])
    p111 = float(p[1, 1, 1])
    # T[l,i,j] = dG_lj/dq_i + dG_li/dq_j - dG_ij/dq_l, lower indices symmetric
    t000 = p000
    t100 = 2.0 * p001 - p100
    t001 = p100
    t101 = p011
    t011 = 2.0 * p101 - p011
    t111 = p111
    g000 = 0.5 * (i00 * t000 + i01 * t100)
    g100 = 0.5 * (i01 * t000 + i11 * t100)
    g001 = 0.5 * (i00 * t001 + i01 * t101)
    g101 = 0.5 * (i01 * t001 + i11 * t101)
    g011 = 0.5 * (i00 * t011 + i01 * t111)
    g111 = 0.5 * (i01 * t011 + i11 * t111)
    return np.array([[g000, g001, g100, g101], [g001, g011, g101, g111]])


class PhasePoint:
    """Position with momentum and/or velocity plus cached metric quantities.

    Momentum and velocity are interchangeable through the Legendre maps
    p = G(q) v; whichever is populated first derives the other on demand.
    All cached fields are functions of q alone and survive momentum refreshes.
    """

    __slots__ = (
        "target", "q", "_p", "_v", "_metric", "_plu", "_chol",
        "_log_det_metric", "_potential", "_grad_potential",
        "_metric_partials", "_christoffel", "_gamma_flat",
    )

    def __init__(self, target, q, p=None, v=None):
        self.target = target
        self.q = q
        self._p = None if p is None else np.asarray(p, dtype=float)
        self._v = None if v is None else np.asarray(v, dtype=float)
        self._metric = None
        self._plu = None
        self._chol = None
        self._log_det_metric = None
        self._potential = None
        self._grad_potential = None
        self._metric_partials = None
        self._christoffel = None
        self._gamma_flat = None

    @property
    def p(self):
        if self._p is None:
            if self.target.euclidean:
                self._p = self._v
            else:
                self._p = self.metric @ self._v
        return self._p

    @property
    def v(self):
        if self._v is None:
            if self.target.euclidean:
                self._v = self._p
            else:
                self._v = linalg.plu_solve(self.metric_plu, self._p)
        return self._v

    def set_momentum(self, p):
        self._p = p
        self._v = None

    def set_velocity(self, v):
        self._v = v
        self._p = None

    def flip_momentum(self):
        if self._p is not None:
            self._p = -self._p
        if self._v is not None:
            self._v = -self._v

    @property
    def metric(self):
        if self._metric is None:
            if self.target.euclidean:
                self._metric = self.target._eye
            else:
                self._metric = self.target.model.metric(self.q)
        return self._metric

    @property
    def metric_plu(self):
        if self._plu is None:
            self._plu = linalg.plu_factorize(self.metric)
        return self._plu

    @property
    def metric_chol(self):
        if self._chol is None:
            self._chol = linalg.cholesky_factorize(self.metric)
        return self._chol

    @property
    def log_det_metric(self):
        if self._log_det_metric is None:
            if self.target.euclidean:
                self._log_det_metric = 0.0
            else:
                val, sign = linalg.plu_log_abs_det(self.metric_plu)
                if sign <= 0:
                    raise linalg.NotPositiveDefiniteError(
                        "metric determinant is not positive"
                    )
                self._log_det_metric = val
        return self._log_det_metric

    @property
    def potential(self):
        if self._potential is None:
            self._potential = self.target.potential(self)
        return self._potential

    @property
    def grad_potential(self):
        if self._grad_potential is None:
            self._grad_potential = self.target.grad_potential(self)
        return self._grad_potential

    @property
    def metric_partials(self):
        if self._metric_partials is None:
            self._metric_partials = self.target.model.metric_partials(self.q)
        return self._metric_partials

    @property
    def christoffel(self):
        if self._christoffel is None:
            if self.target.dim == 2 and not self.target.euclidean:
                gf = self.gamma_flat
                self._christoffel = np.array(
                    [[[gf[0, 0], gf[0, 1]], [gf[1, 0], gf[1, 1]]],
                     [[gf[0, 2], gf[0, 3]], [gf[1, 2], gf[1, 3]]]]
                )
            else:
                self._christoffel = self.target.christoffel(self)
        return self._christoffel

    @property
    def gamma_flat(self):
        # Gamma reshaped so that Omega contraction is a single mat-vec:
        # row k of gamma_flat is Gamma^._k. flattened over (i, j).
        if self._gamma_flat is None:
            if self.target.euclidean:
                self._gamma_flat = self.target._zero_gamma
            elif self.target.dim == 2:
                self._gamma_flat = _gamma_flat_2x2(self)
            else:
                m = self.target.dim
                g = self.christoffel
                self._gamma_flat = np.ascontiguousarray(
                    g.transpose(1, 0, 2).reshape(m, m * m)
                )
        return self._gamma_flat


def christoffel(model, q):
    """Christoffel symbols of a model's metric at q, shape (m, m, m)."""
    target = RiemannianTarget(model)
    return target.christoffel(target.point(q))


def omega(eps, model, q, v):
    """The Omega contraction: (eps/2) Gamma^i_kj(q) v_k, shape (m, m)."""
    target = RiemannianTarget(model)
    return target.omega(eps, target.point(q), np.asarray(v, dtype=float))


def legendre(model, q, v):
    """Velocity to momentum: p = G(q) v."""
    return model.metric(np.asarray(q, dtype=float)) @ np.asarray(v, dtype=float)


def inverse_legendre(model, q, p):
    """Momentum to velocity: v = G(q)^{-1} p, via PLU solve."""
    f = linalg.plu_factorize(model.metric(np.asarray(q, dtype=float)))
    return linalg.plu_solve(f, np.asarray(p, dtype=float))


def hamiltonian(target, q, p):
    """H(q, p) = U(q) + (1/2) p^T G(q)^{-1} p for a RiemannianTarget."""
    if not isinstance(target, RiemannianTarget):
        target = RiemannianTarget(target)
    return target.hamiltonian(target.point(q, p=p))


def potential(target, q):
    """U(q) = -L(q) + (1/2) log det G(q)."""
    if not isinstance(target, RiemannianTarget):
        target = RiemannianTarget(target)
    return target.point(q).potential


def finite_difference_partials(model, q, h=1e-5):
    """Central-difference metric partials; test-only fallback for model checks."""
    q = np.asarray(q, dtype=float)
    m = model.dim
    out = np.empty((m, m, m))
    for k in range(m):
        dq = np.zeros(m)
        dq[k] = h
        out[k] = (model.metric(q + dq) - model.metric(q - dq)) / (2.0 * h)
    return out
