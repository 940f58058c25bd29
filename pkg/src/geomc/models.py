"""Target distributions implementing the metric-model contract, their i.i.d.
reference samplers, harmonic-oscillator propagator algebra, and a
metric-derivative misspecification injector for robustness studies.

Metrics follow one recipe: Fisher information of the likelihood plus the
negative Hessian of the log-prior (or, for the Student-t, the positive-definite
term of the negative log-density Hessian). Every model supplies analytic
metric partials; a finite-difference fallback lives in `geometry` for tests.
"""

import math
import os

import numpy as np


class UnstableRegimeError(Exception):
    """Harmonic-oscillator step size outside the stability region eps^2 omega^2 < 4."""


class GridUnderflowError(Exception):
    """Tabulated marginal left too much probability mass outside its grid."""


_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


# ---------------------------------------------------------------------------
# harmonic oscillator / 1-D Gaussian


class HarmonicModel:
    """H = omega^2 q^2 / 2 + p^2 / 2 with a Euclidean metric.

    Doubles as the 1-D Gaussian target N(0, 1/omega^2).
    """

    euclidean = True

    def __init__(self, omega=1.0):
        self.omega = float(omega)
        self.dim = 1
        self._eye = np.eye(1)
        self._zeros = np.zeros((1, 1, 1))

    def log_density(self, q):
        return -0.5 * (self.omega * self.omega) * float(q[0]) ** 2

    def grad_log_density(self, q):
        return -(self.omega * self.omega) * q

    def metric(self, q):
        return self._eye

    def metric_partials(self, q):
        return self._zeros

    def reference_sampler(self, count, rng):
        """i.i.d. draws from the stationary position law N(0, 1/omega^2)."""
        return rng.standard_normal((count, 1)) / self.omega

    def exact_flow(self, q0, p0, t):
        """Closed-form oscillator orbit; velocity equals momentum here."""
        wt = self.omega * t
        q = q0 * math.cos(wt) + (p0 / self.omega) * math.sin(wt)
        v = -q0 * self.omega * math.sin(wt) + p0 * math.cos(wt)
        return q, v


# ---------------------------------------------------------------------------
# 1-D geodesic system


class GeodesicModel:
    """G(q) = 1/q^2 on q > 0 with U identically zero.

    Taking L(q) = -log q makes U = -L + (1/2) log det G vanish exactly, so the
    dynamics are pure geodesic flow with the exact solution
    q_t = q0 exp(q0 p0 t), v_t = q0^2 p0 exp(q0 p0 t).
    """

    euclidean = False

    def __init__(self):
        self.dim = 1

    def log_density(self, q):
        return -math.log(q[0])

    def grad_log_density(self, q):
        return np.array([-1.0 / q[0]])

    def metric(self, q):
        return np.array([[1.0 / q[0] ** 2]])

    def metric_partials(self, q):
        return np.array([[[-2.0 / q[0] ** 3]]])

    @staticmethod
    def exact_flow(q0, p0, t):
        """Exact geodesic flow from (q0, p0); returns (q_t, v_t)."""
        growth = math.exp(q0 * p0 * t)
        return q0 * growth, q0 * q0 * p0 * growth


# ---------------------------------------------------------------------------
# banana-shaped posterior


def make_banana_data(n=100, theta1=0.5, theta2=None, sigma_sq_y=2.0, seed=0):
    """Synthetic observations y_i ~ N(theta1 + theta2^2, sigma_sq_y)."""
    if theta2 is None:
        theta2 = math.sqrt(0.5)
    rng = np.random.default_rng(seed)
    return theta1 + theta2 * theta2 + math.sqrt(sigma_sq_y) * rng.standard_normal(n)


class BananaModel:
    """Posterior of theta from y_i ~ N(theta1 + theta2^2, sigma_sq_y) with a
    N(0, sigma_sq_theta I) prior.

    The likelihood mean mu = theta1 + theta2^2 has Jacobian J = [1, 2 theta2],
    so the Fisher metric is (n / sigma_sq_y) J^T J plus the prior precision:

        G(theta) = (n/s_y) [[1, 2 t2], [2 t2, 4 t2^2]] + (1/s_t) I

    dG/dtheta1 = 0 and dG/dtheta2 = (n/s_y) [[0, 2], [2, 8 t2]]. det G =
    (n/s_y)(1/s_t)(1 + 4 t2^2) + 1/s_t^2 > 0, so G is SPD everywhere.
    """

    euclidean = False

    def __init__(self, y, sigma_sq_theta=2.0, sigma_sq_y=2.0):
        y = np.asarray(y, dtype=float)
        self.dim = 2
        self.n = y.shape[0]
        self.sigma_sq_theta = float(sigma_sq_theta)
        self.sigma_sq_y = float(sigma_sq_y)
        self.sum_y = float(y.sum())
        self.sum_y_sq = float((y * y).sum())
        self._a = self.n / self.sigma_sq_y
        self._c = 1.0 / self.sigma_sq_theta

    @classmethod
    def default(cls):
        """The fixed synthetic-data posterior every experiment shares."""
        y = np.loadtxt(os.path.join(_DATA_DIR, "banana_y.csv"), skiprows=1)
        return cls(y)

    def log_density(self, q):
        t1 = q[0]
        t2 = q[1]
        mu = t1 + t2 * t2
        sq = self.sum_y_sq - 2.0 * mu * self.sum_y + self.n * mu * mu
        return -0.5 * sq / self.sigma_sq_y - 0.5 * (t1 * t1 + t2 * t2) / self.sigma_sq_theta

    def grad_log_density(self, q):
        t1 = q[0]
        t2 = q[1]
        resid = self.sum_y - self.n * (t1 + t2 * t2)
        scaled = resid / self.sigma_sq_y
        return np.array(
            [scaled - t1 / self.sigma_sq_theta,
             2.0 * t2 * scaled - t2 / self.sigma_sq_theta]
        )

    def metric(self, q):
        t2 = q[1]
        a = self._a
        off = 2.0 * t2 * a
        return np.array(
            [[a + self._c, off], [off, 4.0 * t2 * t2 * a + self._c]]
        )

    def metric_partials(self, q):
        a2 = 2.0 * self._a
        return np.array(
            [[[0.0, 0.0], [0.0, 0.0]],
             [[0.0, a2], [a2, 4.0 * a2 * q[1]]]]
        )

    # -- i.i.d. reference sampling -----------------------------------------

    def _theta2_log_marginal(self, t2):
        """Log marginal density of theta2, up to a constant.

        Integrating theta1 out of the joint (conjugate normal step) leaves
        -t2^2/(2 s_t) - sum(y - t2^2)^2/(2 s_y) + (S - n t2^2)^2/(2 s_y^2 tau)
        with tau = n/s_y + 1/s_t.
        """
        tau = self._a + self._c
        t2sq = t2 * t2
        sq = self.sum_y_sq - 2.0 * t2sq * self.sum_y + self.n * t2sq * t2sq
        resid = self.sum_y - self.n * t2sq
        return (
            -0.5 * t2sq / self.sigma_sq_theta
            - 0.5 * sq / self.sigma_sq_y
            + 0.5 * resid * resid / (self.sigma_sq_y * self.sigma_sq_y * tau)
        )

    def _marginal_table(self):
        # adaptive grid: coarse scan finds the support, fine grid tabulates it
        coarse = np.linspace(-12.0, 12.0, 2049)
        log_m = self._theta2_log_marginal(coarse)
        log_max = log_m.max()
        dens = np.exp(log_m - log_max)
        support = np.flatnonzero(log_m > log_max - 46.0)
        if support[0] == 0 or support[-1] == coarse.size - 1:
            # density has not decayed by the scan edge, so mass extends past it
            raise GridUnderflowError(
                "theta2 marginal mass outside the tabulation grid"
            )
        lo = max(support[0] - 1, 0)
        hi = min(support[-1] + 1, coarse.size - 1)
        total = np.trapezoid(dens, coarse)
        inside = np.trapezoid(dens[lo:hi + 1], coarse[lo:hi + 1])
        if total <= 0.0 or (total - inside) / total > 1e-10:
            raise GridUnderflowError(
                "theta2 marginal mass outside the tabulation grid"
            )
        grid = np.linspace(coarse[lo], coarse[hi], 16385)
        dens_fine = np.exp(self._theta2_log_marginal(grid) - log_max)
        cdf = np.concatenate(
            [[0.0], np.cumsum(0.5 * (dens_fine[1:] + dens_fine[:-1]) * np.diff(grid))]
        )
        cdf /= cdf[-1]
        return grid, cdf

    def reference_sampler(self, count, rng):
        """i.i.d. posterior draws: inverse-CDF theta2, conjugate-normal theta1."""
        if not hasattr(self, "_marginal"):
            self._marginal = self._marginal_table()
        grid, cdf = self._marginal
        t2 = np.interp(rng.random(count), cdf, grid)
        tau = self._a + self._c
        mean = (self.sum_y - self.n * t2 * t2) / (self.sigma_sq_y * tau)
        t1 = mean + rng.standard_normal(count) / math.sqrt(tau)
        return np.column_stack([t1, t2])


def banana_reference_sampler(model, count, rng):
    """i.i.d. draws from a banana posterior (see BananaModel.reference_sampler)."""
    return model.reference_sampler(count, rng)


# ---------------------------------------------------------------------------
# Bayesian logistic regression


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


class LogisticModel:
    """Bayesian logistic regression with a N(0, 1/alpha I) prior.

    Metric G(beta) = X^T Lambda(beta) X + alpha I with Lambda_ii =
    sigma(z_i)(1 - sigma(z_i)), z = X beta; its partials follow from
    d Lambda_ii / d beta_k = sigma'(z_i)(1 - 2 sigma(z_i)) x_ik.
    """

    euclidean = False

    def __init__(self, x, y, alpha=1.0):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.alpha = float(alpha)
        self.n, self.dim = self.x.shape

    def log_density(self, q):
        z = self.x @ q
        # log sigma(y*z) summed, written stably via logaddexp
        sgn = 2.0 * self.y - 1.0
        ll = -np.logaddexp(0.0, -sgn * z).sum()
        return float(ll) - 0.5 * self.alpha * float(q @ q)

    def grad_log_density(self, q):
        z = self.x @ q
        return self.x.T @ (self.y - _sigmoid(z)) - self.alpha * q

    def metric(self, q):
        z = self.x @ q
        s = _sigmoid(z)
        lam = s * (1.0 - s)
        return (self.x.T * lam) @ self.x + self.alpha * np.eye(self.dim)

    def metric_partials(self, q):
        z = self.x @ q
        s = _sigmoid(z)
        dlam = s * (1.0 - s) * (1.0 - 2.0 * s)
        return np.einsum("i,ik,ia,ib->kab", dlam, self.x, self.x, self.x)


def make_logistic_data(n, d, seed=0):
    """Synthetic design matrix and labels for logistic regression."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    beta = rng.standard_normal(d) * (2.0 / math.sqrt(d))
    y = (rng.random(n) < _sigmoid(x @ beta)).astype(float)
    return x, y


def load_logistic_csv(path):
    """Load a logistic dataset: header row, one observation per row, last column = label."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return data[:, :-1], data[:, -1]


# ---------------------------------------------------------------------------
# multiscale Student-t


class StudentTModel:
    """Multivariate Student-t, density proportional to
    [1 + x^T Sigma^{-1} x / eta]^{-(eta+m)/2}, Sigma = diag(1, ..., 1, sigma_sq).

    With s(x) = 1 + x^T Sigma^{-1} x / eta, the negative log-density Hessian is
    ((eta+m)/eta) [Sigma^{-1}/s - (2/(eta s^2)) Sigma^{-1}x x^T Sigma^{-1}];
    the metric keeps the positive-definite first term.
    """

    euclidean = False

    def __init__(self, dim=20, dof=5e3, sigma_sq=1e2):
        self.dim = int(dim)
        self.dof = float(dof)
        self.sigma_sq = float(sigma_sq)
        self.inv_sigma = np.ones(self.dim)
        self.inv_sigma[-1] = 1.0 / self.sigma_sq
        self._coeff = (self.dof + self.dim) / self.dof
        self._base = np.diag(self.inv_sigma)

    def _s(self, q):
        return 1.0 + float(q @ (self.inv_sigma * q)) / self.dof

    def log_density(self, q):
        return -0.5 * (self.dof + self.dim) * math.log(self._s(q))

    def grad_log_density(self, q):
        return -self._coeff * (self.inv_sigma * q) / self._s(q)

    def metric(self, q):
        return (self._coeff / self._s(q)) * self._base

    def metric_partials(self, q):
        s = self._s(q)
        coeff = -2.0 * self._coeff / (self.dof * s * s)
        return (coeff * (self.inv_sigma * q))[:, None, None] * self._base[None, :, :]

    def reference_sampler(self, count, rng):
        """i.i.d. draws: x = z sqrt(eta/u), z ~ N(0, Sigma), u ~ chi^2_eta."""
        z = rng.standard_normal((count, self.dim)) / np.sqrt(self.inv_sigma)
        u = rng.chisquare(self.dof, count)
        return z * np.sqrt(self.dof / u)[:, None]


def student_t_reference_sampler(model, count, rng):
    """i.i.d. draws from a Student-t model (see StudentTModel.reference_sampler)."""
    return model.reference_sampler(count, rng)


# ---------------------------------------------------------------------------
# wrappers: flattened metric and misspecified partials


class FlatMetric:
    """A model viewed through the identity metric (for Euclidean-metric HMC)."""

    euclidean = True

    def __init__(self, base):
        self.base = base
        self.dim = base.dim
        self._eye = np.eye(self.dim)
        self._zeros = np.zeros((self.dim, self.dim, self.dim))

    def log_density(self, q):
        return self.base.log_density(q)

    def grad_log_density(self, q):
        return self.base.grad_log_density(q)

    def metric(self, q):
        return self._eye

    def metric_partials(self, q):
        return self._zeros

    def reference_sampler(self, count, rng):
        return self.base.reference_sampler(count, rng)


class MisspecifiedModel:
    """Deliberately wrong metric partials: g_k -> (1 + delta) g_k.

    The metric itself is untouched, each perturbed partial stays symmetric, and
    by construction the reported partials no longer differentiate G. `indices`
    restricts the scaling to selected coordinates; the default scales every
    partial, since some models (the banana included) have g_k = 0 for some k.
    """

    euclidean = False

    def __init__(self, base, delta=0.3, indices=None):
        self.base = base
        self.delta = float(delta)
        self.indices = None if indices is None else tuple(indices)
        self.dim = base.dim

    def log_density(self, q):
        return self.base.log_density(q)

    def grad_log_density(self, q):
        return self.base.grad_log_density(q)

    def metric(self, q):
        return self.base.metric(q)

    def metric_partials(self, q):
        partials = self.base.metric_partials(q)
        if self.indices is None:
            return (1.0 + self.delta) * partials
        out = partials.copy()
        for k in self.indices:
            out[k] *= 1.0 + self.delta
        return out

    def reference_sampler(self, count, rng):
        return self.base.reference_sampler(count, rng)


# ---------------------------------------------------------------------------
# harmonic-oscillator propagator algebra


def propagator_matrix(omega, eps, method):
    """One-step transition matrix of the (inverted) leapfrog on the oscillator.

    The standard kick-drift-kick step and the inverted drift-kick-drift step
    are linear maps of (q, p); `method` is "leapfrog" or "inverted".
    """
    x = eps * eps * omega * omega
    diag = 1.0 - 0.5 * x
    if method == "leapfrog":
        return np.array(
            [[diag, eps], [-eps * omega * omega * (1.0 - 0.25 * x), diag]]
        )
    if method == "inverted":
        return np.array(
            [[diag, eps * (1.0 - 0.25 * x)], [-eps * omega * omega, diag]]
        )
    raise ValueError("unknown method %r" % (method,))


def _check_stable(omega, eps):
    if eps * eps * omega * omega >= 4.0:
        raise UnstableRegimeError(
            "eps^2 omega^2 = %g is outside the stability region" % (eps * eps * omega * omega)
        )


def one_step_esjd_closed_form(omega, eps, method):
    """Stationary one-step E[(q_new - q)^2] for the (inverted) leapfrog.

    Reading off the first row of the propagator against the stationary
    covariance diag(1/omega^2, 1):

        leapfrog: eps^4 omega^2 / 4 + eps^2
        inverted: eps^4 omega^2 / 4 + eps^2 (1 - eps^2 omega^2 / 4)^2
    """
    _check_stable(omega, eps)
    quartic = 0.25 * eps ** 4 * omega * omega
    if method == "leapfrog":
        return quartic + eps * eps
    if method == "inverted":
        factor = 1.0 - 0.25 * eps * eps * omega * omega
        return quartic + eps * eps * factor * factor
    raise ValueError("unknown method %r" % (method,))


def k_step_esjd_from_propagators(omega, eps, k, method):
    """Stationary E[(q_k - q_0)^2] after k steps, from the propagator power.

    With M = R^k and stationary covariance diag(1/omega^2, 1):
    Var(q_k) + Var(q_0) - 2 Cov = (M_00 - 1)^2 / omega^2 + M_01^2.
    """
    _check_stable(omega, eps)
    m = np.linalg.matrix_power(propagator_matrix(omega, eps, method), k)
    return (m[0, 0] - 1.0) ** 2 / (omega * omega) + m[0, 1] ** 2
