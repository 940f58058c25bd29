"""Dense square-matrix kernel: PLU and Cholesky factorizations, solves, log-determinants.

All determinants are carried as (log_abs_det, sign) pairs so that products of
several factors cannot over- or underflow. Matrices of size one and two take a
closed-form path (the samplers factorize millions of 2x2 systems per run);
larger sizes delegate to LAPACK via scipy. Both paths produce the same
partial-pivoted factorization and are cross-checked by the test suite.
"""

import math

import numpy as np
import scipy.linalg

# Pivot magnitudes below this are treated as exact singularity.
PIVOT_TOL = 1e-300


class SingularMatrixError(Exception):
    """A pivot (or diagonal factor) vanished; the system has no stable solution."""


class NotPositiveDefiniteError(Exception):
    """Cholesky failed: the matrix is not (numerically) positive definite."""


class PLUFactors:
    """Partial-pivoted factorization a[perm] = L @ U.

    `perm` lists, for each factored row position, the source row of the original
    matrix, so ``a[perm] == lower @ upper``. ``perm_sign`` is the parity of that
    permutation. Small systems store scalar factors; larger ones keep the packed
    LAPACK output. The triangular factors are materialized on demand only.
    """

    __slots__ = ("dim", "_small", "_lu", "_piv", "_sign")

    def __init__(self, dim, small=None, lu=None, piv=None, sign=1):
        self.dim = dim
        self._small = small
        self._lu = lu
        self._piv = piv
        self._sign = sign

    @property
    def perm(self):
        if self._small is not None:
            return np.array(self._small[0], dtype=np.intp)
        rows = np.arange(self.dim, dtype=np.intp)
        for i, j in enumerate(self._piv):
            if i != j:
                rows[i], rows[j] = rows[j], rows[i]
        return rows

    @property
    def perm_sign(self):
        return self._sign

    @property
    def lower(self):
        if self._small is not None:
            if self.dim == 1:
                return np.ones((1, 1))
            _, l10, _, _, _ = self._small
            return np.array([[1.0, 0.0], [l10, 1.0]])
        out = np.tril(self._lu, -1)
        np.fill_diagonal(out, 1.0)
        return out

    @property
    def upper(self):
        if self._small is not None:
            if self.dim == 1:
                return np.array([[self._small[2]]])
            _, _, u00, u01, u11 = self._small
            return np.array([[u00, u01], [0.0, u11]])
        return np.triu(self._lu)

    def reassemble(self):
        """Undo the row permutation: returns P @ L @ U in original row order."""
        out = np.empty((self.dim, self.dim))
        out[self.perm] = self.lower @ self.upper
        return out


def plu_factorize(a):
    """Factorize a square matrix as P·L·U with partial pivoting.

    Args:
        a: square array with finite entries.

    Returns:
        PLUFactors.

    Raises:
        SingularMatrixError: if any pivot magnitude falls below ``PIVOT_TOL``.
    """
    m = a.shape[0]
    if m == 1:
        u00 = float(a[0, 0])
        if not math.isfinite(u00):
            raise ValueError("non-finite matrix entry")
        if abs(u00) < PIVOT_TOL:
            raise SingularMatrixError("1x1 pivot underflow")
        return PLUFactors(1, small=((0,), 0.0, u00, 0.0, 0.0))
    if m == 2:
        a00 = float(a[0, 0])
        a01 = float(a[0, 1])
        a10 = float(a[1, 0])
        a11 = float(a[1, 1])
        if not (
            math.isfinite(a00) and math.isfinite(a01)
            and math.isfinite(a10) and math.isfinite(a11)
        ):
            raise ValueError("non-finite matrix entry")
        if abs(a10) > abs(a00):
            rows, sign = (1, 0), -1
            u00, u01, l_src, l_u01 = a10, a11, a00, a01
        else:
            rows, sign = (0, 1), 1
            u00, u01, l_src, l_u01 = a00, a01, a10, a11
        if abs(u00) < PIVOT_TOL:
            raise SingularMatrixError("2x2 pivot underflow")
        l10 = l_src / u00
        u11 = l_u01 - l10 * u01
        if abs(u11) < PIVOT_TOL:
            raise SingularMatrixError("2x2 pivot underflow")
        return PLUFactors(2, small=(rows, l10, u00, u01, u11), sign=sign)

    if not np.isfinite(a).all():
        raise ValueError("non-finite matrix entry")
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.abs(np.diag(lu))
    if diag.min() < PIVOT_TOL:
        raise SingularMatrixError("pivot underflow at size %d" % m)
    sign = 1
    for i, j in enumerate(piv):
        if i != j:
            sign = -sign
    return PLUFactors(m, lu=lu, piv=piv, sign=sign)


def plu_log_abs_det(f):
    """Log-absolute-determinant and sign from PLU factors.

    Returns:
        (log_abs_det, sign) with sign in {-1, +1}; the determinant is
        sign * exp(log_abs_det).
    """
    if f._small is not None:
        if f.dim == 1:
            u00 = f._small[2]
            return math.log(abs(u00)), (1 if u00 > 0 else -1)
        _, _, u00, _, u11 = f._small
        sign = f._sign
        if u00 < 0:
            sign = -sign
        if u11 < 0:
            sign = -sign
        return math.log(abs(u00)) + math.log(abs(u11)), sign
    diag = np.diag(f._lu)
    sign = f._sign * (1 if (diag < 0).sum() % 2 == 0 else -1)
    return float(np.log(np.abs(diag)).sum()), sign


def plu_solve(f, b):
    """Solve a @ x = b using PLU factors of a; b may be a vector or a matrix."""
    if f._small is not None:
        if f.dim == 1:
            return b / f._small[2]
        rows, l10, u00, u01, u11 = f._small
        b0 = b[rows[0]]
        y1 = b[rows[1]] - l10 * b0
        x1 = y1 / u11
        x0 = (b0 - u01 * x1) / u00
        if b.ndim == 1:
            return np.array([x0, x1])
        return np.stack([x0, x1])
    return scipy.linalg.lu_solve((f._lu, f._piv), b, check_finite=False)


def solve(a, b):
    """One-shot PLU solve of a @ x = b."""
    return plu_solve(plu_factorize(a), b)


def log_abs_det(a):
    """One-shot (log_abs_det, sign) of a square matrix via PLU."""
    return plu_log_abs_det(plu_factorize(a))


def cholesky_factorize(a):
    """Lower Cholesky factor L with L @ L.T = a.

    Args:
        a: symmetric positive-definite matrix.

    Returns:
        Lower-triangular array with strictly positive diagonal.

    Raises:
        NotPositiveDefiniteError: if a diagonal update is not strictly positive.
        ValueError: if the input is visibly asymmetric.
    """
    m = a.shape[0]
    if m == 1:
        a00 = float(a[0, 0])
        if a00 <= 0:
            raise NotPositiveDefiniteError("1x1 Cholesky")
        return np.array([[math.sqrt(a00)]])
    if m == 2:
        a00 = float(a[0, 0])
        a10 = float(a[1, 0])
        a11 = float(a[1, 1])
        if abs(a10 - float(a[0, 1])) > 1e-8 * (1.0 + abs(a10)):
            raise ValueError("matrix is not symmetric")
        if a00 <= 0:
            raise NotPositiveDefiniteError("2x2 Cholesky: leading entry")
        l00 = math.sqrt(a00)
        l10 = a10 / l00
        rem = a11 - l10 * l10
        if rem <= 0:
            raise NotPositiveDefiniteError("2x2 Cholesky: trailing entry")
        return np.array([[l00, 0.0], [l10, math.sqrt(rem)]])

    if not np.allclose(a, a.T, rtol=0.0, atol=1e-8 * (1.0 + float(np.abs(a).max()))):
        raise ValueError("matrix is not symmetric")
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc


def triangular_solve(lower, b, transpose=False):
    """Solve L x = b (or L.T x = b when transpose) for lower-triangular L."""
    m = lower.shape[0]
    if m == 1:
        return b / lower[0, 0]
    if m == 2:
        l00 = lower[0, 0]
        l10 = lower[1, 0]
        l11 = lower[1, 1]
        if transpose:
            x1 = b[1] / l11
            x0 = (b[0] - l10 * x1) / l00
        else:
            x0 = b[0] / l00
            x1 = (b[1] - l10 * x0) / l11
        return np.array([x0, x1])
    return scipy.linalg.solve_triangular(
        lower, b, lower=True, trans=(1 if transpose else 0), check_finite=False
    )
