"""Cyclic coordinate-descent LASSO and the R^2 quality gate.

Objective, on standardized columns and centered response::

    (1 / 2L) * ||y - X b||^2 + lam * ||b||_1

where L is the number of observations (signature coordinates here).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .validation import check_design

EPS_NZ = 1e-8
DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 100_000
DEFAULT_LAMBDA_RATIO = 0.1
# columns whose spread is below this fraction of their magnitude count as constant
_CONST_RTOL = 1e-12


@dataclass
class Standardized:
    """Output of :func:`standardize`."""

    X: np.ndarray
    y: np.ndarray
    x_mean: np.ndarray
    x_scale: np.ndarray
    y_mean: float
    constant: np.ndarray  # bool mask of zero-variance columns


def standardize(X, y) -> Standardized:
    """Center and scale columns to unit (population) variance; center ``y``.

    Zero-variance columns are zeroed and flagged; they never enter the model.
    """
    X, y = check_design(X, y)
    x_mean = X.mean(axis=0)
    Xc = X - x_mean
    x_scale = np.sqrt(np.mean(Xc ** 2, axis=0))
    magnitude = np.maximum(np.abs(X).max(axis=0), 1.0)
    constant = x_scale <= _CONST_RTOL * magnitude
    safe = np.where(constant, 1.0, x_scale)
    Xs = Xc / safe
    Xs[:, constant] = 0.0
    y_mean = float(y.mean())
    return Standardized(Xs, y - y_mean, x_mean, np.where(constant, 0.0, x_scale), y_mean, constant)


def soft_threshold(z, t):
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def lambda_max(Xs: np.ndarray, yc: np.ndarray) -> float:
    """Smallest penalty for which the all-zero solution is optimal."""
    if Xs.size == 0:
        return 0.0
    return float(np.max(np.abs(Xs.T @ yc)) / yc.size)


def objective(Xs, yc, beta, lam) -> float:
    r = yc - Xs @ beta
    return float(r @ r / (2 * yc.size) + lam * np.abs(beta).sum())


@dataclass
class LassoFit:
    """Result of one sparse regression.

    ``beta`` and ``intercept`` are on the original scale; ``beta_std`` on the
    standardized one. ``support`` holds columns with ``|beta_std| > eps_nz``.
    """

    beta: np.ndarray
    intercept: float
    beta_std: np.ndarray
    support: frozenset
    r2: float
    lam: float
    converged: bool
    n_iter: int
    degenerate: bool = False
    objective_history: list = field(default=None, repr=False)


def _coordinate_descent(Xs, yc, lam, tol, max_iter, active, history=None):
    L, p = Xs.shape
    beta = np.zeros(p)
    r = yc.copy()
    # unit variance columns: ||x_j||^2 / L == 1 for non-constant ones
    col_sq = np.einsum("ij,ij->j", Xs, Xs) / L
    idx = [j for j in range(p) if active[j] and col_sq[j] > 0]
    if history is not None:
        history.append(objective(Xs, yc, beta, lam))
    for sweep in range(1, max_iter + 1):
        max_delta = 0.0
        for j in idx:
            xj = Xs[:, j]
            old = beta[j]
            z = xj @ r / L + col_sq[j] * old
            new = np.sign(z) * max(abs(z) - lam, 0.0) / col_sq[j]
            if new != old:
                r -= (new - old) * xj
                beta[j] = new
                max_delta = max(max_delta, abs(new - old))
        if history is not None:
            history.append(objective(Xs, yc, beta, lam))
        if max_delta < tol:
            return beta, True, sweep
    return beta, False, max_iter


def lasso_fit(
    X,
    y,
    lam: float | None = None,
    *,
    lambda_ratio: float | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    eps_nz: float = EPS_NZ,
    refit_ols: bool = False,
    track_objective: bool = False,
) -> LassoFit:
    """Fit the LASSO by cyclic coordinate descent with soft-thresholding.

    Args:
        X: ``(L, p)`` design, one column per candidate.
        y: Length-``L`` response.
        lam: Absolute penalty on the standardized problem.
        lambda_ratio: Penalty as a fraction of ``lambda_max``; used when
            ``lam`` is None (default 0.1).
        tol: Stop once the largest coefficient change in a sweep is below it.
        max_iter: Maximum number of sweeps; hitting it sets ``converged=False``.
        eps_nz: Support threshold on standardized coefficients.
        refit_ols: Compute R^2 from an unpenalized refit on the support
            instead of the penalized fit.
        track_objective: Record the objective after every sweep.

    Returns:
        LassoFit
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    st = standardize(X, y)
    lmax = lambda_max(st.X, st.y)
    if lam is None:
        ratio = DEFAULT_LAMBDA_RATIO if lambda_ratio is None else lambda_ratio
        if ratio < 0:
            raise ValueError("lambda_ratio must be non-negative")
        lam = ratio * lmax
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    history = [] if track_objective else None
    beta_std, converged, n_iter = _coordinate_descent(
        st.X, st.y, lam, tol, max_iter, ~st.constant, history
    )
    beta_std[st.constant] = 0.0
    support = frozenset(int(j) for j in np.flatnonzero(np.abs(beta_std) > eps_nz))
    safe = np.where(st.constant, 1.0, st.x_scale)
    beta = np.where(st.constant, 0.0, beta_std / safe)
    intercept = st.y_mean - float(st.x_mean @ beta)

    Xo, yo = check_design(X, y)
    if refit_ols and support:
        cols = sorted(support)
        A = np.column_stack([np.ones(yo.size), Xo[:, cols]])
        coef, *_ = np.linalg.lstsq(A, yo, rcond=None)
        fitted = A @ coef
    else:
        fitted = intercept + Xo @ beta
    r2, degenerate = _r2(yo, fitted)
    return LassoFit(beta, intercept, beta_std, support, r2, float(lam), converged,
                    n_iter, degenerate, history)


def _r2(y, fitted):
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # spread at rounding level counts as a constant response
    scale = max(1.0, float(np.max(np.abs(y))))
    if ss_tot <= y.size * (1e-14 * scale) ** 2:
        return 0.0, True
    ss_res = float(np.sum((y - fitted) ** 2))
    return 1.0 - ss_res / ss_tot, False


def r_squared(fit: LassoFit, X, y) -> float:
    """``1 - SS_res / SS_tot`` of ``fit`` on ``(X, y)``; 0 for a constant response."""
    X, y = check_design(X, y)
    return _r2(y, fit.intercept + X @ fit.beta)[0]


class CoordinateDescentLasso(RegressorMixin, BaseEstimator):
    """Scikit-learn style wrapper around :func:`lasso_fit`.

    Parameters
    ----------
    alpha : float or None, default=None
        Absolute penalty on the standardized problem. When None the penalty
        is ``lambda_ratio * lambda_max``.
    lambda_ratio : float, default=0.1
    tol : float, default=1e-7
    max_iter : int, default=100000
    """

    def __init__(self, alpha=None, lambda_ratio=DEFAULT_LAMBDA_RATIO, tol=DEFAULT_TOL,
                 max_iter=DEFAULT_MAX_ITER):
        self.alpha = alpha
        self.lambda_ratio = lambda_ratio
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_design(X, y)
        fit = lasso_fit(X, y, self.alpha, lambda_ratio=self.lambda_ratio, tol=self.tol,
                        max_iter=self.max_iter)
        self.coef_ = fit.beta
        self.intercept_ = fit.intercept
        self.support_ = np.array(sorted(fit.support), dtype=int)
        self.r2_ = fit.r2
        self.alpha_ = fit.lam
        self.converged_ = fit.converged
        self.n_iter_ = fit.n_iter
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = np.asarray(X, dtype=float)
        return self.intercept_ + X @ self.coef_
