import numpy as np
from numba import njit

from hybridfi.errors import ModelError

DEFAULT_TOL = 1e-7
DEFAULT_MAX_SWEEPS = 10_000


@njit(cache=True, nogil=True)
def _soft_threshold(rho: float, threshold: float) -> float:
    if rho > threshold:
        return rho - threshold
    if rho < -threshold:
        return rho + threshold
    return 0.0


@njit(cache=True, nogil=True)
def _coordinate_descent(gram: np.ndarray, corr: np.ndarray, lam: float, tol: float, max_sweeps: int):
    """
    Cyclic coordinate descent on beta^T G beta - 2 c^T beta + lam * |beta|_1.

    Returns the coefficients and the number of sweeps performed.
    """
    n_features = corr.shape[0]
    beta = np.zeros(n_features)
    # running G @ beta, updated per coordinate
    g_beta = np.zeros(n_features)
    sweeps = 0
    for sweep in range(max_sweeps):
        sweeps = sweep + 1
        max_change = 0.0
        for j in range(n_features):
            g_jj = gram[j, j]
            if g_jj <= 0.0:
                continue
            old = beta[j]
            rho = corr[j] - (g_beta[j] - g_jj * old)
            new = _soft_threshold(rho, 0.5 * lam) / g_jj
            delta = new - old
            if delta != 0.0:
                beta[j] = new
                for k in range(n_features):
                    g_beta[k] += gram[k, j] * delta
                if abs(delta) > max_change:
                    max_change = abs(delta)
        if max_change < tol:
            break
    return beta, sweeps


def weighted_moments(X: np.ndarray, y: np.ndarray, sample_weight: np.ndarray):
    """Weighted means plus the centered Gram matrix and correlation vector."""
    total = sample_weight.sum()
    x_mean = sample_weight @ X / total
    y_mean = float(sample_weight @ y / total)
    Xc = X - x_mean
    yc = y - y_mean
    Xw = Xc * sample_weight[:, None]
    return x_mean, y_mean, Xw.T @ Xc, Xw.T @ yc


def lasso_objective(X, y, sample_weight, lam: float, coef, intercept: float) -> float:
    resid = np.asarray(y) - intercept - np.asarray(X) @ np.asarray(coef)
    return float(np.dot(sample_weight, resid**2) + lam * np.abs(coef).sum())


def weighted_lasso(
    X,
    y,
    sample_weight,
    lam: float,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> tuple[np.ndarray, float]:
    """
    Minimize sum_i w_i (y_i - b0 - x_i^T b)^2 + lam * |b|_1.

    The intercept is unpenalized, so the problem is solved on weighted-centered
    data and b0 is recovered from the weighted means. Weights are used as given
    (not normalized).

    Args:
        X: (n, d) design matrix.
        y: (n,) response.
        sample_weight: (n,) nonnegative weights, at least one positive.
        lam: L1 penalty, >= 0.
        tol: stop once no coefficient moves by more than this in a sweep.
        max_sweeps: hard cap on coordinate sweeps.

    Returns:
        (coefficients, intercept)
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    w = np.asarray(sample_weight, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0] or w.shape[0] != y.shape[0]:
        raise ModelError(f"row mismatch: X {X.shape}, y {y.shape}, weights {w.shape}")
    if lam < 0:
        raise ModelError(f"lasso lambda must be nonnegative, got {lam}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ModelError("sample weights must be finite and nonnegative")
    if not np.any(w > 0):
        raise ModelError("weighted lasso needs at least one positive sample weight")

    x_mean, y_mean, gram, corr = weighted_moments(X, y, w)
    # constant columns keep a zero coefficient
    diag = np.diag(gram)
    constant = diag <= 1e-14 * max(1.0, float(diag.max(initial=0.0)))
    if np.any(constant):
        gram[constant, :] = 0.0
        gram[:, constant] = 0.0
        corr[constant] = 0.0
    beta, _ = _coordinate_descent(np.ascontiguousarray(gram), np.ascontiguousarray(corr), float(lam), float(tol), int(max_sweeps))
    intercept = y_mean - float(x_mean @ beta)
    return beta, intercept
