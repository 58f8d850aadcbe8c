"""Epsilon-SVR trained by sequential minimal optimization.

The dual is minimized in its 2n-variable box form.  Writing theta for the
stacked vector [alpha, alpha_star], z for the stacked signs [+1]*n+[-1]*n
and p = [eps - y, eps + y]:

    minimize   0.5 * theta' Q theta + p' theta
    subject to z' theta = 0,  0 <= theta_t <= C

with Q[s,t] = z_s z_t K(x_{s%n}, x_{t%n}).  Each step picks the maximal
KKT-violating pair (largest -z*G over the "can move up" set against the
smallest over the "can move down" set), solves the two-variable problem
in closed form, clips to the box, and updates the gradient G = Q theta + p
incrementally.  Convergence is declared when the violation gap drops to
`tol`; the bias is the midpoint of the final gap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KERNELS = ("rbf", "linear", "poly")
POLY_DEGREE = 3
POLY_COEF0 = 1.0
SUPPORT_EPS = 1e-8  # dual coefficients at or below this are dropped


class ConvergenceError(RuntimeError):
    """SMO hit its iteration cap before closing the KKT gap."""

    def __init__(self, iterations: int, gap: float):
        self.iterations = iterations
        self.gap = gap
        super().__init__(
            f"SMO did not converge within {iterations} iterations (KKT gap {gap:.3e})"
        )


@dataclass(frozen=True)
class SvrParams:
    c: float = 1.0
    gamma: float | str = "scale"
    kernel: str = "rbf"
    epsilon: float = 0.1
    tol: float = 1e-3
    max_iter: int = 1_000_000

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError("c must be positive")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if isinstance(self.gamma, str):
            if self.gamma != "scale":
                raise ValueError(f"gamma must be positive or 'scale', got {self.gamma!r}")
        elif self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be non-negative")


def resolve_gamma(params: SvrParams, X: np.ndarray) -> float:
    """Numeric gamma; 'scale' means 1/(n_dims * var(X)), var 0 counts as 1."""
    if not isinstance(params.gamma, str):
        return float(params.gamma)
    X = np.asarray(X, dtype=np.float64)
    var = float(X.var())
    if var <= 0.0:
        var = 1.0
    return 1.0 / (X.shape[1] * var)


def kernel_matrix(kernel: str, gamma: float, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """K[i, j] = k(A[i], B[j]) for the named kernel."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if kernel == "linear":
        return A @ B.T
    if kernel == "poly":
        return (gamma * (A @ B.T) + POLY_COEF0) ** POLY_DEGREE
    if kernel == "rbf":
        sq = (
            np.sum(A**2, axis=1)[:, None]
            + np.sum(B**2, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"unknown kernel {kernel!r}")


def smo_solve(
    K: np.ndarray,
    y: np.ndarray,
    c: float,
    epsilon: float,
    tol: float = 1e-3,
    max_iter: int = 1_000_000,
) -> tuple[np.ndarray, float, int]:
    """Solve the epsilon-SVR dual for a precomputed kernel matrix.

    Returns (beta, bias, iterations) where beta = alpha - alpha_star, so
    the fitted function is f(x) = sum_i beta_i k(x_i, x) + bias.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    if K.shape != (n, n):
        raise ValueError(f"kernel matrix shape {K.shape} does not match {n} targets")

    z = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([epsilon - y, epsilon + y])
    theta = np.zeros(2 * n)
    G = p.copy()  # gradient of the dual objective at theta = 0
    K2 = np.vstack([K, K])  # row t is K[t % n, :]

    iterations = 0
    while True:
        up = (z > 0) & (theta < c) | (z < 0) & (theta > 0)
        low = (z > 0) & (theta > 0) | (z < 0) & (theta < c)
        v = -z * G
        vi = np.where(up, v, -np.inf)
        vj = np.where(low, v, np.inf)
        i = int(np.argmax(vi))
        j = int(np.argmin(vj))
        m, M = vi[i], vj[j]
        if m - M <= tol:
            bias = (m + M) / 2.0
            break
        if iterations >= max_iter:
            raise ConvergenceError(iterations, float(m - M))
        iterations += 1

        quad = max(K2[i, i % n] + K2[j, j % n] - 2.0 * K2[i, j % n], 1e-12)
        room_i = (c - theta[i]) if z[i] > 0 else theta[i]
        room_j = theta[j] if z[j] > 0 else (c - theta[j])
        lam = min((m - M) / quad, room_i, room_j)

        theta[i] += z[i] * lam
        theta[j] -= z[j] * lam
        # snap exact bounds so the working-set masks stay crisp
        for t in (i, j):
            if theta[t] < 1e-14:
                theta[t] = 0.0
            elif theta[t] > c - 1e-14:
                theta[t] = c
        G += lam * z * (K2[:, i % n] - K2[:, j % n])

    # wash out incremental drift before reading the bias off the gradient
    Kbeta = K @ (theta[:n] - theta[n:])
    G = np.concatenate([Kbeta, -Kbeta]) + p
    v = -z * G
    up = (z > 0) & (theta < c) | (z < 0) & (theta > 0)
    low = (z > 0) & (theta > 0) | (z < 0) & (theta < c)
    bias = (np.max(v[up]) + np.min(v[low])) / 2.0

    return theta[:n] - theta[n:], float(bias), iterations


@dataclass
class SvrModel:
    """Fitted expansion f(x) = sum_i dual_coefs[i] k(sv_i, x) + bias."""

    support_vectors: np.ndarray  # m x k
    dual_coefs: np.ndarray  # m-vector, each in [-C, C]
    bias: float
    params: SvrParams
    gamma_value: float  # numeric gamma actually used (resolves "scale")


def svr_fit(X: np.ndarray, y: np.ndarray, params: SvrParams) -> SvrModel:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] != y.size:
        raise ValueError(f"{X.shape[0]} rows but {y.size} targets")
    if X.shape[0] < 2:
        raise ValueError("need at least 2 training points")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite training data")

    gamma = resolve_gamma(params, X)
    K = kernel_matrix(params.kernel, gamma, X, X)
    beta, bias, _ = smo_solve(K, y, params.c, params.epsilon, params.tol, params.max_iter)

    keep = np.abs(beta) > SUPPORT_EPS
    return SvrModel(
        support_vectors=X[keep].copy(),
        dual_coefs=beta[keep].copy(),
        bias=bias,
        params=params,
        gamma_value=gamma,
    )


def svr_predict(model: SvrModel, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if model.support_vectors.shape[0] == 0:
        return np.full(X.shape[0], model.bias)
    if X.shape[1] != model.support_vectors.shape[1]:
        raise ValueError(
            f"expected {model.support_vectors.shape[1]} columns, got {X.shape[1]}"
        )
    K = kernel_matrix(model.params.kernel, model.gamma_value, X, model.support_vectors)
    return K @ model.dual_coefs + model.bias
