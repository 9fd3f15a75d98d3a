"""One-class SVM with an RBF kernel, solved by two-coordinate descent.

Training follows the cold-start protocol: the model sees only the first
``train_size`` rows in capture order. The dual is

    min 1/2 a' K a   s.t.  0 <= a_i <= 1/(nu * n_train),  sum a_i = 1,

solved by repeatedly moving mass between the maximally KKT-violating
pair. Prediction is batched so memory stays bounded; results do not
depend on the chunk size.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from paraflow._kernels import smo_solve
from paraflow.detect.base import DetectionResult

DEFAULT_TRAIN_SIZE = 5000
DEFAULT_CHUNK = 20000
DEFAULT_TOL = 1e-3
DEFAULT_MAX_UPDATES = 10_000_000
_KERNEL_ROWS_LIMIT = 16384


@dataclass
class OcsvmModel:
    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    rho: float
    gamma: float
    nu: float
    train_size_used: int
    converged: bool
    kkt_violation: float
    n_updates: int
    fit_time: float = 0.0


def _squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    sq_a = np.einsum("ij,ij->i", a, a)
    sq_b = np.einsum("ij,ij->i", b, b)
    d2 = sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def ocsvm_fit(features: np.ndarray, train_size: int = DEFAULT_TRAIN_SIZE,
              nu: float = 0.1, gamma_mode: str = "scale",
              tol: float = DEFAULT_TOL, seed: int = 0,
              max_updates: int = DEFAULT_MAX_UPDATES) -> OcsvmModel:
    """Fit the one-class boundary on the first train_size rows.

    gamma_mode 'scale' sets gamma = 1 / (m * mean per-feature variance)
    of the training slice. ``seed`` is accepted for interface symmetry;
    the solver itself is deterministic. A fit that hits the update cap
    is still returned, with a warning and converged=False.
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("features must be a non-empty 2-D matrix")
    if not 0.0 < nu <= 1.0:
        raise ValueError("nu must be in (0, 1]")
    train = x[: min(train_size, x.shape[0])]
    n = train.shape[0]
    if nu * n < 1.0:
        raise ValueError(f"nu * n_train = {nu * n:.3g} < 1; boundary underdetermined")
    if n > _KERNEL_ROWS_LIMIT:
        raise ValueError(
            f"train_size {n} exceeds the dense-kernel limit {_KERNEL_ROWS_LIMIT}"
        )
    start = time.perf_counter()
    m = train.shape[1]
    if gamma_mode == "scale":
        mean_var = float(train.var(axis=0).mean())
        gamma = 1.0 / (m * mean_var) if mean_var > 0.0 else 1.0 / m
    else:
        gamma = float(gamma_mode)
        if gamma <= 0.0:
            raise ValueError("gamma must be positive")
    kernel = np.exp(-gamma * _squared_distances(train, train))
    c_box = 1.0 / (nu * n)
    alpha = np.zeros(n, dtype=np.float64)
    n_at_cap = int(nu * n)
    alpha[:n_at_cap] = c_box
    if n_at_cap < n:
        alpha[n_at_cap] = 1.0 - n_at_cap * c_box
    grad = kernel @ alpha
    n_updates, violation = smo_solve(kernel, alpha, grad, c_box, tol, max_updates)
    converged = violation < tol
    if not converged:
        warnings.warn(
            f"one-class SVM stopped at the update cap ({max_updates}) with "
            f"KKT violation {violation:.3g} >= tol {tol:.3g}",
            RuntimeWarning,
        )
    free = (alpha > 0.0) & (alpha < c_box)
    if free.any():
        rho = float(grad[free].mean())
    else:
        upper = grad[alpha < c_box]
        lower = grad[alpha > 0.0]
        hi = float(upper.min()) if upper.size else 0.0
        lo = float(lower.max()) if lower.size else 0.0
        rho = 0.5 * (hi + lo)
    sv_mask = alpha > c_box * 1e-9
    return OcsvmModel(
        support_vectors=train[sv_mask].copy(),
        dual_coefs=alpha[sv_mask].copy(),
        rho=rho,
        gamma=gamma,
        nu=nu,
        train_size_used=n,
        converged=converged,
        kkt_violation=float(violation),
        n_updates=int(n_updates),
        fit_time=time.perf_counter() - start,
    )


def decision_function(model: OcsvmModel, features: np.ndarray,
                      chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    """f(x) = sum_i a_i K(sv_i, x) - rho, computed in row chunks."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.support_vectors.shape[1]:
        raise ValueError(
            f"features have {x.shape[1] if x.ndim == 2 else '?'} columns, "
            f"model was fit on {model.support_vectors.shape[1]}"
        )
    if chunk < 1:
        raise ValueError("chunk must be >= 1")
    out = np.empty(x.shape[0], dtype=np.float64)
    for lo in range(0, x.shape[0], chunk):
        block = x[lo:lo + chunk]
        k = np.exp(-model.gamma * _squared_distances(block, model.support_vectors))
        out[lo:lo + chunk] = k @ model.dual_coefs - model.rho
    return out


def ocsvm_predict(model: OcsvmModel, features: np.ndarray,
                  chunk: int = DEFAULT_CHUNK) -> DetectionResult:
    """Anomaly where the decision value is negative; score is its negation."""
    start = time.perf_counter()
    decision = decision_function(model, features, chunk)
    predictions = (decision < 0.0).astype(np.int64)
    return DetectionResult(
        predictions=predictions,
        scores=-decision,
        fit_time=model.fit_time,
        predict_time=time.perf_counter() - start,
    )
