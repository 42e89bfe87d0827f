"""Dense symmetric linear algebra: scatter matrices, Jacobi eigensolver, projections.

The eigensolver is a cyclic Jacobi method. Its inner loop is compiled with
numba when available; the pure-Python fallback gives identical results, only
slower.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DataError, NumericalError

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a symmetric matrix.

    Attributes
    ----------
    eigenvalues : ndarray of shape (d,)
        Sorted in descending order.
    eigenvectors : ndarray of shape (d, d)
        Orthonormal columns; column ``n`` pairs with ``eigenvalues[n]``.
    sweeps : int
        Number of Jacobi sweeps used.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self):
        w = self.eigenvectors
        return (w * self.eigenvalues) @ w.T


def _as_samples(samples):
    try:
        x = np.asarray(samples, dtype=float)
    except ValueError as exc:  # ragged input
        raise DataError(f"samples have mismatched dimensions: {exc}") from None
    if x.ndim == 1 and x.size == 0:
        raise DataError("empty class")
    if x.ndim != 2:
        raise DataError(f"samples must form a 2-d array, got shape {x.shape}")
    if x.shape[0] == 0:
        raise DataError("empty class")
    return x


def scatter_and_mean(samples):
    """Return the mean and the unnormalized scatter ``sum (x - mean)(x - mean)^T``.

    No ``1/K`` factor is applied. The result is symmetrized so both stored
    triangles agree exactly.
    """
    x = _as_samples(samples)
    if np.all(x == x[0]):
        # the computed mean of equal floats can be off by an ulp
        return x[0].copy(), np.zeros((x.shape[1], x.shape[1]))
    mean = x.mean(axis=0)
    centered = x - mean
    scatter = centered.T @ centered
    scatter = 0.5 * (scatter + scatter.T)
    return mean, scatter


@njit(cache=True)
def _jacobi_sweeps(a, v, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        off = np.sqrt(off)
        if off <= tol:
            return sweep, off
        if sweep == max_sweeps:
            return -1, off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return -1, off


def sym_eigen(matrix, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Iterates until the off-diagonal Frobenius norm drops to ``tol * ||S||_F``.
    Eigenvalues come back in descending order (stable with respect to the
    rotation output on ties) and each eigenvector is signed so that its
    largest-magnitude entry is positive.

    Raises
    ------
    NumericalError
        If the input contains NaN or Inf.
    DataError
        If the input is not square and symmetric.
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    s = np.array(matrix, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DataError(f"expected a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise NumericalError("matrix has non-finite entries")
    scale = np.max(np.abs(s)) if s.size else 0.0
    if np.max(np.abs(s - s.T), initial=0.0) > 1e-12 * max(scale, 1e-300):
        raise DataError("matrix is not symmetric")
    # keep the upper triangle as the single source of truth
    s = np.triu(s) + np.triu(s, 1).T
    n = s.shape[0]
    v = np.eye(n)
    threshold = tol * np.linalg.norm(s)
    sweeps, residual = _jacobi_sweeps(s, v, threshold, int(max_sweeps))
    if sweeps < 0:
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge in {max_sweeps} sweeps", residual
        )
    values = np.diag(s).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    if n:
        lead = np.argmax(np.abs(vectors), axis=0)
        signs = np.sign(vectors[lead, np.arange(n)])
        signs[signs == 0] = 1.0
        vectors = vectors * signs
    return EigenDecomposition(values, vectors, int(sweeps))


def project_residual(v, basis, atol=1e-8):
    """Remove from ``v`` its component in ``span(basis)``.

    ``basis`` is a sequence of mutually orthonormal vectors (rows), or an
    empty sequence.
    """
    v = np.asarray(v, dtype=float)
    if len(basis) == 0:
        return v.copy()
    b = np.asarray(basis, dtype=float).reshape(-1, v.shape[-1])
    gram = b @ b.T
    if np.max(np.abs(gram - np.eye(len(b)))) > atol:
        raise DataError("basis vectors are not orthonormal")
    return v - (v @ b.T) @ b
