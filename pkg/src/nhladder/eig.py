"""Verified dense non-symmetric eigendecomposition.

Every decomposition is checked before it is returned: per-eigenpair
residuals against a norm-scaled tolerance, the trace identity, and (for
real input) closure of the spectrum under complex conjugation. A failed
check raises ConvergenceError rather than returning silently wrong data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .fock import CapacityError, resolve_capacity
from .model import SparseOperator

TRACE_RTOL = 1e-8
CONJ_ATOL = 1e-10


class ConvergenceError(RuntimeError):
    """Eigensolver output failed residual, trace, or conjugation checks."""


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues, right eigenvectors (columns), residuals, and the
    infinity norm of the matrix that produced them."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    matrix_norm: float

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)


def default_eps_im(matrix_norm: float) -> float:
    """Default threshold separating numerically real from complex spectra."""
    return max(1e-9, 1e-12 * matrix_norm)


def _balance(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal similarity scaling that equalizes row and column weight.

    Skin-effect matrices are strongly non-normal, which makes their
    eigenvalues ill-conditioned for QR iteration. Scaling D^-1 H D toward
    balanced row/column sums restores near-normality without changing the
    spectrum. Returns the rescaled matrix and the diagonal of D. The sweep
    budget shrinks with dimension so balancing stays a negligible fraction
    of the O(n^3) eigensolve.
    """
    n = matrix.shape[0]
    if n < 2:
        return matrix, np.ones(n)
    work = np.abs(matrix).astype(float)
    np.fill_diagonal(work, 0.0)
    d = np.ones(n)
    sweeps = min(1000, 12 + int(4e7) // (n * n))
    for _ in range(sweeps):
        col = work.sum(axis=0)
        row = work.sum(axis=1)
        active = (col > 0.0) & (row > 0.0)
        factor = np.ones(n)
        factor[active] = np.sqrt(row[active] / col[active])
        np.clip(factor, 0.25, 4.0, out=factor)
        np.clip(factor, 1e-12 / d, 1e12 / d, out=factor)
        if np.max(np.abs(np.log(factor))) < 1e-10:
            break
        d *= factor
        work *= factor[np.newaxis, :]
        work /= factor[:, np.newaxis]
    # one rescale of the original entries keeps rounding to a single step
    balanced = matrix * (d[np.newaxis, :] / d[:, np.newaxis])
    np.fill_diagonal(balanced, matrix.diagonal())
    return balanced, d


def _check_conjugate_closure(eigenvalues: np.ndarray) -> None:
    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    conj = np.conj(eigenvalues)
    order_c = np.lexsort((conj.imag, conj.real))
    if not np.allclose(eigenvalues[order], conj[order_c],
                       rtol=0.0, atol=CONJ_ATOL):
        raise ConvergenceError("spectrum of a real matrix is not closed under "
                               "complex conjugation within tolerance")


def eigendecompose(operator: Union[SparseOperator, np.ndarray],
                   tol: float = 1e-9,
                   capacity: Optional[int] = None) -> SpectrumResult:
    """Full eigendecomposition with mandatory verification.

    Accepts a SparseOperator or a dense square array. Raises CapacityError
    when the dimension exceeds the size budget, ConvergenceError when any
    eigenpair residual exceeds tol * norm(H, inf) or the trace or
    conjugation checks fail.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if isinstance(operator, SparseOperator):
        dim = operator.dimension
        cap = resolve_capacity(capacity)
        if dim > cap:
            raise CapacityError(f"matrix dimension {dim} exceeds capacity {cap}")
        matrix = operator.to_dense()
    else:
        matrix = np.asarray(operator)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
        dim = matrix.shape[0]
        cap = resolve_capacity(capacity)
        if dim > cap:
            raise CapacityError(f"matrix dimension {dim} exceeds capacity {cap}")

    real_input = not np.iscomplexobj(matrix)
    norm = float(np.max(np.sum(np.abs(matrix), axis=1))) if dim else 0.0

    balanced, diag = _balance(matrix)
    eigenvalues, eigenvectors = np.linalg.eig(balanced)
    eigenvectors = eigenvectors * diag[:, np.newaxis]

    scales = np.linalg.norm(eigenvectors, axis=0)
    if np.any(scales == 0.0):
        raise ConvergenceError("eigensolver returned a zero eigenvector")
    eigenvectors = eigenvectors / scales

    residual_matrix = matrix @ eigenvectors - eigenvectors * eigenvalues
    residuals = np.linalg.norm(residual_matrix, axis=0)
    bound = tol * max(norm, 1e-300)
    worst = int(np.argmax(residuals)) if dim else 0
    if dim and residuals[worst] > bound:
        raise ConvergenceError(f"eigenpair residual {residuals[worst]:.3e} at index "
                               f"{worst} exceeds bound {bound:.3e}")

    trace_gap = abs(np.sum(eigenvalues) - np.trace(matrix))
    if trace_gap > TRACE_RTOL * max(norm, 1e-300) * max(dim, 1):
        raise ConvergenceError(f"eigenvalue sum deviates from trace by {trace_gap:.3e}")

    if real_input and dim:
        _check_conjugate_closure(eigenvalues)

    return SpectrumResult(eigenvalues=eigenvalues,
                          eigenvectors=eigenvectors,
                          residuals=residuals,
                          matrix_norm=norm)


def max_imag(result: SpectrumResult) -> float:
    """Largest imaginary part over the spectrum (signed, not absolute)."""
    return float(np.max(result.eigenvalues.imag))


def is_spectrum_real(result: SpectrumResult, eps_im: Optional[float] = None) -> bool:
    """Whether all eigenvalues are real within eps_im (default scales with
    the matrix norm)."""
    eps = default_eps_im(result.matrix_norm) if eps_im is None else eps_im
    if eps < 0.0:
        raise ValueError(f"eps_im must be non-negative, got {eps}")
    return float(np.max(np.abs(result.eigenvalues.imag))) <= eps
