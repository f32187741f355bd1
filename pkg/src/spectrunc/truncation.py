r"""The approximate order isomorphism on the torus.

``truncate`` sends a sampled function x to the n x n Toeplitz matrix of its
Fourier coefficients (entry (j, l) is the coefficient at j - l); ``sn_map``
sends a matrix back to the function

    S_n(A)(z) = (1/n) * sum_{j,l=0..n-1} A_{j,l} e^{i (j-l) z},

and the round trip ``smooth`` is exactly Fejer smoothing: the coefficient
at k is damped by (1 - |k|/n) for |k| < n and dropped beyond.

Matrices are plain complex ndarrays.  Products of Toeplitz matrices are not
Toeplitz, so intermediate products are kept dense; desk-scale O(n^3) dense
products are deliberate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AliasingError
from .torus import SampledFunction, TorusGrid

__all__ = [
    "ToeplitzRep",
    "truncate",
    "sn_map",
    "sn_map_at",
    "smooth",
    "adjoint",
    "matmul",
    "matpow",
    "operator_norm",
]


@dataclass(frozen=True)
class ToeplitzRep:
    """R_n(x) stored as the coefficient vector of length 2n-1.

    ``coeffs[k + n - 1]`` is the Fourier coefficient of the source function
    at frequency k, for k = -(n-1)..(n-1).  The dense expansion has entry
    (j, l) equal to the coefficient at j - l.
    """

    n: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"truncation order must be positive, got n={self.n}")
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (2 * self.n - 1,):
            raise ValueError(
                f"coefficient vector must have length 2n-1={2 * self.n - 1}, "
                f"got shape {coeffs.shape}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.n - 1:
            raise IndexError(f"coefficient index |k|={abs(k)} out of range n-1={self.n - 1}")
        return complex(self.coeffs[k + self.n - 1])

    def dense(self) -> np.ndarray:
        idx = np.arange(self.n)[:, None] - np.arange(self.n)[None, :] + self.n - 1
        return self.coeffs[idx]

    def is_hermitian_source(self, tol: float = 1e-10) -> bool:
        """True when coeffs[-k] = conj(coeffs[k]) within tol, i.e. the dense
        matrix is Hermitian (real-valued source function)."""
        return bool(
            np.max(np.abs(self.coeffs[::-1] - np.conj(self.coeffs))) <= tol
        )


def grid_coefficients(x: SampledFunction, kmax: int, allow_aliasing: bool = False) -> np.ndarray:
    """Rectangle-rule Fourier coefficients of x for k = -kmax..kmax.

    Computed from the DFT of the grid values, so coefficient k is the DFT
    bin at k mod m.  In the strict (default) regime every requested k must
    satisfy |k| < m/2, where the bin equals the true coefficient of any
    degree-<m/2 trigonometric polynomial; with ``allow_aliasing`` the folded
    bins are returned as-is, which is what evaluating the defining
    quadrature at an under-resolved k produces.
    """
    m = x.grid.m
    if not allow_aliasing and 2 * kmax >= m:
        raise AliasingError(
            f"coefficients up to |k|={kmax} alias on an m={m} grid "
            "(need |k| < m/2); pass allow_aliasing=True to fold bins"
        )
    bins = np.fft.fft(x.values) / m
    ks = np.arange(-kmax, kmax + 1)
    return bins[np.mod(ks, m)]


def truncate(x: SampledFunction, n: int, allow_aliasing: bool = False) -> ToeplitzRep:
    """Spectral truncation R_n(x): the Toeplitz matrix of coefficients
    -(n-1)..(n-1), stored as a coefficient vector.

    Raises
    ------
    AliasingError
        If n - 1 >= m/2 and ``allow_aliasing`` is False.
    """
    if n < 1:
        raise ValueError(f"truncation order must be positive, got n={n}")
    return ToeplitzRep(n, grid_coefficients(x, n - 1, allow_aliasing=allow_aliasing))


def _diagonal_sums(A: np.ndarray) -> np.ndarray:
    """Sums over the diagonals j - l = k of a square matrix,
    returned for k = -(n-1)..(n-1)."""
    n = A.shape[0]
    return np.array([np.trace(A, offset=-k) for k in range(-(n - 1), n)])


def sn_map(A: np.ndarray, grid: TorusGrid) -> SampledFunction:
    """S_n(A) sampled on the grid.

    Computed by grouping the double sum by diagonals: O(n^2) for the sums
    plus O(n m) for the evaluation.
    """
    return SampledFunction(grid, sn_map_at(A, grid.points))


def sn_map_at(A: np.ndarray, z) -> np.ndarray:
    """S_n(A)(z) = (1/n) sum_k (sum of diagonal j-l=k) e^{ikz} at arbitrary
    points z (scalar or array)."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    d = _diagonal_sums(A)
    ks = np.arange(-(n - 1), n)
    z = np.asarray(z, dtype=float)
    return (d @ np.exp(1j * ks[:, None] * z.reshape(1, -1))).reshape(z.shape) / n


def smooth(x: SampledFunction, n: int, allow_aliasing: bool = False) -> SampledFunction:
    """Round trip S_n(R_n(x)), i.e. Fejer smoothing of x at order n."""
    return sn_map(truncate(x, n, allow_aliasing=allow_aliasing).dense(), x.grid)


def adjoint(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(A)).T


def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"size mismatch: {A.shape} @ {B.shape}")
    return A @ B


def matpow(A: np.ndarray, q: int) -> np.ndarray:
    """Repeated product A^q, q >= 1."""
    if q < 1:
        raise ValueError(f"power must be >= 1, got q={q}")
    out = np.asarray(A)
    for _ in range(q - 1):
        out = matmul(out, A)
    return out


def operator_norm(A: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(A, dtype=complex), ord=2))
