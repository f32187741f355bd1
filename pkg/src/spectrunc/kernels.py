r"""The three truncated kernel families and their commutative limits.

Each family maps a pair of function tuples to a function on the torus:

    poly:  S_n( sum_i alpha_i (R_n(x_i)^*)^q R_n(y_i)^q )
    prod:  S_n( prod_j R_n(g_{1,j})^* prod_j R_n(g_{2,j}) ) + beta * offset,
           where g_{i,j}(z) = base_{i,j}(x(z), y(z)) and the offset is the
           factorized 2q-fold integral prod_j int conj(g_{1,j}) int g_{2,j}
    sep:   base(smooth(x), smooth(y)) * S_n( prod_j R_n(a_j)^* prod_j R_n(a_j) )

Setting ``n = INF`` selects the pointwise commutative limits the truncated
kernels converge to:

    poly:  sum_i alpha_i (conj(x_i) y_i)^q
    prod:  prod_j conj(g_{1,j}) g_{2,j}          (offset forced to 0)
    sep:   base(x, y) * prod_j conj(a_j) a_j

Single-pair evaluation goes through the dense matrix calculus.  Gram and
cross-kernel assembly use a mathematically identical matrix-free route,
S_n(A^* B)(z) = (1/n) (A u(z))^* (B u(z)) with u(z)_r = e^{-irz}, which
turns each Toeplitz-times-u product into windowed prefix sums; the two
routes are pinned against each other in the test suite.
"""

from __future__ import annotations

import dataclasses
import functools
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, ConfigError, GridMismatchError
from .torus import FunctionTuple, SampledFunction, TorusGrid, integrate
from .truncation import adjoint, matmul, matpow, sn_map, smooth, truncate

__all__ = [
    "INF",
    "GaussianKernel",
    "LinearKernel",
    "PolynomialKernel",
    "L2GaussianTupleKernel",
    "PolyKernel",
    "ProdKernel",
    "SepKernel",
    "KernelSpec",
    "evaluate",
    "k_poly",
    "k_prod",
    "k_sep",
    "kernel_limit_gap",
    "gram_values",
    "cross_values",
]

INF = float("inf")


# ---------------------------------------------------------------------------
# base scalar kernels on pairs of complex d-vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianKernel:
    """k(u, v) = exp(-gamma |u - v|^2); values in (0, 1]."""

    gamma: float

    kind = "gaussian"

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigError(f"gaussian scale must be positive, got {self.gamma}")

    def pairwise(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        d2 = np.sum(np.abs(u - v) ** 2, axis=-1)
        return np.exp(-self.gamma * d2).astype(complex)


@dataclass(frozen=True)
class LinearKernel:
    """Sesquilinear inner product k(u, v) = sum_i conj(u_i) v_i."""

    kind = "linear"

    def pairwise(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.sum(np.conj(u) * v, axis=-1)


@dataclass(frozen=True)
class PolynomialKernel:
    """k(u, v) = (sum_i conj(u_i) v_i + offset)^degree, offset >= 0."""

    degree: int
    offset: float = 1.0

    kind = "polynomial"

    def __post_init__(self):
        if self.degree < 1:
            raise ConfigError(f"polynomial degree must be >= 1, got {self.degree}")
        if self.offset < 0:
            raise ConfigError(f"polynomial offset must be >= 0, got {self.offset}")

    def pairwise(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return (np.sum(np.conj(u) * v, axis=-1) + self.offset) ** self.degree


BaseScalarKernel = GaussianKernel | LinearKernel | PolynomialKernel


@dataclass(frozen=True)
class L2GaussianTupleKernel:
    """Function-tuple kernel exp(-scale * sum_i ||x_i - y_i||^2_{L2})."""

    scale: float

    kind = "l2_gaussian"

    def __post_init__(self):
        if self.scale <= 0:
            raise ConfigError(f"tuple-kernel scale must be positive, got {self.scale}")

    def __call__(self, x: FunctionTuple, y: FunctionTuple) -> complex:
        d2 = self.distance_sq(x.value_matrix()[None], y.value_matrix()[None])
        return complex(np.exp(-self.scale * d2[0]))

    def distance_sq(self, xv: np.ndarray, yv: np.ndarray) -> np.ndarray:
        """Summed squared L2 distances for stacks of value matrices (..., m, d)."""
        return np.mean(np.abs(xv - yv) ** 2, axis=-2).sum(axis=-1)

    def from_distance_sq(self, d2: np.ndarray) -> np.ndarray:
        return np.exp(-self.scale * d2).astype(complex)


# ---------------------------------------------------------------------------
# kernel specifications
# ---------------------------------------------------------------------------


def _check_n_q(n, q: int) -> None:
    if q < 1:
        raise ConfigError(f"degree q must be >= 1, got {q}")
    if n != INF and (not float(n).is_integer() or n < 1):
        raise ConfigError(f"truncation n must be a positive integer or INF, got {n}")


@dataclass(frozen=True)
class PolyKernel:
    """Truncated polynomial family; alpha holds one weight per component."""

    n: int | float
    q: int
    alpha: tuple[float, ...]

    family = "poly"

    def __post_init__(self):
        _check_n_q(self.n, self.q)
        alpha = tuple(float(a) for a in self.alpha)
        if not alpha or any(a < 0 for a in alpha):
            raise ConfigError("alpha must be a nonempty tuple of weights >= 0")
        object.__setattr__(self, "alpha", alpha)

    @property
    def is_infinite(self) -> bool:
        return self.n == INF


@dataclass(frozen=True)
class ProdKernel:
    """Truncated product family with the positive-definiteness offset beta.

    ``bases1``/``bases2`` each hold q base scalar kernels.  beta is forced
    to 0 at n = INF, where the offset is not part of the limit kernel.
    """

    n: int | float
    q: int
    bases1: tuple[BaseScalarKernel, ...]
    bases2: tuple[BaseScalarKernel, ...]
    beta: float = 0.0
    beta_policy: str = "manual"

    family = "prod"

    def __post_init__(self):
        _check_n_q(self.n, self.q)
        if len(self.bases1) != self.q or len(self.bases2) != self.q:
            raise ConfigError(f"need exactly q={self.q} base kernels per row")
        object.__setattr__(self, "bases1", tuple(self.bases1))
        object.__setattr__(self, "bases2", tuple(self.bases2))
        if self.beta < 0:
            raise ConfigError(f"beta must be >= 0, got {self.beta}")
        if self.n == INF:
            object.__setattr__(self, "beta", 0.0)

    @property
    def is_infinite(self) -> bool:
        return self.n == INF


@dataclass(frozen=True)
class SepKernel:
    """Truncated separable family: a tuple-level scalar kernel times the
    fixed weight function built from a_1..a_q."""

    n: int | float
    q: int
    weights: tuple[SampledFunction, ...]
    base: L2GaussianTupleKernel

    family = "sep"

    def __post_init__(self):
        _check_n_q(self.n, self.q)
        if len(self.weights) != self.q:
            raise ConfigError(f"need exactly q={self.q} weight functions")
        object.__setattr__(self, "weights", tuple(self.weights))
        grid = self.weights[0].grid
        if any(w.grid != grid for w in self.weights):
            raise GridMismatchError("weight functions live on different grids")

    @property
    def is_infinite(self) -> bool:
        return self.n == INF


KernelSpec = PolyKernel | ProdKernel | SepKernel


def _check_pair(spec: KernelSpec, x: FunctionTuple, y: FunctionTuple) -> TorusGrid:
    if x.grid != y.grid:
        raise GridMismatchError("input tuples live on different grids")
    if isinstance(spec, PolyKernel) and x.d != len(spec.alpha):
        raise ConfigError(f"alpha has {len(spec.alpha)} weights but inputs have d={x.d}")
    if x.d != y.d:
        raise ConfigError(f"input tuples have different d: {x.d} vs {y.d}")
    if isinstance(spec, SepKernel) and spec.weights[0].grid != x.grid:
        raise GridMismatchError("separable weights live on a different grid than the inputs")
    return x.grid


def _base_values(base: BaseScalarKernel, x: FunctionTuple, y: FunctionTuple) -> np.ndarray:
    """Grid samples of z -> base(x(z), y(z))."""
    return base.pairwise(x.value_matrix(), y.value_matrix())


# ---------------------------------------------------------------------------
# single-pair evaluation (dense reference route)
# ---------------------------------------------------------------------------


def k_poly(spec: PolyKernel, x: FunctionTuple, y: FunctionTuple,
           allow_aliasing: bool = False) -> SampledFunction:
    grid = _check_pair(spec, x, y)
    if spec.is_infinite:
        vals = np.zeros(grid.m, dtype=complex)
        for a, xc, yc in zip(spec.alpha, x.components, y.components):
            vals += a * (np.conj(xc.values) * yc.values) ** spec.q
        return SampledFunction(grid, vals)
    n = int(spec.n)
    acc = np.zeros((n, n), dtype=complex)
    for a, xc, yc in zip(spec.alpha, x.components, y.components):
        left = matpow(adjoint(truncate(xc, n, allow_aliasing).dense()), spec.q)
        right = matpow(truncate(yc, n, allow_aliasing).dense(), spec.q)
        acc += a * matmul(left, right)
    return sn_map(acc, grid)


def prod_offset(spec: ProdKernel, x: FunctionTuple, y: FunctionTuple) -> complex:
    """The factorized 2q-fold integral multiplying beta:
    prod_j int conj(g_{1,j}) dt * int g_{2,j} dt (normalized measure)."""
    grid = x.grid
    out = 1.0 + 0.0j
    for b1, b2 in zip(spec.bases1, spec.bases2):
        g1 = SampledFunction(grid, _base_values(b1, x, y))
        g2 = SampledFunction(grid, _base_values(b2, x, y))
        out *= integrate(g1.conj()) * integrate(g2)
    return out


def k_prod(spec: ProdKernel, x: FunctionTuple, y: FunctionTuple,
           allow_aliasing: bool = False) -> SampledFunction:
    grid = _check_pair(spec, x, y)
    g1 = [SampledFunction(grid, _base_values(b, x, y)) for b in spec.bases1]
    g2 = [SampledFunction(grid, _base_values(b, x, y)) for b in spec.bases2]
    if spec.is_infinite:
        vals = np.ones(grid.m, dtype=complex)
        for f1, f2 in zip(g1, g2):
            vals *= np.conj(f1.values) * f2.values
        return SampledFunction(grid, vals)
    n = int(spec.n)
    left = np.eye(n, dtype=complex)
    for f in g1:
        left = matmul(left, adjoint(truncate(f, n, allow_aliasing).dense()))
    right = np.eye(n, dtype=complex)
    for f in g2:
        right = matmul(right, truncate(f, n, allow_aliasing).dense())
    vals = sn_map(matmul(left, right), grid).values
    if spec.beta:
        vals = vals + spec.beta * prod_offset(spec, x, y)
    return SampledFunction(grid, vals)


def sep_weight_matrix(spec: SepKernel, allow_aliasing: bool = False) -> np.ndarray:
    """prod_j R_n(a_j)^* prod_j R_n(a_j) for finite n."""
    n = int(spec.n)
    left = np.eye(n, dtype=complex)
    for a in spec.weights:
        left = matmul(left, adjoint(truncate(a, n, allow_aliasing).dense()))
    right = np.eye(n, dtype=complex)
    for a in spec.weights:
        right = matmul(right, truncate(a, n, allow_aliasing).dense())
    return matmul(left, right)


def _smooth_tuple(t: FunctionTuple, n: int, allow_aliasing: bool) -> FunctionTuple:
    return FunctionTuple(tuple(smooth(c, n, allow_aliasing) for c in t.components))


def k_sep(spec: SepKernel, x: FunctionTuple, y: FunctionTuple,
          allow_aliasing: bool = False) -> SampledFunction:
    grid = _check_pair(spec, x, y)
    if spec.is_infinite:
        scalar = spec.base(x, y)
        vals = np.ones(grid.m, dtype=complex)
        for a in spec.weights:
            vals *= np.conj(a.values) * a.values
        return SampledFunction(grid, scalar * vals)
    n = int(spec.n)
    scalar = spec.base(_smooth_tuple(x, n, allow_aliasing),
                       _smooth_tuple(y, n, allow_aliasing))
    wvals = sn_map(sep_weight_matrix(spec, allow_aliasing), grid).values
    return SampledFunction(grid, scalar * wvals)


def evaluate(spec: KernelSpec, x: FunctionTuple, y: FunctionTuple,
             allow_aliasing: bool = False) -> SampledFunction:
    """Evaluate one kernel value k(x, y) as a sampled function."""
    if isinstance(spec, PolyKernel):
        return k_poly(spec, x, y, allow_aliasing)
    if isinstance(spec, ProdKernel):
        return k_prod(spec, x, y, allow_aliasing)
    if isinstance(spec, SepKernel):
        return k_sep(spec, x, y, allow_aliasing)
    raise ConfigError(f"unknown kernel spec {type(spec).__name__}")


def kernel_limit_gap(spec: KernelSpec, x: FunctionTuple, y: FunctionTuple,
                     n_list, allow_aliasing: bool = False) -> list[tuple[int, float, float]]:
    """Pointwise gaps |k_n(x,y) - k_INF(x,y)| for each n in n_list.

    Returns (n, sup_gap, mean_gap) rows.  All finite-n specs share every
    parameter with the limit spec.
    """
    limit = evaluate(dataclasses.replace(spec, n=INF), x, y)
    rows = []
    for n in n_list:
        fin = evaluate(dataclasses.replace(spec, n=int(n)), x, y, allow_aliasing)
        gap = np.abs(fin.values - limit.values)
        rows.append((int(n), float(np.max(gap)), float(np.mean(gap))))
    return rows


# ---------------------------------------------------------------------------
# batched evaluation: Gram fields and cross-kernel blocks
#
# Everything below computes the same values as `evaluate`, restructured as
# S_n(A^* B)(z) = (1/n) (A u(z))^* (B u(z)) with u(z)_r = e^{-irz}, so the
# per-pair work is O(n m) for q = 1 instead of O(n^3).
# ---------------------------------------------------------------------------


_PAIR_CHUNK_BUDGET = 1 << 22  # complex elements per (chunk, 2n-1, m) workspace


def _batch_grid_coeffs(values: np.ndarray, grid: TorusGrid, n: int,
                       allow_aliasing: bool) -> np.ndarray:
    """Rectangle-rule coefficients -(n-1)..(n-1) for a stack of grid-value
    rows (B, m) -> (B, 2n-1)."""
    m = grid.m
    if not allow_aliasing and 2 * (n - 1) >= m:
        raise AliasingError(
            f"truncation n={n} aliases on an m={m} grid; "
            "pass allow_aliasing=True to fold bins"
        )
    bins = np.fft.fft(values, axis=-1) / m
    ks = np.arange(-(n - 1), n)
    return bins[..., np.mod(ks, m)]


def _toeplitz_times_phase(coeffs: np.ndarray, grid: TorusGrid, n: int) -> np.ndarray:
    """T u(z_p) for a stack of Toeplitz coefficient rows.

    coeffs (..., 2n-1) -> (..., n, m):  (T u(z))_r = e^{-irz} *
    (prefix-sum window r..r+n-1 of t_k e^{ikz}).
    """
    z = grid.points
    ks = np.arange(-(n - 1), n)
    phase = np.exp(1j * ks[:, None] * z[None, :])          # (2n-1, m)
    s = coeffs[..., :, None] * phase                        # (..., 2n-1, m)
    p = np.cumsum(s, axis=-2)
    win = p[..., n - 1:, :].copy()
    win[..., 1:, :] -= p[..., : n - 1, :]
    rows = np.exp(-1j * np.arange(n)[:, None] * z[None, :])
    return win * rows


def _toeplitz_dense_batch(coeffs: np.ndarray, n: int) -> np.ndarray:
    idx = np.arange(n)[:, None] - np.arange(n)[None, :] + n - 1
    return coeffs[..., idx]


def _chain_columns(coeff_stacks: list[np.ndarray], grid: TorusGrid, n: int) -> np.ndarray:
    """Columns (F_1 (F_2 (... (F_K u(z))))) for per-item factor stacks.

    coeff_stacks[k] has shape (B, 2n-1); the innermost factor uses the
    windowed prefix-sum route, outer factors apply dense Toeplitz matvecs.
    Returns (B, n, m).
    """
    cols = _toeplitz_times_phase(coeff_stacks[-1], grid, n)
    for coeffs in reversed(coeff_stacks[:-1]):
        dense = _toeplitz_dense_batch(coeffs, n)
        cols = np.matmul(dense, cols)
    return cols


def _pair_chunks(total: int, n: int, m: int):
    chunk = max(1, _PAIR_CHUNK_BUDGET // max(1, (2 * n - 1) * m))
    for start in range(0, total, chunk):
        yield start, min(start + chunk, total)


def _poly_columns(spec: PolyKernel, samples, allow_aliasing: bool) -> np.ndarray:
    """Per-sample columns W[i, c] = R_n(x_{i,c})^q u(z); shape (N, d, n, m)."""
    grid = samples[0].grid
    n = int(spec.n)
    vals = np.stack([t.value_matrix().T for t in samples])   # (N, d, m)
    coeffs = _batch_grid_coeffs(vals, grid, n, allow_aliasing)
    cols = _chain_columns([coeffs.reshape(-1, 2 * n - 1)] * spec.q, grid, n)
    return cols.reshape(len(samples), samples[0].d, n, grid.m)


def _poly_upper_triangle(spec: PolyKernel, w: np.ndarray) -> np.ndarray:
    """(B, m) polynomial-kernel values for the upper-triangle pairs, row by
    row: the alpha-weighted (1/n) (W[i])^* W[j] contraction."""
    N, _, n, m = w.shape
    alpha = np.asarray(spec.alpha)
    scaled = np.conj(w) * alpha[None, :, None, None]
    out = np.empty((N * (N + 1) // 2, m), dtype=complex)
    pos = 0
    for i in range(N):
        out[pos : pos + N - i] = np.einsum(
            "crp,jcrp->jp", scaled[i], w[i:], optimize=True
        ) / n
        pos += N - i
    return out


def _poly_cross_block(spec: PolyKernel, wx: np.ndarray, wy: np.ndarray) -> np.ndarray:
    """(m, Nx, Ny) polynomial-kernel block via one batched product per
    grid point over the flattened (component, row) axis."""
    Nx, d, n, m = wx.shape
    Ny = wy.shape[0]
    alpha = np.asarray(spec.alpha)
    a = np.conj(wx).transpose(3, 0, 1, 2).reshape(m, Nx, d * n)
    b = (wy * alpha[None, :, None, None]).transpose(3, 1, 2, 0).reshape(m, d * n, Ny)
    return np.matmul(a, b) / n


def _inf_values_block(spec: KernelSpec, xs, ys, pairs_i, pairs_j) -> np.ndarray:
    """(B, m) commutative-limit values for index pairs into xs/ys."""
    xv = np.stack([t.value_matrix() for t in xs])            # (Nx, m, d)
    yv = np.stack([t.value_matrix() for t in ys])
    a = xv[pairs_i]
    b = yv[pairs_j]
    if isinstance(spec, PolyKernel):
        alpha = np.asarray(spec.alpha)
        return np.einsum("bmd,d->bm", (np.conj(a) * b) ** spec.q, alpha)
    if isinstance(spec, ProdKernel):
        out = np.ones(a.shape[:2], dtype=complex)
        for b1, b2 in zip(spec.bases1, spec.bases2):
            out *= np.conj(b1.pairwise(a, b)) * b2.pairwise(a, b)
        return out
    raise ConfigError("no pointwise-limit block for this family")


@functools.lru_cache(maxsize=64)
def _folded_reduce_matrix(n: int, m: int) -> np.ndarray:
    """Real m x m matrix K with S_n(R(g1)^* R(g2))(z) = (1/n) S1^* K S2.

    On the uniform grid both the folded coefficients c_k = bins[k mod m]
    and the phases e^{ikz_p} are m-periodic in k, so the length-n window
    sums W_r of s_k = c_k e^{ikz} are m-periodic in the row index r:
    W = M S with M = alpha * ones + (circular window of length n mod m),
    where S_j = bins_j e^{ijz} and n = alpha*m + rho.  Summing the row
    products with their residue multiplicities cnt gives K = M^T diag(cnt) M.
    """
    alpha, rho = divmod(n, m)
    ks = np.arange(m)
    window = (np.mod(ks[:, None] - ks[None, :], m) < rho).astype(float)
    M = alpha + window
    cnt = (alpha + (ks < rho)).astype(float)
    K = M.T @ (cnt[:, None] * M)
    K.setflags(write=False)
    return K


def _folded_pair_sn(bins1: np.ndarray, bins2: np.ndarray, grid: TorusGrid,
                    n: int) -> np.ndarray:
    """(B, m) values of S_n(R(g1)^* R(g2)) from raw DFT bin rows; O(m^3)
    per item independent of n, exact in both the strict and folded regimes."""
    m = grid.m
    K = _folded_reduce_matrix(n, m)
    phase = np.exp(1j * np.arange(m)[:, None] * grid.points[None, :])  # (m, m_z)
    S1 = bins1[:, :, None] * phase[None]
    S2 = bins2[:, :, None] * phase[None]
    return np.einsum("bup,bup->bp", np.conj(S1), np.matmul(K, S2)) / n


def _prod_pair_values(spec: ProdKernel, xs, ys, pairs_i, pairs_j,
                      allow_aliasing: bool) -> np.ndarray:
    """(B, m) finite-n product-kernel values for index pairs into xs/ys."""
    grid = xs[0].grid
    n = int(spec.n)
    m = grid.m
    if not allow_aliasing and 2 * (n - 1) >= m:
        raise AliasingError(
            f"truncation n={n} aliases on an m={m} grid; "
            "pass allow_aliasing=True to fold bins"
        )
    xv = np.stack([t.value_matrix() for t in xs])
    yv = np.stack([t.value_matrix() for t in ys])
    folded = spec.q == 1 and m < n
    out = np.empty((len(pairs_i), m), dtype=complex)
    for lo, hi in _pair_chunks(len(pairs_i), n, m):
        a = xv[pairs_i[lo:hi]]
        b = yv[pairs_j[lo:hi]]
        g1 = [b1.pairwise(a, b) for b1 in spec.bases1]        # each (B, m)
        g2 = [b2.pairwise(a, b) for b2 in spec.bases2]
        bins1 = [np.fft.fft(g, axis=-1) / m for g in g1]
        bins2 = [np.fft.fft(g, axis=-1) / m for g in g2]
        if folded:
            vals = _folded_pair_sn(bins1[0], bins2[0], grid, n)
        else:
            ks = np.mod(np.arange(-(n - 1), n), m)
            c1 = [bn[..., ks] for bn in bins1]
            c2 = [bn[..., ks] for bn in bins2]
            # (prod_j T1_j^*)^* u = T1_q ... T1_1 u ; right chain is T2_1 ... T2_q u
            left = _chain_columns(list(reversed(c1)), grid, n)
            right = _chain_columns(c2, grid, n)
            vals = np.einsum("brp,brp->bp", np.conj(left), right) / n
        if spec.beta:
            # normalized means are the k = 0 bins
            off = np.ones(hi - lo, dtype=complex)
            for ca, cb in zip(bins1, bins2):
                off *= np.conj(ca[:, 0]) * cb[:, 0]
            vals = vals + spec.beta * off[:, None]
        out[lo:hi] = vals
    return out


def _sep_blocks(spec: SepKernel, xs, ys, allow_aliasing: bool) -> np.ndarray:
    """(m, Nx, Ny) separable-kernel block."""
    grid = xs[0].grid
    if spec.is_infinite:
        wvals = np.ones(grid.m, dtype=complex)
        for a in spec.weights:
            wvals *= np.conj(a.values) * a.values
        xv = np.stack([t.value_matrix() for t in xs])
        yv = np.stack([t.value_matrix() for t in ys])
    else:
        n = int(spec.n)
        wvals = sn_map(sep_weight_matrix(spec, allow_aliasing), grid).values
        xv = np.stack([_smooth_tuple(t, n, allow_aliasing).value_matrix() for t in xs])
        yv = np.stack([_smooth_tuple(t, n, allow_aliasing).value_matrix() for t in ys])
    d2 = spec.base.distance_sq(xv[:, None], yv[None, :])     # (Nx, Ny)
    scal = spec.base.from_distance_sq(d2)
    return wvals[:, None, None] * scal[None, :, :]


def cross_values(spec: KernelSpec, xs, ys, allow_aliasing: bool = False) -> np.ndarray:
    """Full cross-kernel block K[p, i, j] = k(xs[i], ys[j])(z_p), (m, Nx, Ny)."""
    xs = list(xs)
    ys = list(ys)
    grid = _check_pair(spec, xs[0], ys[0])
    if isinstance(spec, SepKernel):
        return _sep_blocks(spec, xs, ys, allow_aliasing)
    if isinstance(spec, PolyKernel) and not spec.is_infinite:
        wx = _poly_columns(spec, xs, allow_aliasing)
        wy = _poly_columns(spec, ys, allow_aliasing)
        return _poly_cross_block(spec, wx, wy)
    pairs_i, pairs_j = np.meshgrid(np.arange(len(xs)), np.arange(len(ys)), indexing="ij")
    pairs_i = pairs_i.ravel()
    pairs_j = pairs_j.ravel()
    if spec.is_infinite:
        flat = _inf_values_block(spec, xs, ys, pairs_i, pairs_j)
    else:
        flat = _prod_pair_values(spec, xs, ys, pairs_i, pairs_j, allow_aliasing)
    return flat.reshape(len(xs), len(ys), grid.m).transpose(2, 0, 1)


def gram_values(spec: KernelSpec, xs, allow_aliasing: bool = False) -> tuple[np.ndarray, int]:
    """Hermitian Gram field G[p, i, j] = k(xs[i], xs[j])(z_p).

    Evaluates the upper triangle (N(N+1)/2 pair evaluations) and mirrors
    the rest by the Hermitian law.  Returns (field, evaluation count).
    """
    xs = list(xs)
    N = len(xs)
    grid = _check_pair(spec, xs[0], xs[0])
    iu, ju = np.triu_indices(N)
    count = len(iu)
    if isinstance(spec, SepKernel):
        block = _sep_blocks(spec, xs, xs, allow_aliasing)
        upper = block[:, iu, ju].T                            # (B, m)
    elif isinstance(spec, PolyKernel) and not spec.is_infinite:
        w = _poly_columns(spec, xs, allow_aliasing)
        upper = _poly_upper_triangle(spec, w)
    elif spec.is_infinite:
        upper = _inf_values_block(spec, xs, xs, iu, ju)
    else:
        upper = _prod_pair_values(spec, xs, xs, iu, ju, allow_aliasing)
    field = np.zeros((grid.m, N, N), dtype=complex)
    field[:, iu, ju] = upper.T
    mirror = np.conj(np.swapaxes(field, 1, 2))
    off = ~np.eye(N, dtype=bool)
    field[:, off] += mirror[:, off]
    return field, count
