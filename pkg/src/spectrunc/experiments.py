r"""Reproducible experiment runners.

Synthetic regression: inputs x^i(z) = [sin(0.01 i z) + noise,
cos(0.01 i z) + noise], target f(x)(z) = 3 sin(cos(W_1(z) + W_2(z))) where
W_c is the unnormalized window integral of component c over
[z - delta, z + delta].  The reference configuration discretizes with
m = 30 points, delta = 2*pi/30, lambda = 0.01.

Image inpainting: each H x W image is flattened row-major and treated as a
discretized function on a torus grid of m = H*W points (the flattening
imposes a wrap-around adjacency at the image boundary).  Inputs are the
images with a centered rectangle zeroed; outputs are the originals.

Every dataset is drawn from a counter-based generator keyed by
(seed, run, split), so sweep cells within a run see bitwise-identical data
and re-runs are fully deterministic.
"""

from __future__ import annotations

import concurrent.futures
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .kernels import (
    INF,
    GaussianKernel,
    KernelSpec,
    L2GaussianTupleKernel,
    PolyKernel,
    ProdKernel,
    SepKernel,
)
from .regression import assemble_gram, fit, predict_batch, test_error
from .serialize import kernel_from_json, kernel_to_json, read_pgm
from .torus import FunctionTuple, SampledFunction, TorusGrid, l2_distance, window_membership

__all__ = [
    "SyntheticConfig",
    "InpaintConfig",
    "gen_synthetic",
    "run_synthetic",
    "run_eigen_study",
    "run_inpaint",
    "default_synthetic_kernels",
    "worker_count",
]

WORKERS_ENV = "SPECTRUNC_WORKERS"

_SPLIT_TRAIN = 0
_SPLIT_TEST = 1
_SPLIT_BLOBS = 2


def worker_count() -> int:
    """Thread budget for sweep cells; the environment variable wins,
    absence means all available cores."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    count = int(raw)
    if count < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {raw}")
    return count


def _rng(seed: int, run: int, split: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64((run << 8) | split)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ---------------------------------------------------------------------------
# synthetic regression
# ---------------------------------------------------------------------------


def default_synthetic_kernels(n_list=(8, 16, 32, 64, 128, INF), delta: float | None = None,
                              grid_m: int = 30, families=("poly", "prod", "sep")) -> list[KernelSpec]:
    """The reference sweep: poly (q=1, linear weights), prod (q=1, gaussian
    bases, beta = 1 at finite n), sep (q=2, a_j = e^{sin z}, gaussian tuple
    kernel with scale 0.1/delta^2)."""
    if delta is None:
        delta = 2.0 * np.pi / 30.0
    grid = TorusGrid(grid_m)
    a = SampledFunction(grid, np.exp(np.sin(grid.points)).astype(complex))
    specs: list[KernelSpec] = []
    for n in n_list:
        if "poly" in families:
            specs.append(PolyKernel(n=n, q=1, alpha=(1.0, 1.0)))
        if "prod" in families:
            g = GaussianKernel(gamma=1.0)
            beta = 0.0 if n == INF else 1.0
            specs.append(ProdKernel(n=n, q=1, bases1=(g,), bases2=(g,), beta=beta))
        if "sep" in families:
            specs.append(SepKernel(n=n, q=2, weights=(a, a),
                                   base=L2GaussianTupleKernel(scale=0.1 / delta**2)))
    return specs


@dataclass(frozen=True)
class SyntheticConfig:
    """Synthetic regression configuration; defaults reproduce the reference
    desk-scale setup (m = 30, lambda = 0.01, delta = 2*pi/30)."""

    n_samples: int = 200
    n_test: int = 200
    grid_m: int = 30
    seed: int = 1234
    input_noise: float = 0.01
    output_noise: float = 0.001
    delta: float = 2.0 * np.pi / 30.0
    lam: float = 0.01
    runs: int = 5
    window_normalized: bool = False
    kernels: tuple[KernelSpec, ...] = field(default_factory=tuple)

    def resolved_kernels(self) -> list[KernelSpec]:
        if self.kernels:
            return list(self.kernels)
        return default_synthetic_kernels(delta=self.delta, grid_m=self.grid_m)

    @classmethod
    def from_json(cls, doc: dict, base_dir: Path | None = None) -> "SyntheticConfig":
        kernels = tuple(
            kernel_from_json(k, base_dir) for k in doc.get("kernels", [])
        )
        kwargs = {}
        for key, name in [
            ("n_samples", "n_samples"), ("n_test", "n_test"), ("grid_m", "grid_m"),
            ("seed", "seed"), ("input_noise", "input_noise"),
            ("output_noise", "output_noise"), ("delta", "delta"),
            ("lambda", "lam"), ("runs", "runs"),
            ("window_normalized", "window_normalized"),
        ]:
            if key in doc:
                kwargs[name] = doc[key]
        return cls(kernels=kernels, **kwargs)

    def to_json(self) -> dict:
        return {
            "n_samples": self.n_samples, "n_test": self.n_test,
            "grid_m": self.grid_m, "seed": self.seed,
            "input_noise": self.input_noise, "output_noise": self.output_noise,
            "delta": self.delta, "lambda": self.lam, "runs": self.runs,
            "window_normalized": self.window_normalized,
            "kernels": [kernel_to_json(k) for k in self.resolved_kernels()],
        }


def _window_matrix(grid: TorusGrid, delta: float, normalized: bool) -> np.ndarray:
    rows = np.stack([window_membership(grid, z, delta) for z in grid.points])
    scale = (1.0 / grid.m) if normalized else grid.spacing
    return rows.astype(float) * scale


def synthetic_target(x: FunctionTuple, delta: float, normalized: bool = False) -> SampledFunction:
    """f(x)(z) = 3 sin(cos(W_1(z) + W_2(z))) with W_c the windowed integral
    of component c."""
    W = _window_matrix(x.grid, delta, normalized)
    total = np.zeros(x.grid.m, dtype=complex)
    for comp in x.components:
        total += W @ comp.values
    return SampledFunction(x.grid, 3.0 * np.sin(np.cos(total)))


def _synthetic_split(config: SyntheticConfig, run_index: int, split: int, count: int):
    grid = TorusGrid(config.grid_m)
    z = grid.points
    rng = _rng(config.seed, run_index, split)
    xi = rng.standard_normal((count, grid.m))
    eta = rng.standard_normal((count, grid.m))
    out_noise = rng.standard_normal((count, grid.m))
    inputs = []
    outputs = []
    for i in range(1, count + 1):
        c1 = np.sin(0.01 * i * z) + config.input_noise * xi[i - 1]
        c2 = np.cos(0.01 * i * z) + config.input_noise * eta[i - 1]
        x = FunctionTuple((SampledFunction(grid, c1.astype(complex)),
                           SampledFunction(grid, c2.astype(complex))))
        target = synthetic_target(x, config.delta, config.window_normalized)
        y = SampledFunction(grid, target.values + config.output_noise * out_noise[i - 1])
        inputs.append(x)
        outputs.append(y)
    return inputs, outputs


def gen_synthetic(config: SyntheticConfig, run_index: int):
    """Deterministic (train, test) datasets for one run; each is a pair
    (inputs, outputs)."""
    train = _synthetic_split(config, run_index, _SPLIT_TRAIN, config.n_samples)
    test = _synthetic_split(config, run_index, _SPLIT_TEST, config.n_test)
    return train, test


def _spec_n_label(spec: KernelSpec) -> str:
    return "inf" if spec.is_infinite else str(int(spec.n))


def _synthetic_cell(config: SyntheticConfig, datasets, spec: KernelSpec, run: int):
    (train_x, train_y), (test_x, test_y) = datasets[run]
    model = fit(spec, train_x, train_y, config.lam, allow_aliasing=True)
    return test_error(model, test_x, test_y)


def run_synthetic(config: SyntheticConfig, progress=None):
    """Sweep (kernel spec x run); returns (result rows, summary rows).

    Result rows are (family, n, run, test_error); summary rows aggregate
    the runs per spec as (family, n, median, q1, q3).  A failed cell is
    recorded with a NaN error instead of aborting the sweep.
    """
    specs = config.resolved_kernels()
    datasets = [gen_synthetic(config, run) for run in range(config.runs)]
    cells = [(s_idx, run) for s_idx in range(len(specs)) for run in range(config.runs)]
    errors: dict[tuple[int, int], float] = {}

    def work(cell: tuple[int, int]) -> float:
        s_idx, run = cell
        return _synthetic_cell(config, datasets, specs[s_idx], run)

    with concurrent.futures.ThreadPoolExecutor(max_workers=worker_count()) as pool:
        futures = {pool.submit(work, cell): cell for cell in cells}
        for fut in concurrent.futures.as_completed(futures):
            s_idx, run = futures[fut]
            try:
                err = fut.result()
            except Exception as exc:  # a failed cell is recorded, not fatal
                print(f"cell family={specs[s_idx].family} n={_spec_n_label(specs[s_idx])} "
                      f"run={run} failed: {exc}", file=sys.stderr)
                err = float("nan")
            errors[(s_idx, run)] = err
            if progress is not None:
                progress(specs[s_idx], run, err)

    rows = []
    for s_idx, spec in enumerate(specs):
        for run in range(config.runs):
            rows.append((spec.family, _spec_n_label(spec), run, errors[(s_idx, run)]))
    summary = []
    for s_idx, spec in enumerate(specs):
        vals = np.array([errors[(s_idx, run)] for run in range(config.runs)])
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        summary.append((spec.family, _spec_n_label(spec), float(med), float(q1), float(q3)))
    return rows, summary


def run_eigen_study(config: SyntheticConfig, point_index: int = 0):
    """Eigenvalues of the Gram matrix at one grid point (default z = 0),
    per kernel spec, aggregated over runs.

    Returns rows (family, n, eigenvalue index, mean, std) with eigenvalues
    sorted in descending order within each run.
    """
    specs = config.resolved_kernels()
    rows = []
    for spec in specs:
        per_run = []
        for run in range(config.runs):
            (train_x, _), _ = gen_synthetic(config, run)
            gram = assemble_gram(spec, train_x, allow_aliasing=True)
            eig = np.linalg.eigvalsh(gram.matrices[point_index])[::-1].real
            per_run.append(eig)
        stacked = np.stack(per_run)
        mean = stacked.mean(axis=0)
        std = stacked.std(axis=0)
        for idx in range(stacked.shape[1]):
            rows.append((spec.family, _spec_n_label(spec), idx,
                         float(mean[idx]), float(std[idx])))
    return rows


# ---------------------------------------------------------------------------
# image inpainting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InpaintConfig:
    """Image-recovery configuration.

    ``source`` is either "blobs" (deterministic synthetic blob images) or a
    directory of same-size PGM images.  The mask is a centered
    mask_h x mask_w rectangle zeroed in the inputs.
    """

    height: int = 16
    width: int = 16
    mask_h: int = 8
    mask_w: int = 8
    n_train: int = 50
    n_test: int = 20
    seed: int = 99
    lam: float = 0.01
    gamma: float = 0.1
    beta: float = 0.01
    n_list: tuple = (8, 16, INF)
    source: str = "blobs"
    recover_count: int = 4

    @classmethod
    def from_json(cls, doc: dict) -> "InpaintConfig":
        kwargs = {}
        for key, name in [
            ("height", "height"), ("width", "width"), ("mask_h", "mask_h"),
            ("mask_w", "mask_w"), ("n_train", "n_train"), ("n_test", "n_test"),
            ("seed", "seed"), ("lambda", "lam"), ("gamma", "gamma"),
            ("beta", "beta"), ("source", "source"),
            ("recover_count", "recover_count"),
        ]:
            if key in doc:
                kwargs[name] = doc[key]
        if "n_list" in doc:
            kwargs["n_list"] = tuple(
                INF if n == "inf" else int(n) for n in doc["n_list"]
            )
        return cls(**kwargs)

    def mask(self) -> np.ndarray:
        if self.mask_h > self.height or self.mask_w > self.width:
            raise ConfigError("mask rectangle does not fit in the image")
        top = (self.height - self.mask_h) // 2
        left = (self.width - self.mask_w) // 2
        mask = np.zeros((self.height, self.width), dtype=bool)
        mask[top : top + self.mask_h, left : left + self.mask_w] = True
        return mask

    def kernel(self, n) -> ProdKernel:
        g = GaussianKernel(gamma=self.gamma)
        beta = 0.0 if n == INF else self.beta
        return ProdKernel(n=n, q=1, bases1=(g,), bases2=(g,), beta=beta)


def blob_images(config: InpaintConfig, split: int, count: int) -> np.ndarray:
    """Deterministic smooth blob images in [0, 1], shape (count, H, W)."""
    rng = _rng(config.seed, 0, split)
    H, W = config.height, config.width
    yy, xx = np.mgrid[0:H, 0:W]
    images = np.zeros((count, H, W))
    for i in range(count):
        n_blobs = int(rng.integers(2, 4))
        for _ in range(n_blobs):
            cy = rng.uniform(0, H)
            cx = rng.uniform(0, W)
            sigma = rng.uniform(0.08, 0.22) * min(H, W)
            amp = rng.uniform(0.5, 1.0)
            images[i] += amp * np.exp(-(((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * sigma**2)))
    return np.clip(images, 0.0, 1.0)


def load_image_dir(directory, count: int) -> np.ndarray:
    paths = sorted(Path(directory).glob("*.pgm"))
    if len(paths) < count:
        raise ConfigError(f"{directory}: found {len(paths)} PGM images, need {count}")
    images = [read_pgm(p) for p in paths[:count]]
    shape = images[0].shape
    if any(img.shape != shape for img in images):
        raise ConfigError(f"{directory}: images have mixed dimensions")
    return np.stack(images)


def inpaint_images(config: InpaintConfig):
    """(train_images, test_images) per the configured source."""
    if config.source == "blobs":
        return (blob_images(config, _SPLIT_BLOBS, config.n_train),
                blob_images(config, _SPLIT_TEST, config.n_test))
    train = load_image_dir(Path(config.source) / "train", config.n_train)
    test = load_image_dir(Path(config.source) / "test", config.n_test)
    if train.shape[1:] != (config.height, config.width):
        raise ConfigError(
            f"images are {train.shape[1:]} but config says "
            f"{(config.height, config.width)}"
        )
    return train, test


def image_to_tuple(image: np.ndarray, grid: TorusGrid) -> FunctionTuple:
    return FunctionTuple((SampledFunction(grid, image.ravel().astype(complex)),))


def run_inpaint(config: InpaintConfig):
    """Mask, fit, and sweep the truncation order.

    Returns (rows, recovered) where rows are (n, test_error) and recovered
    maps the n label to an array of recovered test images
    (recover_count, H, W).
    """
    train_imgs, test_imgs = inpaint_images(config)
    H, W = config.height, config.width
    grid = TorusGrid(H * W)
    mask = config.mask().ravel()

    def masked(imgs: np.ndarray) -> np.ndarray:
        out = imgs.reshape(len(imgs), -1).copy()
        out[:, mask] = 0.0
        return out

    train_x = [image_to_tuple(v.reshape(H, W), grid) for v in masked(train_imgs)]
    train_y = [SampledFunction(grid, v.astype(complex)) for v in train_imgs.reshape(len(train_imgs), -1)]
    test_x = [image_to_tuple(v.reshape(H, W), grid) for v in masked(test_imgs)]
    test_y = [SampledFunction(grid, v.astype(complex)) for v in test_imgs.reshape(len(test_imgs), -1)]

    rows = []
    recovered = {}
    for n in config.n_list:
        spec = config.kernel(n)
        model = fit(spec, train_x, train_y, config.lam, allow_aliasing=True)
        preds = predict_batch(model, test_x)
        err = float(np.mean([l2_distance(p, o) for p, o in zip(preds, test_y)]))
        label = "inf" if n == INF else str(int(n))
        rows.append((label, err))
        take = min(config.recover_count, len(preds))
        recovered[label] = np.stack([
            np.clip(preds[i].values.real, 0.0, 1.0).reshape(H, W) for i in range(take)
        ])
    return rows, recovered
