"""Kohonen self-organizing map over basket vectors.

Randomness comes from numpy's PCG64 bit generator. A seed is expanded with
``numpy.random.SeedSequence(seed).spawn(2)``: the first child stream fills
the initial weights, the second draws the training samples. Both are fully
determined by the seed, so identical inputs give bit-identical maps.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DimensionMismatchError
from .ingest import basket_matrix

__all__ = [
    "SomConfig",
    "SomGrid",
    "CellIndex",
    "TrainReport",
    "init_grid",
    "find_bmu",
    "neighborhood_weight",
    "train_step",
    "train",
    "quantization_error",
    "write_map",
    "read_map",
]

INIT_MODES = ("random_binary", "random_uniform")
SCHEDULES = ("constant", "linear_decay")


@dataclass(frozen=True)
class SomConfig:
    rows: int = 10
    cols: int = 12
    learning_rate: float = 0.8
    iterations: int = 20000
    seed: int = 0
    init_mode: str = "random_binary"
    rate_schedule: str = "constant"
    initial_radius: float | None = None
    final_radius: float = 1.0

    def __post_init__(self):
        if self.initial_radius is None:
            object.__setattr__(self, "initial_radius", max(self.rows, self.cols) / 2)
        if self.rows < 1 or self.cols < 1:
            raise ConfigError("rows and cols must be positive")
        if self.rows * self.cols < 2:
            raise ConfigError("grid must have at least 2 cells")
        if self.iterations < 1:
            raise ConfigError("iterations must be ≥ 1")
        if not 0 < self.learning_rate <= 1:
            raise ConfigError("learning_rate must be in (0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.init_mode not in INIT_MODES:
            raise ConfigError(f"init_mode must be one of {INIT_MODES}")
        if self.rate_schedule not in SCHEDULES:
            raise ConfigError(f"rate_schedule must be one of {SCHEDULES}")
        if self.final_radius <= 0 or self.initial_radius <= 0:
            raise ConfigError("radii must be positive")
        if self.final_radius > self.initial_radius:
            raise ConfigError("final_radius must not exceed initial_radius")

    def alpha(self, t):
        if self.rate_schedule == "constant":
            return self.learning_rate
        return self.learning_rate * (1.0 - t / self.iterations)

    def radius(self, t):
        if self.iterations == 1:
            return self.initial_radius
        frac = t / (self.iterations - 1)
        return self.initial_radius + (self.final_radius - self.initial_radius) * frac


class CellIndex(NamedTuple):
    row: int
    col: int


@dataclass(eq=False)
class SomGrid:
    """Lattice of prototype vectors, ``weights`` shaped ``(rows, cols, dim)``."""

    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 3:
            raise DimensionMismatchError("weights must have shape (rows, cols, dim)")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("grid weights must be finite")

    @property
    def rows(self):
        return self.weights.shape[0]

    @property
    def cols(self):
        return self.weights.shape[1]

    @property
    def dim(self):
        return self.weights.shape[2]

    @property
    def flat(self):
        """Row-major ``(rows*cols, dim)`` view."""
        return self.weights.reshape(-1, self.dim)

    def cell(self, flat_index):
        return CellIndex(*divmod(int(flat_index), self.cols))

    def copy(self):
        return SomGrid(self.weights.copy())

    def __eq__(self, other):
        if not isinstance(other, SomGrid):
            return NotImplemented
        return self.weights.shape == other.weights.shape and np.array_equal(
            self.weights, other.weights
        )


@dataclass(frozen=True)
class TrainReport:
    initial_qe: float
    final_qe: float
    iterations_run: int
    seed: int


def _streams(seed):
    init_ss, sample_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(init_ss)), np.random.Generator(
        np.random.PCG64(sample_ss)
    )


def init_grid(config: SomConfig, dim: int) -> SomGrid:
    if dim < 1:
        raise DimensionMismatchError("dim must be ≥ 1")
    rng, _ = _streams(config.seed)
    shape = (config.rows, config.cols, dim)
    if config.init_mode == "random_binary":
        weights = rng.integers(0, 2, size=shape).astype(np.float64)
    else:
        weights = rng.random(shape)
    return SomGrid(weights)


def _check_sample(grid, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (grid.dim,):
        raise DimensionMismatchError(f"sample has shape {x.shape}, grid dim is {grid.dim}")
    return x


def _bmu_flat(flat_weights, x):
    diff = flat_weights - x
    sq = np.einsum("ij,ij->i", diff, diff)
    # argmin returns the first minimum, i.e. the smallest row-major index
    k = int(np.argmin(sq))
    return k, sq[k]


def find_bmu(grid: SomGrid, x) -> tuple[CellIndex, float]:
    """Nearest cell to ``x`` by Euclidean distance, ties to the lowest row-major index."""
    x = _check_sample(grid, x)
    k, sq = _bmu_flat(grid.flat, x)
    return grid.cell(k), math.sqrt(sq)


def neighborhood_weight(bmu, cell, radius: float) -> float:
    """Gaussian lattice kernel ``exp(-d² / (2 r²))``."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    d2 = (bmu[0] - cell[0]) ** 2 + (bmu[1] - cell[1]) ** 2
    return math.exp(-d2 / (2.0 * radius * radius))


class _Lattice:
    """Precomputed cell coordinates for vectorized kernel evaluation."""

    def __init__(self, rows, cols):
        r, c = np.divmod(np.arange(rows * cols), cols)
        self.r = r.astype(np.float64)
        self.c = c.astype(np.float64)

    def kernel(self, k, radius):
        d2 = (self.r - self.r[k]) ** 2 + (self.c - self.c[k]) ** 2
        return np.exp(-d2 / (2.0 * radius * radius))


def _update(flat, x, lattice, alpha, radius):
    k, _ = _bmu_flat(flat, x)
    if alpha == 0:
        return k
    step = alpha * lattice.kernel(k, radius)
    # convex form keeps step=0 and step=1 exact
    step = step[:, None]
    flat *= 1.0 - step
    flat += step * x
    return k


def train_step(grid: SomGrid, x, alpha_t: float, radius_t: float) -> SomGrid:
    """One Kohonen update; returns a new grid and leaves ``grid`` untouched.

    Each cell moves to ``(1 - s) w + s x`` with ``s = alpha_t * h(bmu, cell)``,
    all cells read from the pre-update weights.
    """
    x = _check_sample(grid, x)
    if not 0 <= alpha_t <= 1:
        raise ValueError("alpha_t must be in [0, 1]")
    if radius_t <= 0:
        raise ValueError("radius_t must be positive")
    new = grid.copy()
    _update(new.flat, x, _Lattice(grid.rows, grid.cols), alpha_t, radius_t)
    return new


def train(baskets, config: SomConfig, grid: SomGrid | None = None) -> tuple[SomGrid, TrainReport]:
    """Online SOM training with samples drawn uniformly with replacement.

    ``grid`` overrides the seeded initialization when given.
    """
    data = basket_matrix(baskets).astype(np.float64)
    if grid is None:
        grid = init_grid(config, data.shape[1])
    elif grid.dim != data.shape[1]:
        raise DimensionMismatchError(f"grid dim {grid.dim} != basket length {data.shape[1]}")
    else:
        grid = grid.copy()
    initial_qe = quantization_error(grid, data)

    _, sampler = _streams(config.seed)
    picks = sampler.integers(0, data.shape[0], size=config.iterations)
    lattice = _Lattice(grid.rows, grid.cols)
    flat = grid.flat
    for t, i in enumerate(picks):
        _update(flat, data[i], lattice, config.alpha(t), config.radius(t))

    report = TrainReport(
        initial_qe=initial_qe,
        final_qe=quantization_error(grid, data),
        iterations_run=config.iterations,
        seed=config.seed,
    )
    return grid, report


def bmu_distances(grid: SomGrid, baskets, chunk: int = 1024) -> tuple[np.ndarray, np.ndarray]:
    """BMU flat index and distance for every basket."""
    data = basket_matrix(baskets, grid.dim).astype(np.float64)
    flat = grid.flat
    idx = np.empty(data.shape[0], dtype=np.int64)
    dist = np.empty(data.shape[0])
    for start in range(0, data.shape[0], chunk):
        block = data[start : start + chunk]
        diff = block[:, None, :] - flat[None, :, :]
        sq = np.einsum("nkd,nkd->nk", diff, diff)
        k = np.argmin(sq, axis=1)
        idx[start : start + chunk] = k
        dist[start : start + chunk] = np.sqrt(sq[np.arange(len(k)), k])
    return idx, dist


def quantization_error(grid: SomGrid, baskets) -> float:
    """Mean Euclidean distance from each basket to its BMU."""
    _, dist = bmu_distances(grid, baskets)
    return float(dist.mean())


_MAP_MAGIC = "# basketsom-map v1"


def write_map(grid: SomGrid, sink, config: SomConfig | None = None) -> None:
    """Text map file: ``#key=value`` header lines, then ``row,col,w_0,...``.

    Weights are written with ``repr`` so they read back bit-exactly.
    """
    sink.write(_MAP_MAGIC + "\n")
    sink.write(f"#rows={grid.rows}\n#cols={grid.cols}\n#dim={grid.dim}\n")
    if config is not None:
        for key, value in asdict(config).items():
            sink.write(f"#{key}={value}\n")
    for k, w in enumerate(grid.flat):
        r, c = divmod(k, grid.cols)
        sink.write(f"{r},{c}," + ",".join(repr(float(v)) for v in w) + "\n")


def read_map(source) -> tuple[SomGrid, dict[str, str]]:
    """Inverse of :func:`write_map`; returns the grid and the header fields."""
    lines = source.read().splitlines() if hasattr(source, "read") else list(source)
    if not lines or lines[0].strip() != _MAP_MAGIC:
        raise ValueError("not a basketsom map file")
    meta = {}
    body = []
    for line in lines[1:]:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    rows, cols, dim = int(meta["rows"]), int(meta["cols"]), int(meta["dim"])
    weights = np.empty((rows, cols, dim))
    seen = np.zeros((rows, cols), dtype=bool)
    for line in body:
        parts = line.split(",")
        if len(parts) != dim + 2:
            raise DimensionMismatchError(f"map line has {len(parts) - 2} weights, expected {dim}")
        r, c = int(parts[0]), int(parts[1])
        weights[r, c] = [float(v) for v in parts[2:]]
        seen[r, c] = True
    if not seen.all():
        raise ValueError("map file is missing cells")
    return SomGrid(weights), meta
