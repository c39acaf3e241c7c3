"""
Monte-Carlo generation of Z and histogramming.

Each pair is drawn as X ~ CN(0, sigma_x^2) and
Y = mu (sigma_y / sigma_x) conj(X) + U with U ~ CN(0, sigma_y^2 (1 - |mu|^2))
independent of X, so that E[X Y] = mu sigma_x sigma_y.

Samples are produced in chunks. Chunk k always comes from
Philox(SeedSequence(seed, spawn_key=(k,))), so a batch depends only on
(params, n, seed, chunk_size) and never on how many workers produced it.
"""

from __future__ import annotations

import logging
import math
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from zpd.domain.errors import DomainError, ResourceError
from zpd.domain.models import ComplexValue, ModelParams, validate, wrap_angle

logger = logging.getLogger("zpd.simulate")

DEFAULT_CHUNK_SIZE = 65_536
DEFAULT_MAX_SAMPLES = 20_000_000
_MAX_SEED = 2 ** 64


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{name} must be an integer, got {raw!r}") from None


def worker_count() -> int:
    """Sampling threads: ZPD_THREADS, else min(4, cpu_count)."""
    return max(1, _env_int("ZPD_THREADS", min(4, os.cpu_count() or 1)))


def max_samples() -> int:
    """In-memory batch budget: ZPD_MAX_SAMPLES."""
    return _env_int("ZPD_MAX_SAMPLES", DEFAULT_MAX_SAMPLES)


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < _MAX_SEED:
        raise DomainError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def chunk_rng(seed: int, chunk_id: int) -> np.random.Generator:
    """Counter-based generator for one chunk of the stream."""
    sequence = np.random.SeedSequence(_check_seed(seed), spawn_key=(chunk_id,))
    return np.random.Generator(np.random.Philox(sequence))


# --- Pairs ---

def sample_pairs(params: ModelParams, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """n correlated pairs (X, Y) as two complex arrays."""
    validate(params)
    normals = rng.standard_normal((4, n))
    x = (params.sigma_x / math.sqrt(2.0)) * (normals[0] + 1j * normals[1])
    u_scale = params.sigma_y * math.sqrt(params.one_minus_mu2 / 2.0)
    u = u_scale * (normals[2] + 1j * normals[3])
    y = params.mu * (params.sigma_y / params.sigma_x) * np.conj(x) + u
    return x, y


def sample_pair(params: ModelParams, rng: np.random.Generator) -> tuple[ComplexValue, ComplexValue]:
    x, y = sample_pairs(params, 1, rng)
    return ComplexValue.from_complex(complex(x[0])), ComplexValue.from_complex(complex(y[0]))


# --- Z batches ---

def _z_chunk(params: ModelParams, size: int, seed: int, chunk_id: int) -> np.ndarray:
    rng = chunk_rng(seed, chunk_id)
    x, y = sample_pairs(params, params.big_l * size, rng)
    return (x * y).reshape(params.big_l, size).sum(axis=0)


def _chunk_sizes(n: int, chunk_size: int) -> Iterator[int]:
    full, rest = divmod(n, chunk_size)
    for _ in range(full):
        yield chunk_size
    if rest:
        yield rest


def iter_z_chunks(
    params: ModelParams,
    n: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: Optional[int] = None,
) -> Iterator[np.ndarray]:
    """
    Stream n realizations of Z in order, chunk by chunk.

    At most 2 * workers chunks are in flight, so memory stays bounded however
    large n is.
    """
    validate(params)
    seed = _check_seed(seed)
    if n < 1:
        raise DomainError(f"Sample count must be >= 1, got {n}")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be >= 1, got {chunk_size}")
    workers = worker_count() if workers is None else max(1, workers)

    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="zpd-sample") as pool:
        pending: deque = deque()
        for chunk_id, size in enumerate(_chunk_sizes(n, chunk_size)):
            pending.append(pool.submit(_z_chunk, params, size, seed, chunk_id))
            if len(pending) >= 2 * workers:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


@dataclass(frozen=True)
class SampleBatch:
    """n realizations of Z drawn with a given seed."""
    z: np.ndarray = field(repr=False)
    params: ModelParams
    seed: int
    n: int

    def __post_init__(self):
        z = np.array(self.z, dtype=complex)
        if z.ndim != 1 or z.size != self.n:
            raise DomainError(f"Batch holds {z.size} values, expected {self.n}")
        z.flags.writeable = False
        object.__setattr__(self, "z", z)

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.z)

    @property
    def phase(self) -> np.ndarray:
        """Phases in (-pi, pi]."""
        return wrap_angle(np.angle(self.z))

    @property
    def mean(self) -> complex:
        return complex(np.mean(self.z))

    @property
    def standard_error(self) -> complex:
        """Standard errors of the real and imaginary means, packed as a complex."""
        scale = math.sqrt(self.n)
        return complex(np.std(self.z.real) / scale, np.std(self.z.imag) / scale)

    def summary(self) -> dict:
        mean, se = self.mean, self.standard_error
        return {
            "n": self.n,
            "seed": self.seed,
            "L": self.params.big_l,
            "mean_re": mean.real,
            "mean_im": mean.imag,
            "se_re": se.real,
            "se_im": se.imag,
            "mean_amplitude": float(np.mean(self.amplitude)),
        }


def sample_z(
    params: ModelParams,
    n: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: Optional[int] = None,
) -> SampleBatch:
    """Draw n realizations of Z into memory."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"Sample count must be a positive integer, got {n!r}")
    budget = max_samples()
    if n > budget:
        raise ResourceError(
            f"{n} samples exceed the in-memory budget of {budget} (ZPD_MAX_SAMPLES); "
            "stream them with iter_z_chunks instead"
        )
    z = np.concatenate(list(iter_z_chunks(params, n, seed, chunk_size, workers)))
    logger.info("Sampled %d realizations of Z (L=%d, seed=%d)", n, params.big_l, seed)
    return SampleBatch(z=z, params=params, seed=seed, n=int(n))


# --- Histograms ---

@dataclass(frozen=True)
class Histogram1D:
    edges: np.ndarray = field(repr=False)
    mass: np.ndarray = field(repr=False)
    normalized: bool = True
    clipped: int = 0

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def total(self) -> float:
        return float(np.sum(self.mass * self.widths))


@dataclass(frozen=True)
class Histogram2D:
    x_edges: np.ndarray = field(repr=False)
    y_edges: np.ndarray = field(repr=False)
    mass: np.ndarray = field(repr=False)
    normalized: bool = True
    clipped: int = 0

    def cell_areas(self) -> np.ndarray:
        return np.outer(np.diff(self.x_edges), np.diff(self.y_edges))

    def total(self) -> float:
        return float(np.sum(self.mass * self.cell_areas()))


def _finite_values(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise DomainError("Cannot histogram an empty sample")
    if not np.all(np.isfinite(arr)):
        raise DomainError("Histogram input must be finite")
    return arr


def histogram_1d(values, bins: int = 100, value_range: Optional[tuple[float, float]] = None) -> Histogram1D:
    """Density histogram; values outside value_range are dropped and counted."""
    arr = _finite_values(values)
    if bins < 1:
        raise DomainError(f"bins must be >= 1, got {bins}")
    if value_range is not None:
        lo, hi = value_range
        clipped = int(np.count_nonzero((arr < lo) | (arr > hi)))
        if clipped == arr.size:
            raise DomainError(f"No values fall inside the range [{lo}, {hi}]")
    else:
        clipped = 0
    if clipped:
        logger.warning("%d of %d values fall outside the histogram range", clipped, arr.size)
    mass, edges = np.histogram(arr, bins=bins, range=value_range, density=True)
    return Histogram1D(edges=edges, mass=mass, normalized=True, clipped=clipped)


def histogram_2d(
    z,
    bins: int | tuple[int, int] = 80,
    value_range: Optional[tuple[tuple[float, float], tuple[float, float]]] = None,
) -> Histogram2D:
    """Density histogram of complex samples over the (Re, Im) plane."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    re, im = _finite_values(z.real), _finite_values(z.imag)
    if value_range is not None:
        (x_lo, x_hi), (y_lo, y_hi) = value_range
        clipped = int(np.count_nonzero((re < x_lo) | (re > x_hi) | (im < y_lo) | (im > y_hi)))
        if clipped == re.size:
            raise DomainError("No samples fall inside the histogram box")
    else:
        clipped = 0
    if clipped:
        logger.warning("%d of %d samples fall outside the histogram box", clipped, re.size)
    mass, x_edges, y_edges = np.histogram2d(re, im, bins=bins, range=value_range, density=True)
    return Histogram2D(x_edges=x_edges, y_edges=y_edges, mass=mass, normalized=True, clipped=clipped)


__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "Histogram1D",
    "Histogram2D",
    "SampleBatch",
    "chunk_rng",
    "histogram_1d",
    "histogram_2d",
    "iter_z_chunks",
    "max_samples",
    "sample_pair",
    "sample_pairs",
    "sample_z",
    "worker_count",
]
