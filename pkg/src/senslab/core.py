"""Datasets, corruption budgets, and reproducible randomness.

Everything else in the package is built on four values defined here:

* ``Dataset`` -- an immutable block of n samples in R^d,
* ``CorruptionBudget`` -- the pair (eta, k = floor(eta * n)) that limits how
  many rows an adversary may replace,
* ``RngStream`` -- a counter-based random stream keyed by (seed, stream_id),
  so that trial t draws the same bytes no matter how many other trials ran
  first or on which thread,
* ``GaussianModel`` -- the N(mu, I_d) sampling model (covariance is always
  the identity; there is deliberately no field for it).

Gaussian variates are produced by the inverse-CDF transform of uniforms drawn
strictly inside (0, 1); the normal CDF / quantile are erf-based and accurate
to well below 1e-12 absolute error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special

__all__ = [
    "Dataset",
    "CorruptionBudget",
    "RngStream",
    "GaussianModel",
    "compute_k",
    "hamming_distance",
    "sample_gaussian",
    "normal_cdf",
    "normal_pdf",
    "normal_quantile",
    "standard_normal",
    "uniform_open",
]

_MASK64 = (1 << 64) - 1


def normal_cdf(x):
    """Standard normal CDF Phi(x), via the erf-based ndtr (abs error < 1e-12)."""
    return special.ndtr(x)


def normal_pdf(x):
    """Standard normal density phi(x)."""
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def normal_quantile(p):
    """Inverse standard normal CDF Phi^{-1}(p)."""
    return special.ndtri(p)


def uniform_open(gen: np.random.Generator, size) -> np.ndarray:
    """Uniform variates strictly inside (0, 1).

    Uses (j + 0.5) / 2^53 over a random 53-bit integer j, so neither endpoint
    is ever produced and the downstream inverse-CDF transform stays finite.
    """
    j = gen.integers(0, 1 << 53, size=size, dtype=np.uint64)
    return (j.astype(np.float64) + 0.5) * (2.0 ** -53)


def standard_normal(gen: np.random.Generator, size) -> np.ndarray:
    """Standard normal variates by inverse-CDF transform of open uniforms."""
    return special.ndtri(uniform_open(gen, size))


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream.

    (seed, stream_id) keys a Philox counter-based generator. Distinct
    stream_ids give statistically independent streams, and the byte sequence
    of a given stream does not depend on execution order, platform, or
    thread schedule.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for field in ("seed", "stream_id"):
            value = getattr(self, field)
            if not isinstance(value, (int, np.integer)) or not (0 <= int(value) <= _MASK64):
                raise ValueError(f"{field} must be an unsigned 64-bit integer, got {value!r}")

    def generator(self) -> np.random.Generator:
        key = (int(self.seed) & _MASK64) | ((int(self.stream_id) & _MASK64) << 64)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class Dataset:
    """n samples in R^d stored as a read-only (n, d) float64 array.

    Row i is the sample X_i. Every entry must be finite. A 1-D input array is
    treated as n scalar samples (d = 1).
    """

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ValueError(f"samples must be an (n, d) array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("all sample entries must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def d(self) -> int:
        return self.samples.shape[1]

    def replace_rows(self, indices, rows) -> "Dataset":
        """New Dataset with the given rows replaced; all other rows are
        copied bit-for-bit (so they compare equal under hamming_distance)."""
        out = self.samples.copy()
        out[np.asarray(indices, dtype=np.intp)] = np.asarray(rows, dtype=np.float64).reshape(-1, self.d)
        return Dataset(out)


def compute_k(eta: float, n: int) -> int:
    """Number of corruptible points k = floor(eta * n).

    The floor is taken exactly: the float eta is converted to its exact
    binary rational before multiplying, so no double rounding can push the
    product across an integer. Rounding is never used.
    """
    if not (0.0 < float(eta) < 1.0):
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if int(n) < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return math.floor(Fraction(float(eta)) * int(n))


@dataclass(frozen=True)
class CorruptionBudget:
    """Corruption budget (eta, n, k) with k = floor(eta * n) enforced."""

    eta: float
    n: int
    k: int

    def __post_init__(self):
        expected = compute_k(self.eta, self.n)
        if self.k != expected:
            raise ValueError(f"k must equal floor(eta * n) = {expected}, got {self.k}")

    @classmethod
    def from_eta(cls, eta: float, n: int) -> "CorruptionBudget":
        return cls(eta=float(eta), n=int(n), k=compute_k(eta, n))

    def require_nonempty(self) -> None:
        """Assert k >= 1 for experiments that need at least one corruption."""
        if self.k < 1:
            raise ValueError(f"budget allows no corruption: eta={self.eta}, n={self.n} gives k=0")


def hamming_distance(x: Dataset, y: Dataset) -> int:
    """Number of rows where x and y differ in at least one coordinate.

    Comparison is exact on the stored values, not tolerance-based:
    adversaries build corrupted datasets by copying unchanged rows, so
    those rows compare equal bit-for-bit.
    """
    if x.samples.shape != y.samples.shape:
        raise ValueError(f"shape mismatch: {x.samples.shape} vs {y.samples.shape}")
    return int(np.count_nonzero(np.any(x.samples != y.samples, axis=1)))


@dataclass(frozen=True, eq=False)
class GaussianModel:
    """Sampling model N(mu, I_d). The covariance is fixed to the identity."""

    mu: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.mu, dtype=np.float64))
        if arr.ndim != 1 or arr.size < 1 or not np.all(np.isfinite(arr)):
            raise ValueError("mu must be a finite vector")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "mu", arr)

    @property
    def d(self) -> int:
        return self.mu.size

    def draw(self, gen: np.random.Generator, size: int) -> np.ndarray:
        """(size, d) array of fresh rows, consuming draws from gen."""
        return standard_normal(gen, (size, self.d)) + self.mu

    def sample(self, n: int, rng: RngStream) -> Dataset:
        if int(n) < 1:
            raise ValueError(f"n must be a positive integer, got {n}")
        return Dataset(self.draw(rng.generator(), int(n)))


def sample_gaussian(model: GaussianModel, n: int, rng: RngStream) -> Dataset:
    """n i.i.d. rows from N(mu, I_d), deterministic given the stream."""
    return model.sample(n, rng)
