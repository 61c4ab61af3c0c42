"""Contamination mechanisms, each returning a machine-checkable certificate.

Every adversary takes a clean dataset (or generates a coupled pair) and
returns an :class:`AdversaryOutcome` whose achieved Hamming distance is
recomputed from the data -- never trusted from the construction -- together
with a feasibility flag against the budget and, where an exact worst case is
known, a certificate value.

Mechanisms:

* ``resampling_adversary``   -- refresh a uniformly random k-subset of rows
  from the clean model (the weakest adversary).
* ``local_shift_adversary``  -- add +delta to a uniformly random k-subset of
  scalar samples.
* ``tv_coupling_adversary``  -- jointly draw (X, X') with N(mu, 1) and
  N(mu + eta, 1) marginals via independent coordinatewise maximal couplings;
  the corrupted indices are the coordinates where the coupling fails.
* ``block_resample``         -- refresh one block of a fixed partition of
  [n] into ceil(n/k) consecutive blocks of size at most k.
* ``median_worst_case``      -- the exact worst-case median displacement
  under k row replacements, with an achieving dataset.
* ``hamming_ball_sup``       -- exact sup over the radius-k Hamming ball for
  estimators on binary data, by full enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CorruptionBudget,
    Dataset,
    GaussianModel,
    RngStream,
    hamming_distance,
    standard_normal,
    uniform_open,
)
from .estimators import Estimator

__all__ = [
    "AdversaryOutcome",
    "resampling_adversary",
    "local_shift_adversary",
    "tv_coupling_adversary",
    "couple_gaussian_pair",
    "block_resample",
    "block_layout",
    "median_worst_case",
    "hamming_ball_sup",
    "ADVERSARY_NAMES",
    "EXACT_ADVERSARIES",
]

ADVERSARY_NAMES = (
    "resample",
    "local-shift",
    "tv-coupling",
    "block-resample",
    "median-exact",
    "hamming-ball",
)

# Adversaries whose certificate equals the exact pointwise sensitivity.
EXACT_ADVERSARIES = frozenset({"median-exact", "hamming-ball"})

_BALL_GUARD = 10 ** 6
_COUPLING_MAX_ROUNDS = 10 ** 6


@dataclass(frozen=True)
class AdversaryOutcome:
    """Corrupted dataset plus its certificate.

    ``achieved_hamming`` is recomputed via ``hamming_distance`` and
    ``feasible`` is exactly ``achieved_hamming <= k``.
    """

    corrupted: Dataset
    achieved_hamming: int
    feasible: bool
    certificate: float | None = None


def _outcome(original: Dataset, corrupted: Dataset, budget: CorruptionBudget,
             certificate: float | None = None) -> AdversaryOutcome:
    achieved = hamming_distance(original, corrupted)
    return AdversaryOutcome(
        corrupted=corrupted,
        achieved_hamming=achieved,
        feasible=achieved <= budget.k,
        certificate=certificate,
    )


def _check_budget(x: Dataset, budget: CorruptionBudget) -> None:
    if budget.n != x.n:
        raise ValueError(f"budget is for n={budget.n} but dataset has n={x.n}")


def resampling_adversary(x: Dataset, budget: CorruptionBudget, model: GaussianModel,
                         rng: RngStream) -> AdversaryOutcome:
    """Replace a uniformly random k-subset of rows by fresh draws from the model."""
    _check_budget(x, budget)
    if model.d != x.d:
        raise ValueError(f"model dimension {model.d} does not match dataset d={x.d}")
    if budget.k == 0:
        return _outcome(x, x, budget)
    gen = rng.generator()
    idx = gen.choice(x.n, size=budget.k, replace=False)
    return _outcome(x, x.replace_rows(idx, model.draw(gen, budget.k)), budget)


def local_shift_adversary(x: Dataset, budget: CorruptionBudget, delta: float,
                          rng: RngStream) -> AdversaryOutcome:
    """Shift a uniformly random k-subset of scalar samples by +delta.

    All other entries are returned bit-identical. The shift is one-sided by
    construction; use a negative delta for the other direction explicitly.
    """
    _check_budget(x, budget)
    if x.d != 1:
        raise ValueError("local shift is defined for scalar (d = 1) datasets")
    budget.require_nonempty()
    gen = rng.generator()
    idx = gen.choice(x.n, size=budget.k, replace=False)
    shifted = x.samples[idx] + float(delta)
    return _outcome(x, x.replace_rows(idx, shifted), budget)


def couple_gaussian_pair(gen: np.random.Generator, mu: float, eta: float,
                          n: int) -> tuple[np.ndarray, np.ndarray]:
    """Coordinatewise maximal coupling of N(mu, 1) and N(mu + eta, 1).

    Densities p, q cross at c = mu + eta/2, with p(x)/q(x) = exp(eta (c - x)).
    Draw X ~ p and accept X' = X with probability min(1, q/p); otherwise X'
    is drawn from the residual (q - p)_+ / TV by rejection from q. The
    acceptance tests reduce to half-line comparisons at c, so no numerical
    inversion of residual CDFs is needed, and P(X != X') = TV(p, q) exactly.
    """
    c = mu + eta / 2.0
    x = mu + standard_normal(gen, n)
    keep = np.log(uniform_open(gen, n)) <= eta * (x - c)
    y = x.copy()
    pending = np.flatnonzero(~keep)
    rounds = 0
    while pending.size:
        prop = mu + eta + standard_normal(gen, pending.size)
        accept = np.log(uniform_open(gen, pending.size)) > eta * (c - prop)
        y[pending[accept]] = prop[accept]
        pending = pending[~accept]
        rounds += 1
        if rounds > _COUPLING_MAX_ROUNDS:
            raise RuntimeError("maximal-coupling rejection sampler failed to terminate")
    return x, y


def tv_coupling_adversary(mu: float, eta: float, n: int,
                          rng: RngStream) -> tuple[Dataset, AdversaryOutcome]:
    """Jointly generate clean X ~ N(mu,1)^n and corrupted X' ~ N(mu+eta,1)^n.

    Coordinates are coupled independently and maximally, so the number of
    disagreeing coordinates is Binomial(n, TV) with TV = 2 Phi(eta/2) - 1.
    Returns the clean dataset and the outcome holding X'.
    """
    if not (0.0 < eta < 1.0):
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if n < 1:
        raise ValueError("n must be a positive integer")
    budget = CorruptionBudget.from_eta(eta, n)
    x, y = couple_gaussian_pair(rng.generator(), float(mu), float(eta), int(n))
    clean = Dataset(x)
    return clean, _outcome(clean, Dataset(y), budget)


def block_layout(n: int, k: int) -> list[tuple[int, int]]:
    """Half-open row ranges of the fixed block partition of [n].

    Blocks 0 .. M-2 hold exactly k consecutive rows; the last block holds the
    remaining n - (M-1)k rows (between 1 and k), where M = ceil(n/k).
    """
    if k < 1:
        raise ValueError("block layout needs k >= 1")
    m = math.ceil(n / k)
    return [(i * k, min((i + 1) * k, n)) for i in range(m)]


def block_resample(x: Dataset, budget: CorruptionBudget, block_index: int,
                   model: GaussianModel, rng: RngStream) -> AdversaryOutcome:
    """Replace the rows of one block by fresh i.i.d. draws from the model."""
    _check_budget(x, budget)
    budget.require_nonempty()
    layout = block_layout(x.n, budget.k)
    if not (0 <= block_index < len(layout)):
        raise ValueError(f"block_index must lie in [0, {len(layout)}), got {block_index}")
    start, stop = layout[block_index]
    idx = np.arange(start, stop)
    fresh = model.draw(rng.generator(), stop - start)
    return _outcome(x, x.replace_rows(idx, fresh), budget)


def median_worst_case(x: Dataset, budget: CorruptionBudget) -> AdversaryOutcome:
    """Exact worst-case median displacement under k row replacements.

    For odd n = 2m - 1 and k <= m - 1 the sup equals
    max(x_(m+k) - x_(m), x_(m) - x_(m-k)), attained by pushing the k smallest
    entries above the maximum (or the k largest below the minimum). The
    corrupting value is x_(n) + 1 (resp. x_(1) - 1) so the dataset stays
    finite; the achieved median is the same order statistic either way.
    """
    _check_budget(x, budget)
    if x.d != 1:
        raise ValueError("median worst case is defined for scalar (d = 1) datasets")
    n = x.n
    if n % 2 == 0:
        raise ValueError("median worst case requires odd n")
    m = (n + 1) // 2
    k = budget.k
    if k > m - 1:
        raise ValueError(f"need k <= m - 1 = {m - 1}, got k = {k}")
    if k == 0:
        return _outcome(x, x, budget, certificate=0.0)

    vals = x.samples[:, 0]
    order = np.argsort(vals, kind="stable")
    svals = vals[order]
    med = svals[m - 1]
    up = float(svals[m - 1 + k] - med)
    down = float(med - svals[m - 1 - k])
    if up >= down:
        replace_idx = order[:k]
        fill = float(svals[-1]) + 1.0
        cert = up
    else:
        replace_idx = order[-k:]
        fill = float(svals[0]) - 1.0
        cert = down
    corrupted = x.replace_rows(replace_idx, np.full((k, 1), fill))
    return _outcome(x, corrupted, budget, certificate=cert)


def _ball_size(n: int, k: int) -> int:
    return sum(math.comb(n, j) for j in range(min(k, n) + 1))


def hamming_ball_sup(f: Estimator, x: Dataset, budget: CorruptionBudget) -> AdversaryOutcome:
    """Exact sup of |f(y) - f(x)| over binary y within Hamming radius k.

    Enumerates the whole ball, so it is guarded: n <= 24 and the ball must
    hold at most 1e6 points. Returns an argmax dataset as the corruption.
    """
    _check_budget(x, budget)
    if x.d != 1:
        raise ValueError("hamming ball enumeration is defined for binary vectors (d = 1)")
    bits = x.samples[:, 0]
    if not np.all((bits == 0.0) | (bits == 1.0)):
        raise ValueError("hamming ball enumeration requires entries in {0, 1}")
    n, k = x.n, budget.k
    if n > 24:
        raise ValueError(f"enumeration guard: n <= 24 required, got {n}")
    if _ball_size(n, k) > _BALL_GUARD:
        raise ValueError(f"enumeration guard: ball size {_ball_size(n, k)} exceeds {_BALL_GUARD}")

    base = float(f(x)[0])
    if k == 0:
        return _outcome(x, x, budget, certificate=0.0)

    best_gap = 0.0
    best_bits = bits
    chunk_rows: list[np.ndarray] = []

    def flush(rows: list[np.ndarray]) -> None:
        nonlocal best_gap, best_bits
        if not rows:
            return
        stack = np.stack(rows)[:, :, None]
        gaps = np.abs(f.on_stack(stack)[:, 0] - base)
        j = int(np.argmax(gaps))
        if gaps[j] > best_gap:
            best_gap = float(gaps[j])
            best_bits = rows[j]
        rows.clear()

    for j in range(1, k + 1):
        for combo in itertools.combinations(range(n), j):
            y = bits.copy()
            y[list(combo)] = 1.0 - y[list(combo)]
            chunk_rows.append(y)
            if len(chunk_rows) >= 8192:
                flush(chunk_rows)
    flush(chunk_rows)

    corrupted = Dataset(best_bits) if best_gap > 0.0 else x
    return _outcome(x, corrupted, budget, certificate=best_gap)
