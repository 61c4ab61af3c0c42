"""Monte Carlo estimation of distributional empirical sensitivity.

``estimate_es`` samples clean datasets, lets an adversary corrupt them, and
aggregates the per-trial displacements into an L^q estimate with a
confidence interval. Unless the adversary is exact ("median-exact",
"hamming-ball"), each trial's displacement is a pointwise lower bound on the
true sup, so the report is flagged ``lower_bound_only``.

Reproducibility contract: trial t always consumes streams (seed, 2t) for the
clean data and (seed, 2t + 1) for the adversary, and per-trial values are
stored by index before a fixed-order reduction. Reports are therefore
byte-identical across reruns regardless of the worker count.

The three obstruction experiments mirror the mechanisms that force
sensitivity onto any accurate estimator: a local mean shift that the
estimator cannot distinguish from a true parameter shift, a TV-coupling
bridge between nearby means, and block resampling that converts clean output
variance into displacement. ``verify_suite`` drives every analysis checker
over its documented grid and returns a pass/fail table.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from . import analysis
from .adversaries import (
    ADVERSARY_NAMES,
    EXACT_ADVERSARIES,
    block_layout,
    block_resample,
    couple_gaussian_pair,
    hamming_ball_sup,
    local_shift_adversary,
    median_worst_case,
    resampling_adversary,
    tv_coupling_adversary,
)
from .bernoulli import BernoulliModel, beta_binomial_layer_law
from .core import (
    CorruptionBudget,
    Dataset,
    GaussianModel,
    RngStream,
    standard_normal,
    uniform_open,
)
from .estimators import Estimator, build_estimator, mean_estimator, median_estimator

__all__ = [
    "SCHEMA",
    "UnboundedSensitivityError",
    "SensitivityReport",
    "ScalingFit",
    "MeanObstructionReport",
    "CouplingObstructionReport",
    "VarianceObstructionReport",
    "VerifyRow",
    "estimate_es",
    "scaling_sweep",
    "mean_obstruction_low",
    "coupling_obstruction_high",
    "variance_obstruction",
    "verify_suite",
    "all_pass",
    "format_verify_table",
]

SCHEMA = "senslab/v1"

CSV_COLUMNS = ("eta", "n", "d", "k", "estimator", "adversary", "q",
               "es_estimate", "ci_low", "ci_high", "lower_bound_only", "trials", "seed")


class UnboundedSensitivityError(RuntimeError):
    """A finite sensitivity number would be a lie for this request.

    The adaptive worst case of the unclipped mean is infinite: replacing a
    single row by rows of magnitude M moves the mean by Theta(M/n). The
    harness reports this as a structured diagnostic instead of a number.
    """

    def __init__(self, estimator: str, adversary: str, reason: str):
        self.estimator = estimator
        self.adversary = adversary
        self.reason = reason
        super().__init__(f"unbounded sensitivity for ({estimator}, {adversary}): {reason}")

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "unbounded-sensitivity",
            "estimator": self.estimator,
            "adversary": self.adversary,
            "reason": self.reason,
        }


def _dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


@dataclass(frozen=True, eq=False)
class SensitivityReport:
    """L^q sensitivity estimate with its full experiment configuration."""

    estimator: str
    adversary: str
    n: int
    d: int
    eta: float
    k: int
    q: int
    trials: int
    seed: int
    delta: float | None
    es_estimate: float
    ci_low: float
    ci_high: float
    lower_bound_only: bool
    per_trial: np.ndarray

    def to_json_dict(self, include_trials: bool = False) -> dict:
        out = {
            "schema": SCHEMA,
            "kind": "sensitivity-report",
            "estimator": self.estimator,
            "adversary": self.adversary,
            "n": self.n,
            "d": self.d,
            "eta": self.eta,
            "k": self.k,
            "q": self.q,
            "trials": self.trials,
            "seed": self.seed,
            "delta": self.delta,
            "es_estimate": self.es_estimate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "lower_bound_only": self.lower_bound_only,
        }
        if include_trials:
            out["per_trial"] = [float(v) for v in self.per_trial]
        return out

    def to_json(self, include_trials: bool = False) -> str:
        return _dump_json(self.to_json_dict(include_trials))

    @staticmethod
    def csv_header() -> str:
        return ",".join(CSV_COLUMNS)

    def csv_row(self) -> str:
        values = {
            "eta": repr(self.eta),
            "n": str(self.n),
            "d": str(self.d),
            "k": str(self.k),
            "estimator": self.estimator,
            "adversary": self.adversary,
            "q": str(self.q),
            "es_estimate": repr(self.es_estimate),
            "ci_low": repr(self.ci_low),
            "ci_high": repr(self.ci_high),
            "lower_bound_only": "true" if self.lower_bound_only else "false",
            "trials": str(self.trials),
            "seed": str(self.seed),
        }
        return ",".join(values[c] for c in CSV_COLUMNS)


def _resolve_estimator(estimator: Estimator | str, d: int, seed: int) -> Estimator:
    if isinstance(estimator, str):
        return build_estimator(estimator, d=d, seed=seed)
    return estimator


def _validate_combo(est: Estimator, adversary: str, model, n: int, delta) -> None:
    if adversary not in ADVERSARY_NAMES:
        raise ValueError(f"unknown adversary {adversary!r}; known: {', '.join(ADVERSARY_NAMES)}")
    if adversary == "median-exact":
        if est.name == "mean":
            raise UnboundedSensitivityError(
                est.name, adversary,
                "the adaptive sup of the unclipped mean is infinite: one replaced row "
                "of magnitude M displaces the mean by M/n, unbounded as M grows",
            )
        if est.name != "median":
            raise ValueError("median-exact certificates apply to the median only")
        if model.d != 1:
            raise ValueError("median-exact requires scalar (d = 1) data")
        if n % 2 == 0:
            raise ValueError("median-exact requires odd n")
    elif adversary == "hamming-ball":
        if not est.binary_domain:
            raise ValueError("hamming-ball enumerates binary corruptions; use a "
                             "binary-domain estimator such as bernoulli-plugin")
        if not isinstance(model, BernoulliModel):
            raise ValueError("hamming-ball requires a BernoulliModel for the clean data")
    elif adversary == "local-shift":
        if delta is None:
            raise ValueError("local-shift requires delta")
        if model.d != 1:
            raise ValueError("local-shift requires scalar (d = 1) data")
    elif adversary == "tv-coupling":
        if not isinstance(model, GaussianModel) or model.d != 1:
            raise ValueError("tv-coupling requires a scalar GaussianModel")


def estimate_es(
    estimator: Estimator | str,
    adversary: str,
    model,
    *,
    eta: float,
    n: int,
    q: int = 2,
    trials: int = 10_000,
    seed: int = 0,
    delta: float | None = None,
    workers: int = 1,
) -> SensitivityReport:
    """Monte Carlo estimate of the L^q distributional empirical sensitivity.

    Per trial t: sample a clean dataset from the model with stream (seed, 2t),
    corrupt it with stream (seed, 2t + 1), and record the displacement
    |f(Y) - f(X)| (or the adversary's exact certificate). Infeasible coupling
    trials contribute 0, which keeps the estimate a valid lower bound. The
    q-th-moment CI is mean +/- 1.96 stderr mapped through x -> x^{1/q}.
    """
    if q not in (1, 2):
        raise ValueError(f"q must be 1 or 2, got {q}")
    if trials < 100:
        raise ValueError(f"need trials >= 100, got {trials}")
    est = _resolve_estimator(estimator, model.d, seed)
    _validate_combo(est, adversary, model, n, delta)
    budget = CorruptionBudget.from_eta(eta, n)
    if adversary in ("local-shift", "block-resample"):
        budget.require_nonempty()
    n_blocks = len(block_layout(n, budget.k)) if adversary == "block-resample" else 0
    mu0 = float(model.mu[0]) if isinstance(model, GaussianModel) else None

    def run_trial(t: int) -> float:
        data_rng = RngStream(seed, 2 * t)
        adv_rng = RngStream(seed, 2 * t + 1)
        if adversary == "tv-coupling":
            clean, out = tv_coupling_adversary(mu0, eta, n, data_rng)
            if not out.feasible:
                return 0.0
            return float(np.linalg.norm(est(out.corrupted) - est(clean)))
        x = model.sample(n, data_rng)
        if adversary == "median-exact":
            return float(median_worst_case(x, budget).certificate)
        if adversary == "hamming-ball":
            return float(hamming_ball_sup(est, x, budget).certificate)
        if adversary == "resample":
            out = resampling_adversary(x, budget, model, adv_rng)
        elif adversary == "local-shift":
            out = local_shift_adversary(x, budget, delta, adv_rng)
        else:
            out = block_resample(x, budget, t % n_blocks, model, adv_rng)
        if not out.feasible:
            return 0.0
        return float(np.linalg.norm(est(out.corrupted) - est(x)))

    per_trial = np.empty(trials)
    if workers <= 1:
        for t in range(trials):
            per_trial[t] = run_trial(t)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for t, value in enumerate(pool.map(run_trial, range(trials))):
                per_trial[t] = value

    powered = per_trial if q == 1 else per_trial * per_trial
    moment = float(powered.mean())
    stderr = float(powered.std(ddof=1) / math.sqrt(trials))
    lo = max(moment - 1.96 * stderr, 0.0)
    hi = moment + 1.96 * stderr
    root = 1.0 / q
    per_trial.flags.writeable = False
    return SensitivityReport(
        estimator=est.name,
        adversary=adversary,
        n=n,
        d=model.d,
        eta=float(eta),
        k=budget.k,
        q=q,
        trials=trials,
        seed=seed,
        delta=None if delta is None else float(delta),
        es_estimate=moment ** root,
        ci_low=lo ** root,
        ci_high=hi ** root,
        lower_bound_only=adversary not in EXACT_ADVERSARIES,
        per_trial=per_trial,
    )


@dataclass(frozen=True, eq=False)
class ScalingFit:
    """Log-log least-squares fit of sensitivity against one swept variable.

    Only points whose CI half-width is below 10% of the point estimate enter
    the fit; ``used`` records which ones survived.
    """

    variable: str
    values: tuple[float, ...]
    reports: tuple[SensitivityReport, ...]
    used: tuple[bool, ...]
    slope: float
    intercept: float
    r_squared: float

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "scaling-fit",
            "variable": self.variable,
            "values": [float(v) for v in self.values],
            "es_estimates": [r.es_estimate for r in self.reports],
            "ci_lows": [r.ci_low for r in self.reports],
            "ci_highs": [r.ci_high for r in self.reports],
            "used": list(self.used),
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
        }

    def to_json(self) -> str:
        return _dump_json(self.to_json_dict())


def scaling_sweep(
    estimator: str,
    adversary: str,
    *,
    variable: str,
    values: Sequence[float],
    eta: float = 0.1,
    n: int = 1000,
    d: int = 1,
    mu: float = 0.0,
    q: int = 2,
    trials: int = 10_000,
    seed: int = 0,
    delta: float | None = None,
    workers: int = 1,
) -> ScalingFit:
    """Run ``estimate_es`` over a grid of eta, n, or d and fit a log-log line."""
    if variable not in ("eta", "n", "d"):
        raise ValueError(f"sweep variable must be eta, n, or d, got {variable!r}")
    values = tuple(float(v) for v in values)
    if len(values) < 4:
        raise ValueError("sweep grid needs at least 4 points")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("sweep grid must be strictly increasing")

    reports = []
    for v in values:
        point = {"eta": eta, "n": n, "d": d}
        point[variable] = v
        point_n, point_d = int(point["n"]), int(point["d"])
        model = GaussianModel(np.full(point_d, mu))
        reports.append(estimate_es(
            estimator, adversary, model,
            eta=float(point["eta"]), n=point_n, q=q, trials=trials,
            seed=seed, delta=delta, workers=workers,
        ))

    used = tuple(
        r.es_estimate > 0.0 and (r.ci_high - r.ci_low) / 2.0 < 0.1 * r.es_estimate
        for r in reports
    )
    if sum(used) < 4:
        raise ValueError("fewer than 4 usable points after CI filtering")
    xs = np.log([v for v, u in zip(values, used) if u])
    ys = np.log([r.es_estimate for r, u in zip(reports, used) if u])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r_squared = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(
        variable=variable,
        values=values,
        reports=tuple(reports),
        used=used,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
    )


def _uniform_scalar(gen: np.random.Generator, lo: float, hi: float) -> float:
    return lo + (hi - lo) * float(uniform_open(gen, ()))


@dataclass(frozen=True)
class MeanObstructionReport:
    """Low-corruption obstruction: local shift vs the global shift it mimics."""

    eta: float
    delta: float
    n: int
    k: int
    trials: int
    seed: int
    prior: tuple[float, float]
    avg_displacement: float
    stderr: float
    predicted: float
    chi2_budget: float
    regime_ok: bool


def mean_obstruction_low(
    h: Estimator | str,
    *,
    eta: float,
    delta: float,
    n: int,
    prior: tuple[float, float] = (0.1, 0.9),
    trials: int = 10_000,
    seed: int = 0,
) -> MeanObstructionReport:
    """Average displacement of a bounded scalar estimator under the random
    k-subset +delta shift, with the parameter drawn from a flat prior.

    An accurate estimator must track the statistically indistinguishable
    global shift of eta * delta, so the measured average is compared to that
    prediction; the chi^2 budget of the indistinguishability argument is
    reported alongside. Requires the low-corruption regime k <= sqrt(n)
    (violations warn rather than fail).
    """
    est = _resolve_estimator(h, 1, seed)
    if est.output_dim != 1:
        raise ValueError("mean_obstruction_low takes a scalar estimator")
    budget = CorruptionBudget.from_eta(eta, n)
    budget.require_nonempty()
    lo, hi = prior
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"prior must be an interval inside [0, 1], got {prior}")
    regime_ok = budget.k <= math.sqrt(n)
    if not regime_ok:
        warnings.warn(f"k = {budget.k} exceeds sqrt(n) = {math.sqrt(n):.2f}; "
                      "outside the low-corruption regime", stacklevel=2)

    disps = np.empty(trials)
    for t in range(trials):
        gen = RngStream(seed, 2 * t).generator()
        mu_prime = _uniform_scalar(gen, lo, hi)
        x = Dataset(mu_prime + standard_normal(gen, (n, 1)))
        out = local_shift_adversary(x, budget, delta, RngStream(seed, 2 * t + 1))
        disps[t] = float(est(out.corrupted)[0] - est(x)[0])

    return MeanObstructionReport(
        eta=float(eta),
        delta=float(delta),
        n=n,
        k=budget.k,
        trials=trials,
        seed=seed,
        prior=(float(lo), float(hi)),
        avg_displacement=float(disps.mean()),
        stderr=float(disps.std(ddof=1) / math.sqrt(trials)),
        predicted=float(eta) * float(delta),
        chi2_budget=analysis.chi2_localshift_bound(budget.k, n, delta),
        regime_ok=regime_ok,
    )


@dataclass(frozen=True)
class CouplingObstructionReport:
    """High-corruption obstruction: TV-coupled datasets bridge nearby means."""

    eta: float
    n: int
    k: int
    trials: int
    seed: int
    prior: tuple[float, float]
    avg_displacement_on_feasible: float
    stderr: float
    infeasible_rate: float
    predicted: float
    proof_floor: float


def coupling_obstruction_high(
    h: Estimator | str,
    *,
    eta: float,
    n: int,
    trials: int = 10_000,
    seed: int = 0,
    prior: tuple[float, float] | None = None,
) -> CouplingObstructionReport:
    """Average displacement across maximally coupled samples from N(mu', 1)
    and N(mu' + eta, 1), counted only when the coupling stays within budget.

    The mean response of an accurate estimator moves by about eta between the
    two parameters, and the endpoint-average argument guarantees the measured
    value is at least eta/3 minus the infeasibility rate (``proof_floor``).
    """
    if not (0.0 < eta <= 0.1):
        raise ValueError(f"coupling obstruction requires eta in (0, 1/10], got {eta}")
    est = _resolve_estimator(h, 1, seed)
    if est.output_dim != 1:
        raise ValueError("coupling_obstruction_high takes a scalar estimator")
    budget = CorruptionBudget.from_eta(eta, n)
    budget.require_nonempty()
    lo, hi = prior if prior is not None else (0.0, 1.0 - eta)
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"prior must be an interval inside [0, 1], got {(lo, hi)}")

    vals = np.empty(trials)
    infeasible = 0
    for t in range(trials):
        gen = RngStream(seed, 2 * t).generator()
        mu_prime = _uniform_scalar(gen, lo, hi)
        x, y = couple_gaussian_pair(gen, mu_prime, eta, n)
        if int(np.count_nonzero(x != y)) <= budget.k:
            vals[t] = float(est(Dataset(y))[0] - est(Dataset(x))[0])
        else:
            vals[t] = 0.0
            infeasible += 1

    rate = infeasible / trials
    return CouplingObstructionReport(
        eta=float(eta),
        n=n,
        k=budget.k,
        trials=trials,
        seed=seed,
        prior=(float(lo), float(hi)),
        avg_displacement_on_feasible=float(vals.mean()),
        stderr=float(vals.std(ddof=1) / math.sqrt(trials)),
        infeasible_rate=rate,
        predicted=float(eta),
        proof_floor=float(eta) / 3.0 - rate,
    )


@dataclass(frozen=True)
class VarianceObstructionReport:
    """Block resampling converts clean output variance into sensitivity."""

    eta: float
    n: int
    d: int
    k: int
    n_blocks: int
    trials: int
    seed: int
    var_clean: float
    var_clean_stderr: float
    block_gaps: tuple[float, ...]
    max_block_gap: float
    max_block_gap_stderr: float
    efron_stein_lhs: float
    efron_stein_rhs: float
    two_over_m_holds: bool
    implied_es_lb: float


def variance_obstruction(
    f: Estimator | str,
    model: GaussianModel,
    *,
    eta: float,
    n: int,
    trials: int = 10_000,
    seed: int = 0,
) -> VarianceObstructionReport:
    """Estimate the clean output variance, the per-block resampling gaps
    E||f(X) - f(X^(i))||^2, and the implied sensitivity lower bound.

    Over M = ceil(n/k) disjoint blocks the block Efron-Stein inequality gives
    max_i E||f(X) - f(X^(i))||^2 >= (2/M) Var(f(X)); the report checks this
    with Monte Carlo slack and returns sqrt(max gap) as the certified ES_2
    lower bound.
    """
    est = _resolve_estimator(f, model.d, seed)
    budget = CorruptionBudget.from_eta(eta, n)
    budget.require_nonempty()
    layout = block_layout(n, budget.k)
    m_blocks = len(layout)

    outputs = np.empty((trials, est.output_dim))
    gaps = np.empty((trials, m_blocks))
    for t in range(trials):
        x = model.sample(n, RngStream(seed, 2 * t)).samples
        fx = est.on_stack(x[None])[0]
        outputs[t] = fx
        adv_gen = RngStream(seed, 2 * t + 1).generator()
        stack = np.broadcast_to(x, (m_blocks,) + x.shape).copy()
        for i, (start, stop) in enumerate(layout):
            stack[i, start:stop, :] = model.draw(adv_gen, stop - start)
        gaps[t] = ((est.on_stack(stack) - fx) ** 2).sum(axis=1)

    var_clean, var_se = analysis._variance_with_se(outputs)
    block_means = gaps.mean(axis=0)
    block_ses = gaps.std(axis=0, ddof=1) / math.sqrt(trials)
    top = int(np.argmax(block_means))
    max_gap = float(block_means[top])
    max_gap_se = float(block_ses[top])
    slack = 4.0 * math.hypot(2.0 / m_blocks * var_se, max_gap_se)
    return VarianceObstructionReport(
        eta=float(eta),
        n=n,
        d=model.d,
        k=budget.k,
        n_blocks=m_blocks,
        trials=trials,
        seed=seed,
        var_clean=var_clean,
        var_clean_stderr=var_se,
        block_gaps=tuple(float(v) for v in block_means),
        max_block_gap=max_gap,
        max_block_gap_stderr=max_gap_se,
        efron_stein_lhs=var_clean,
        efron_stein_rhs=float(0.5 * block_means.sum()),
        two_over_m_holds=(2.0 / m_blocks) * var_clean <= max_gap + slack,
        implied_es_lb=math.sqrt(max_gap),
    )


@dataclass(frozen=True)
class VerifyRow:
    name: str
    result: analysis.IneqCheckResult


def all_pass(rows: Iterable[VerifyRow]) -> bool:
    return all(row.result.holds for row in rows)


def format_verify_table(rows: Iterable[VerifyRow]) -> str:
    lines = [f"{'check':<42} {'lhs':>14} {'rhs':>14} {'stderr':>10}  status"]
    for row in rows:
        r = row.result
        se = f"{r.mc_stderr:.3g}" if r.mc_stderr is not None else "-"
        status = "PASS" if r.holds else "FAIL"
        lines.append(f"{row.name:<42} {r.lhs:>14.6g} {r.rhs:>14.6g} {se:>10}  {status}")
    return "\n".join(lines)


def _exact(lhs: float, rhs: float, *, atol: float = 0.0) -> analysis.IneqCheckResult:
    # Closed-form row: equality within atol when atol > 0, else lhs <= rhs.
    holds = abs(lhs - rhs) <= atol if atol > 0.0 else lhs <= rhs
    return analysis.IneqCheckResult(lhs=float(lhs), rhs=float(rhs), holds=holds)


def _constant_estimator(value: float) -> Estimator:
    return Estimator(
        name=f"const({value})",
        output_dim=1,
        fn=lambda x: np.array([value]),
        stack_fn=lambda stack: np.full((stack.shape[0], 1), value),
    )


def _scaled_mean(factor: float) -> Estimator:
    return Estimator(
        name=f"{factor}x-mean",
        output_dim=1,
        fn=lambda x: factor * x.samples.mean(axis=0),
        stack_fn=lambda stack: factor * stack.mean(axis=1),
        translation_equivariant=False,
        linear_in_data=True,
    )


def _binomial_pmf_floor(max_n: int = 200) -> float:
    worst = math.inf
    for n in range(1, max_n + 1):
        r = np.arange(n + 1)
        pmf = np.array([analysis.binomial_point_mass(n, int(v)) for v in r])
        worst = min(worst, float((pmf * np.sqrt(r + 1.0)).min()))
    return worst


def _beta_binomial_quadrature(n: int) -> np.ndarray:
    out = np.empty(n + 1)
    for t in range(n + 1):
        coeff = math.comb(n, t)
        out[t] = integrate.quad(lambda p, t=t: coeff * p ** t * (1 - p) ** (n - t), 0, 1)[0]
    return out


def verify_suite(
    trials_scale: int = 100_000,
    seed: int = 0,
    extra_checks: Sequence[tuple[str, Callable[[RngStream], analysis.IneqCheckResult]]] | None = None,
) -> list[VerifyRow]:
    """Run every inequality checker over its documented grid.

    Monte Carlo rows draw ``trials_scale`` samples (subject to each checker's
    minimum; the chi-square product oracle uses 10x to resolve its 5%
    tolerance). Rows are independently seeded by position, so the table is
    reproducible for a given (trials_scale, seed). ``extra_checks`` lets the
    self-test inject a deliberately failing row.
    """
    rows: list[VerifyRow] = []
    counter = 0

    def stream() -> RngStream:
        nonlocal counter
        counter += 1
        return RngStream(seed, counter)

    def add(name: str, result: analysis.IneqCheckResult) -> None:
        rows.append(VerifyRow(name, result))

    t_mc = int(trials_scale)
    t_lr = max(t_mc, 10_000)
    t_small = max(t_mc, 1_000)
    gauss1 = GaussianModel(np.zeros(1))
    mean1 = mean_estimator(1)
    median1 = median_estimator(1)

    # Efron-Stein: linear statistic saturates the inequality, the median obeys it.
    add("efron-stein/mean-n25", analysis.efron_stein_check(mean1, gauss1, 25, t_small, stream()))
    add("efron-stein/median-n101", analysis.efron_stein_check(median1, gauss1, 101, t_small, stream()))
    add("efron-stein/constant", analysis.efron_stein_check(_constant_estimator(0.7), gauss1, 10, t_small, stream()))

    # Variance lower bounds via chi-square (HCR) and Fisher information.
    add("hcr/mean-n25", analysis.hcr_check(mean1, 0.0, 1.0 / math.sqrt(25), 25, t_small, stream()))
    add("hcr/median-n101", analysis.hcr_check(median1, 0.0, 1.0 / math.sqrt(101), 101, t_small, stream()))
    add("hcr/constant", analysis.hcr_check(_constant_estimator(0.3), 0.0, 0.2, 25, t_small, stream()))
    add("cramer-rao/mean-n25", analysis.cramer_rao_check(mean1, 0.0, 25, t_small, stream()))
    add("cramer-rao/scaled-mean-n25", analysis.cramer_rao_check(_scaled_mean(2.0), 0.0, 25, t_small, stream()))
    add("cramer-rao/constant", analysis.cramer_rao_check(_constant_estimator(0.3), 0.0, 25, t_small, stream()))

    # Gaussian likelihood-ratio product identity.
    add("gaussian-lr/orthogonal", analysis.gaussian_lr_identity_check([1.0, 0.0], [0.0, 1.0], t_lr, stream()))
    add("gaussian-lr/aligned", analysis.gaussian_lr_identity_check([1.0], [1.0], t_lr, stream()))
    add("gaussian-lr/opposite", analysis.gaussian_lr_identity_check([1.0], [-1.0], t_lr, stream()))

    # Overlap MGF of two independent random k-subsets.
    add("hypergeom-mgf/lambda-zero", analysis.hypergeom_mgf_check(100, 10, 0.0, t_mc, stream()))
    add("hypergeom-mgf/n100-k10", analysis.hypergeom_mgf_check(100, 10, 1.0, t_mc, stream()))
    add("hypergeom-mgf/degenerate-n-equals-k", analysis.hypergeom_mgf_check(10, 10, 1.0, t_mc, stream()))

    # chi-square closed forms against likelihood-ratio simulation.
    add("chi2-products/zero-delta", _exact(analysis.chi2_gaussian_products(0.0, 100), 0.0, atol=1e-15))
    closed = analysis.chi2_gaussian_products(0.1, 100)
    mc, se = analysis.chi2_products_mc(0.1, 100, 10 * t_mc, stream())
    add("chi2-products/e-minus-1-mc", analysis.IneqCheckResult(
        lhs=mc, rhs=closed, holds=abs(mc - closed) <= max(4.0 * se, 0.05 * closed),
        mc_stderr=se, trials=10 * t_mc))
    add("chi2-localshift/zero-delta", _exact(analysis.chi2_localshift_bound(10, 100, 0.0), 0.0, atol=1e-15))
    grid_k = [analysis.chi2_localshift_bound(k, 100, 0.5) for k in (1, 5, 20, 60, 100)]
    grid_d = [analysis.chi2_localshift_bound(10, 100, dl) for dl in (0.0, 0.3, 0.8, 1.5)]
    worst_step = max(max(a - b for a, b in zip(grid_k, grid_k[1:])),
                     max(a - b for a, b in zip(grid_d, grid_d[1:])))
    add("chi2-localshift/monotone", _exact(worst_step, 0.0))
    for label, (k_, n_, d_) in (("k3-n50", (3, 50, 0.5)), ("k5-n100", (5, 100, 0.8))):
        bound = analysis.chi2_localshift_bound(k_, n_, d_)
        mc, se = analysis.chi2_localshift_mc(k_, n_, d_, t_mc, stream())
        add(f"chi2-localshift/mc-{label}", analysis.IneqCheckResult(
            lhs=mc, rhs=bound, holds=mc <= bound + 4.0 * se, mc_stderr=se, trials=t_mc))

    # TV of a Gaussian mean shift: below eta, increasing, tending to 1.
    grid = [1e-3, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0]
    tv = [analysis.tv_gaussian_shift(e) for e in grid]
    add("tv/strictly-below-eta", _exact(max(t - e for t, e in zip(tv, grid)), 0.0))
    add("tv/strictly-increasing", _exact(max(a - b for a, b in zip(tv, tv[1:])), 0.0))
    add("tv/limit-one", _exact(1.0 - analysis.tv_gaussian_shift(50.0), 1e-6))

    # Chernoff bounds against exact binomial tails.
    add("chernoff/n100-p001-t10", _exact(analysis.binomial_tail(100, 0.01, 10),
                                         analysis.chernoff_tail_bound(100, 0.01, 10)))
    add("chernoff/vacuous", _exact(analysis.binomial_tail(100, 0.5, 10),
                                   analysis.chernoff_tail_bound(100, 0.5, 10)))
    p_couple = analysis.tv_gaussian_shift(0.1)
    add("chernoff/coupling-sharp", _exact(analysis.binomial_tail(2000, p_couple, 200),
                                          analysis.chernoff_tail_bound(2000, p_couple, 200, sharp=True)))

    # Binomial point masses: frozen exact values plus the measured floor of
    # pmf * sqrt(r+1) over the desk-scale grid (a measured value, no provenance).
    add("binomial-point-mass/r-zero", _exact(analysis.binomial_point_mass(7, 0), 1.0, atol=1e-12))
    add("binomial-point-mass/n4-r2", _exact(analysis.binomial_point_mass(4, 2), 0.375, atol=1e-12))
    add("binomial-point-mass/n9-r3", _exact(analysis.binomial_point_mass(9, 3), 5376.0 / 19683.0, atol=1e-12))
    add("binomial-point-mass/floor-0.24", _exact(0.24, _binomial_pmf_floor(200)))

    # Uniform spacing moments (Beta(1, n) marginals).
    add("uniform-spacing/n1", analysis.uniform_spacing_check(1, 1, t_mc, stream()))
    add("uniform-spacing/n9-i5", analysis.uniform_spacing_check(9, 5, t_mc, stream()))

    # Flat layer law of the uniform Bernoulli mixture.
    law3 = beta_binomial_layer_law(3)
    add("beta-binomial/n3", _exact(float(np.abs(law3 - 0.25).max()), 1e-12))
    law10 = beta_binomial_layer_law(10)
    add("beta-binomial/n10-quadrature", _exact(float(np.abs(law10 - _beta_binomial_quadrature(10)).max()), 1e-10))
    add("beta-binomial/sums-to-one", _exact(abs(float(law10.sum()) - 1.0), 1e-12))

    if extra_checks:
        for name, fn in extra_checks:
            add(name, fn(stream()))
    return rows
