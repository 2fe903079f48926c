"""Wald/IV, first stage, reduced form and OLS on simulated panels, plus Monte Carlo replication.

All estimators use sample moments. The closed-form population values live in
:mod:`persistlab.oracles`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy.stats import norm

from . import _rng
from .errors import ConstantRegressor, DegenerateInstrument, EmptyComplierSet, PersistLabError, WeakFirstStage
from .history import Compliance, ComplianceCounts, classify_compliance, simulate_panel, treatment_of
from .population import Population

if TYPE_CHECKING:
    from .scenarios import ScenarioConfig

WEAK_FIRST_STAGE_TOL = 1e-10
_Z975 = float(norm.ppf(0.975))


def _arms(z, low=0, high=1):
    z = np.asarray(z)
    hi = z == high
    lo = z == low
    if not np.all(hi | lo):
        raise DegenerateInstrument(f"instrument takes values outside {{{low}, {high}}}")
    if not hi.any() or not lo.any():
        raise DegenerateInstrument("instrument is constant in the sample")
    return hi, lo


def _mean_diff(z, v, low=0, high=1) -> float:
    hi, lo = _arms(z, low, high)
    v = np.asarray(v, dtype=float)
    return float(np.mean(v[hi]) - np.mean(v[lo]))


def first_stage(z, d) -> float:
    """Mean of ``d`` at z = 1 minus its mean at z = 0."""
    return _mean_diff(z, d)


def reduced_form(z, y) -> float:
    """Mean of ``y`` at z = 1 minus its mean at z = 0."""
    return _mean_diff(z, y)


def wald(z, d, y, tol: float = WEAK_FIRST_STAGE_TOL) -> float:
    """Ratio of reduced form to first stage for a binary instrument.

    Raises
    ------
    DegenerateInstrument
        If ``z`` is constant.
    WeakFirstStage
        If the first stage is zero or smaller than ``tol`` in absolute value.
    """
    fs = first_stage(z, d)
    if fs == 0 or abs(fs) < tol:
        raise WeakFirstStage(f"first stage {fs!r} is below tolerance {tol}")
    return reduced_form(z, y) / fs


def pairwise_wald(z, d, y, pair: tuple[int, int], tol: float = WEAK_FIRST_STAGE_TOL) -> float:
    """Wald estimator on the subsample with z in ``pair``; the higher value acts as z = 1."""
    low, high = sorted(pair)
    z = np.asarray(z)
    keep = (z == low) | (z == high)
    zz = (z[keep] == high).astype(np.int64)
    return wald(zz, np.asarray(d)[keep], np.asarray(y)[keep], tol=tol)


def ols_slope(d, y) -> float:
    """Slope of the least-squares line of ``y`` on ``d`` (with intercept)."""
    d = np.asarray(d, dtype=float)
    y = np.asarray(y, dtype=float)
    dc = d - d.mean()
    sxx = float(np.dot(dc, dc))
    if sxx == 0:
        raise ConstantRegressor("regressor is constant")
    return float(np.dot(dc, y - y.mean())) / sxx


def _target_column(pop: Population, target: str) -> np.ndarray:
    if target == "beta":
        return pop.return_beta
    if target == "rho":
        # contrast of x_t between proxy on and off is rho_i in proxy mechanisms
        return pop.rho
    raise ValueError(f"unknown target {target!r}; use 'beta' or 'rho'")


def late_classified(labels, pop: Population, target: str = "beta") -> float:
    """Mean effect (``return_beta`` or ``rho``) over locations labeled compliers."""
    mask = np.asarray(labels) == Compliance.COMPLIER
    if not mask.any():
        raise EmptyComplierSet("no compliers in this population")
    return float(np.mean(_target_column(pop, target)[mask]))


def ate(pop: Population, target: str = "beta") -> float:
    return float(np.mean(_target_column(pop, target)))


# -- Monte Carlo -------------------------------------------------------------


@dataclass(frozen=True)
class McSummary:
    mean: float
    sd: float
    ci_lo: float
    ci_hi: float
    count: int

    @classmethod
    def from_values(cls, values) -> McSummary:
        v = np.asarray([x for x in values if not math.isnan(x)], dtype=float)
        if v.size == 0:
            nan = float("nan")
            return cls(nan, nan, nan, nan, 0)
        mean = float(np.mean(v))
        sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
        half = _Z975 * sd / math.sqrt(v.size)
        return cls(mean, sd, mean - half, mean + half, int(v.size))


@dataclass(frozen=True)
class Replication:
    index: int
    seed: int
    values: dict[str, float]
    compliance: ComplianceCounts | None
    void_reason: str | None = None


@dataclass(frozen=True)
class EstimateReport:
    """Monte Carlo means of every estimand; ``mc_*`` refer to the headline estimand."""

    wald: float
    first_stage: float
    reduced_form: float
    ols_slope: float
    late_classified: float
    ate: float
    mc_mean: float
    mc_sd: float
    mc_ci95: tuple[float, float]
    n_reps: int
    n_void: int
    headline: str
    summaries: dict[str, McSummary] = field(default_factory=dict)
    replications: tuple[Replication, ...] = ()

    @property
    def void_share(self) -> float:
        return self.n_void / self.n_reps


def effect_target(dgp: ScenarioConfig) -> str:
    return "rho" if dgp.mechanism in ("instrumented-proxy", "continuous-proxy") else "beta"


def estimands(dgp: ScenarioConfig) -> tuple[str, ...]:
    if dgp.instrument is None:
        return ("ols_slope", "ate")
    if dgp.instrument.kind == "ternary":
        return (
            "wald_01",
            "wald_12",
            "first_stage_01",
            "first_stage_12",
            "reduced_form_01",
            "reduced_form_12",
            "late_classified_01",
            "ate",
        )
    return ("wald", "first_stage", "reduced_form", "ols_slope", "late_classified", "ate")


def headline_estimand(dgp: ScenarioConfig) -> str:
    return estimands(dgp)[0]


def estimate_panel(dgp: ScenarioConfig, pop: Population, panel, labels=None) -> dict[str, float]:
    """Compute every estimand of the scenario on one panel.

    Raises the estimator's error if the headline estimand is undefined.
    Secondary estimands that are undefined come back as NaN.
    """
    target = effect_target(dgp)
    d = treatment_of(panel, dgp) if dgp.mechanism == "instrumented-proxy" else panel.x_now
    y = panel.outcome
    nan = float("nan")
    out = {"ate": ate(pop, target)}
    if dgp.instrument is None:
        out["ols_slope"] = ols_slope(panel.proxy, panel.x_now)
        return out

    def soft(fn, *args):
        try:
            return fn(*args)
        except PersistLabError:
            return nan

    if dgp.instrument.kind == "ternary":
        z = panel.z
        out["wald_01"] = pairwise_wald(z, d, y, (0, 1))
        out["wald_12"] = soft(pairwise_wald, z, d, y, (1, 2))
        for lo, hi in ((0, 1), (1, 2)):
            keep = (z == lo) | (z == hi)
            zz = (z[keep] == hi).astype(np.int64)
            out[f"first_stage_{lo}{hi}"] = soft(first_stage, zz, d[keep])
            out[f"reduced_form_{lo}{hi}"] = soft(reduced_form, zz, y[keep])
        out["late_classified_01"] = nan if labels is None else soft(late_classified, labels, pop, target)
        return out

    out["wald"] = wald(panel.z, d, y)
    out["first_stage"] = first_stage(panel.z, d)
    out["reduced_form"] = reduced_form(panel.z, y)
    out["ols_slope"] = soft(ols_slope, d, y)
    out["late_classified"] = nan if labels is None else soft(late_classified, labels, pop, target)
    return out


def run_replication(dgp: ScenarioConfig, index: int, seed: int) -> Replication:
    rep_seed = _rng.derive_seed(seed, index)
    pop, panel = simulate_panel(dgp, rep_seed)
    counts = labels = None
    if dgp.instrument is not None:
        pair = (0, 1) if dgp.instrument.kind == "ternary" else None
        counts, labels = classify_compliance(pop, dgp, rep_seed, pair=pair)
    names = estimands(dgp)
    try:
        values = estimate_panel(dgp, pop, panel, labels)
    except (WeakFirstStage, DegenerateInstrument, ConstantRegressor) as exc:
        values = {k: float("nan") for k in names}
        return Replication(index, rep_seed, values, counts, void_reason=type(exc).__name__)
    return Replication(index, rep_seed, {k: values[k] for k in names}, counts)


def monte_carlo(dgp: ScenarioConfig, reps: int, seed: int, threads: int | None = 1) -> EstimateReport:
    """Replicate the scenario ``reps`` times with per-replication seeds derived from ``seed``.

    Results do not depend on ``threads``: each replication is a pure function
    of (dgp, index, seed) and aggregation runs in index order. Replications
    with a void first stage or constant instrument are kept in
    ``replications``, counted in ``n_void`` and excluded from the means.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    threads = threads or os.cpu_count() or 1
    if threads == 1:
        results = [run_replication(dgp, i, seed) for i in range(reps)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: run_replication(dgp, i, seed), range(reps)))

    names = estimands(dgp)
    summaries = {k: McSummary.from_values([r.values[k] for r in results]) for k in names}
    head = names[0]
    hs = summaries[head]

    def mean_of(name):
        return summaries[name].mean if name in summaries else float("nan")

    return EstimateReport(
        wald=mean_of("wald"),
        first_stage=mean_of("first_stage"),
        reduced_form=mean_of("reduced_form"),
        ols_slope=mean_of("ols_slope"),
        late_classified=mean_of("late_classified"),
        ate=mean_of("ate"),
        mc_mean=hs.mean,
        mc_sd=hs.sd,
        mc_ci95=(hs.ci_lo, hs.ci_hi),
        n_reps=reps,
        n_void=sum(r.void_reason is not None for r in results),
        headline=head,
        summaries=summaries,
        replications=tuple(results),
    )
