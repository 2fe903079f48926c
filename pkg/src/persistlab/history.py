"""Treatment take-up and its evolution from the historical past to the present.

Each mechanism maps (population, instrument, seed) to a simulated panel. All
random draws come from counter-based streams keyed by location index, so
re-running a mechanism with the instrument forced to another value reuses the
same per-location noise. That is how compliance types are made operational.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import _rng
from .errors import ConfigError, PersistLabError, TernaryInstrument
from .population import Population, assign_instrument, sample_population

if TYPE_CHECKING:
    from .scenarios import ScenarioConfig

MECHANISMS = (
    "baseline-cutoff",
    "dynamic",
    "reversal",
    "markov",
    "continuous-proxy",
    "instrumented-proxy",
)
BINARY_MECHANISMS = ("baseline-cutoff", "dynamic", "reversal", "markov")
CONTINUOUS_MECHANISMS = ("continuous-proxy", "instrumented-proxy")


@dataclass(frozen=True)
class CostSchedule:
    """Cost of taking treatment, c(z, s) = cost(z) + shock_sensitivity * s.

    With a three-valued instrument, ``cost_z1`` applies at z = 1 and
    ``cost_z0`` at z = 0 and z = 2. ``reversal_feedback`` is the cost
    reduction that accrues after the first period to locations with z = 0 that
    were untreated at the start, scaled by their latent trait.
    """

    cost_z0: float
    cost_z1: float
    shock_sensitivity: float = 0.0
    reversal_feedback: float = 0.0

    def __post_init__(self):
        for name in ("cost_z0", "cost_z1", "shock_sensitivity", "reversal_feedback"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"costs.{name} must be finite")

    @property
    def monotone(self) -> bool:
        return self.cost_z1 < self.cost_z0

    def level(self, z: np.ndarray) -> np.ndarray:
        return np.where(np.asarray(z) == 1, self.cost_z1, self.cost_z0)


@dataclass(frozen=True)
class ShockProcess:
    """Law of the i.i.d. innovations s_tau; ``"uniform"`` on [lo, hi] or ``"normal"`` with sd."""

    kind: str = "uniform"
    lo: float = 0.0
    hi: float = 1.0
    sd: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "normal"):
            raise ConfigError(f"unknown shock process {self.kind!r}")
        if self.kind == "uniform" and not self.lo <= self.hi:
            raise ConfigError("shock process needs lo <= hi")
        if self.sd < 0:
            raise ConfigError("shock process sd must be nonnegative")

    def draw(self, seed: int, period: int, n: int) -> np.ndarray:
        stream = _rng.S_PROCESS + period
        if self.kind == "uniform":
            return self.lo + (self.hi - self.lo) * _rng.uniforms(seed, stream, n)
        return self.sd * _rng.normals(seed, stream, n)


@dataclass(frozen=True)
class NoiseModel:
    alpha: float = 0.0
    u_sd: float = 0.0
    eps_sd: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ConfigError("noise.alpha must be finite")
        if not (self.u_sd >= 0 and self.eps_sd >= 0):
            raise ConfigError("noise standard deviations must be nonnegative")


@dataclass(frozen=True, eq=False)
class SimulatedPanel:
    """One realized cross-section.

    ``x_now`` is binary in binary mechanisms, the diversity level in {0, 1, 2}
    under a ternary instrument, and real-valued in continuous mechanisms (where
    ``outcome`` is x_now itself). ``proxy`` is all-zero when a mechanism has no
    proxy.
    """

    z: np.ndarray | None
    x_hist: np.ndarray
    x_now: np.ndarray
    proxy: np.ndarray
    outcome: np.ndarray
    s_path: np.ndarray | None = None

    def __len__(self):
        return len(self.x_now)


class Compliance(enum.IntEnum):
    NEVER_TAKER = 0
    ALWAYS_TAKER = 1
    COMPLIER = 2
    DEFIER = 3


@dataclass(frozen=True)
class ComplianceCounts:
    always_takers: int
    never_takers: int
    compliers: int
    defiers: int

    @property
    def total(self) -> int:
        return self.always_takers + self.never_takers + self.compliers + self.defiers

    def shares(self) -> dict[str, float]:
        n = self.total
        return {
            "always_takers": self.always_takers / n,
            "never_takers": self.never_takers / n,
            "compliers": self.compliers / n,
            "defiers": self.defiers / n,
        }


# -- take-up ---------------------------------------------------------------


def takeup_baseline(pop: Population, costs: CostSchedule, z) -> np.ndarray:
    """Cutoff take-up: treated iff benefit >= c(z); ties take treatment."""
    return (pop.benefit >= costs.level(z)).astype(np.int64)


def takeup_ternary(pop: Population, costs: CostSchedule, z) -> np.ndarray:
    """Level reached under a three-valued instrument.

    Locations sit at the level their instrument dictates unless their benefit
    clears the cost of converging to the peak level 1.
    """
    z = np.asarray(z)
    return np.where(pop.benefit >= costs.level(z), 1, z).astype(np.int64)


def evolve_perfect_persistence(x_hist) -> np.ndarray:
    return np.array(x_hist, copy=True)


def _dynamic_path(pop, costs, z, s_process, horizon, seed, feedback):
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if np.any((np.asarray(z) != 0) & (np.asarray(z) != 1)):
        raise ConfigError("dynamic take-up needs a binary instrument")
    n = len(pop)
    base = costs.level(z)
    reversal = 0.0
    if feedback:
        # lower cost for the z=0 untreated, kicks in after the first period
        reversal = costs.reversal_feedback * pop.latent_trait * (np.asarray(z) == 0)
    x = np.zeros(n, dtype=bool)
    x_hist = None
    s_sum = np.zeros(n)
    for tau in range(horizon):
        s = s_process.draw(seed, tau, n)
        c = base + costs.shock_sensitivity * s
        if tau > 0 and feedback:
            c = c - reversal * (x_hist == 0)
        x |= pop.benefit >= c
        if tau == 0:
            x_hist = x.astype(np.int64)
        s_sum += s
    return x_hist, x.astype(np.int64), s_sum / horizon


def evolve_dynamic_takeup(
    pop: Population, costs: CostSchedule, z, s_process: ShockProcess, horizon: int, seed: int
) -> np.ndarray:
    """Absorbing take-up over ``horizon`` periods, the first being the historical date.

    A location is treated at the end iff b >= c(z) + shock_sensitivity * s_tau
    in at least one period.
    """
    return _dynamic_path(pop, costs, z, s_process, horizon, seed, feedback=False)[1]


def evolve_with_reversal_channel(
    pop: Population,
    costs: CostSchedule,
    z,
    horizon: int,
    seed: int,
    s_process: ShockProcess = ShockProcess(),
) -> np.ndarray:
    """Dynamic take-up where the interacting process favours untreated z = 0 locations.

    Can generate defiers; with zero feedback it equals :func:`evolve_dynamic_takeup`.
    """
    return _dynamic_path(pop, costs, z, s_process, horizon, seed, feedback=True)[1]


def evolve_markov_persistence(pop: Population, x_hist, seed: int) -> np.ndarray:
    """One aggregated transition with Pr(1|0) = 1 - p and Pr(1|1) = q per location."""
    x_hist = np.asarray(x_hist)
    u = _rng.uniforms(seed, _rng.MARKOV, len(pop))
    stay_one = u < pop.persist_q
    enter = u < 1.0 - pop.persist_p
    return np.where(x_hist == 1, stay_one, enter).astype(np.int64)


def continuous_ar_step(pop: Population, x_hist_latent, noise: NoiseModel, seed: int) -> np.ndarray:
    x = np.asarray(x_hist_latent, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("latent historical values must be finite")
    eps = noise.eps_sd * _rng.normals(seed, _rng.EPS, len(pop)) if noise.eps_sd > 0 else 0.0
    return pop.rho * x + eps


def proxy_from_threshold(x_hist_latent, x_tilde: float) -> np.ndarray:
    """Proxy switches on strictly above the threshold."""
    return (np.asarray(x_hist_latent) > x_tilde).astype(np.int64)


def outcome(pop: Population, x_now, noise: NoiseModel, seed: int) -> np.ndarray:
    u = noise.u_sd * _rng.normals(seed, _rng.OUTCOME, len(pop)) if noise.u_sd > 0 else 0.0
    return noise.alpha + pop.return_beta * np.asarray(x_now, dtype=float) + u


# -- full panels -------------------------------------------------------------


def draw_population(dgp: ScenarioConfig, seed: int) -> Population:
    """Sample the scenario's population, then apply any threshold rule for rho."""
    pop = sample_population(dgp.mix, dgp.n, seed, benefit_noise=dgp.benefit_noise)
    th = dgp.thresholds
    if th.x_bar is not None:
        rho = np.where(pop.latent_trait > th.x_bar, th.rho_high, th.rho_low)
        pop = pop.replace(rho=rho)
    return pop


def simulate_arm(pop: Population, dgp: ScenarioConfig, z, seed: int) -> SimulatedPanel:
    """Run the scenario's mechanism for a given instrument vector."""
    mech = dgp.mechanism
    n = len(pop)
    zeros = np.zeros(n, dtype=np.int64)
    s_path = None

    if mech in ("continuous-proxy", "instrumented-proxy"):
        if mech == "continuous-proxy":
            latent = pop.latent_trait
            proxy = proxy_from_threshold(latent, dgp.thresholds.x_tilde)
        else:
            if dgp.costs.shock_sensitivity != 0 and dgp.horizon > 1:
                _, proxy, s_path = _dynamic_path(pop, dgp.costs, z, dgp.s_process, dgp.horizon, seed, False)
            else:
                proxy = takeup_baseline(pop, dgp.costs, z)
            latent = proxy + pop.latent_trait
        x_now = continuous_ar_step(pop, latent, dgp.noise, seed)
        return SimulatedPanel(z=z, x_hist=np.asarray(latent), x_now=x_now, proxy=proxy, outcome=x_now, s_path=s_path)

    treated = None
    if mech == "baseline-cutoff":
        if dgp.instrument.kind == "ternary":
            x_hist = takeup_ternary(pop, dgp.costs, z)
            treated = (x_hist == 1).astype(np.int64)
        else:
            x_hist = takeup_baseline(pop, dgp.costs, z)
        x_now = evolve_perfect_persistence(x_hist)
    elif mech in ("dynamic", "reversal"):
        x_hist, x_now, s_path = _dynamic_path(
            pop, dgp.costs, z, dgp.s_process, dgp.horizon, seed, feedback=mech == "reversal"
        )
    elif mech == "markov":
        x_hist = np.asarray(z, dtype=np.int64)
        x_now = evolve_markov_persistence(pop, x_hist, seed)
    else:
        raise ConfigError(f"unknown mechanism {mech!r}")

    y = outcome(pop, x_now if treated is None else treated, dgp.noise, seed)
    return SimulatedPanel(z=z, x_hist=x_hist, x_now=x_now, proxy=zeros, outcome=y, s_path=s_path)


def simulate_panel(dgp: ScenarioConfig, seed: int) -> tuple[Population, SimulatedPanel]:
    pop = draw_population(dgp, seed)
    z = assign_instrument(pop, dgp.instrument, seed) if dgp.instrument is not None else None
    return pop, simulate_arm(pop, dgp, z, seed)


def treatment_of(panel: SimulatedPanel, dgp: ScenarioConfig) -> np.ndarray:
    """The binary variable whose response to the instrument defines compliance."""
    if dgp.mechanism == "instrumented-proxy":
        return panel.proxy
    if dgp.instrument is not None and dgp.instrument.kind == "ternary":
        return (panel.x_now == 1).astype(np.int64)
    return panel.x_now


def classify_compliance(
    pop: Population, dgp: ScenarioConfig, seed: int, pair: tuple[int, int] | None = None
) -> tuple[ComplianceCounts, np.ndarray]:
    """Label every location by re-running its take-up with the instrument forced.

    Both arms share per-location random draws. For a ternary instrument pass
    ``pair=(low, high)``; ``high`` plays the role of z = 1.
    """
    if dgp.instrument is None:
        raise PersistLabError(f"scenario {dgp.name!r} has no instrument to classify against")
    if dgp.instrument.kind == "ternary":
        if pair is None:
            raise TernaryInstrument("ternary instrument: classify per adjacent pair, e.g. pair=(0, 1)")
        lo, hi = pair
    else:
        lo, hi = (0, 1) if pair is None else pair
    n = len(pop)
    d0 = treatment_of(simulate_arm(pop, dgp, np.full(n, lo, dtype=np.int64), seed), dgp)
    d1 = treatment_of(simulate_arm(pop, dgp, np.full(n, hi, dtype=np.int64), seed), dgp)

    labels = np.empty(n, dtype=np.int8)
    labels[(d0 == 1) & (d1 == 1)] = Compliance.ALWAYS_TAKER
    labels[(d0 == 0) & (d1 == 0)] = Compliance.NEVER_TAKER
    labels[(d0 == 0) & (d1 == 1)] = Compliance.COMPLIER
    labels[(d0 == 1) & (d1 == 0)] = Compliance.DEFIER
    counts = ComplianceCounts(
        always_takers=int(np.sum(labels == Compliance.ALWAYS_TAKER)),
        never_takers=int(np.sum(labels == Compliance.NEVER_TAKER)),
        compliers=int(np.sum(labels == Compliance.COMPLIER)),
        defiers=int(np.sum(labels == Compliance.DEFIER)),
    )
    return counts, labels
