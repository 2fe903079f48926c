"""Named, parameterized scenario constructors for each stylized take-up/persistence model.

Every constructor validates the inequality chain its narrative relies on and
records which closed-form oracle applies. Default numbers are illustrative
choices that satisfy those chains, not calibrated magnitudes.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, replace

from .errors import ConfigError, ScenarioInconsistency
from .history import (
    BINARY_MECHANISMS,
    MECHANISMS,
    CostSchedule,
    NoiseModel,
    ShockProcess,
)
from .population import InstrumentRule, LocationProfile, TraitLaw, TypeMix

ORACLES = ("", "two-type", "ternary-pairwise", "defier", "markov", "rho-reduced", "complier-mean")


@dataclass(frozen=True)
class Thresholds:
    """Proxy threshold ``x_tilde`` and, optionally, the persistence threshold ``x_bar``.

    When ``x_bar`` is set, locations with latent trait above it get
    ``rho_high`` and the rest ``rho_low``.
    """

    x_tilde: float | None = None
    x_bar: float | None = None
    rho_low: float | None = None
    rho_high: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    mechanism: str
    mix: TypeMix
    costs: CostSchedule | None = None
    instrument: InstrumentRule | None = InstrumentRule()
    noise: NoiseModel = NoiseModel()
    s_process: ShockProcess = ShockProcess()
    thresholds: Thresholds = Thresholds()
    horizon: int = 1
    n: int = 200_000
    reps: int = 200
    benefit_noise: float = 0.0
    oracle: str = ""

    def __post_init__(self):
        validate(self)

    def with_(self, **changes) -> ScenarioConfig:
        return replace(self, **changes)


def validate(cfg: ScenarioConfig) -> None:
    """Check that the fields required by the mechanism are present and nothing unused is set."""
    mech = cfg.mechanism
    if mech not in MECHANISMS:
        raise ConfigError(f"unknown mechanism {mech!r}")
    if cfg.oracle not in ORACLES:
        raise ConfigError(f"unknown oracle binding {cfg.oracle!r}")
    if not isinstance(cfg.n, int) or cfg.n < 1:
        raise ConfigError("n must be a positive integer")
    if not isinstance(cfg.reps, int) or cfg.reps < 1:
        raise ConfigError("reps must be a positive integer")
    if not isinstance(cfg.horizon, int) or cfg.horizon < 1:
        raise ConfigError("horizon must be a positive integer")
    if not (cfg.benefit_noise >= 0 and math.isfinite(cfg.benefit_noise)):
        raise ConfigError("benefit_noise must be finite and nonnegative")

    profiles = cfg.mix.profiles
    th = cfg.thresholds
    if mech in BINARY_MECHANISMS and any(p.rho != 1.0 for p in profiles):
        raise ConfigError(f"rho is unused by binary mechanism {mech!r} and must stay at 1")
    if mech != "markov" and any(p.persist_p != 1.0 or p.persist_q != 1.0 for p in profiles):
        raise ConfigError(f"persist_p/persist_q are only used by the markov mechanism, not {mech!r}")

    if mech in ("baseline-cutoff", "dynamic", "reversal", "instrumented-proxy"):
        if cfg.costs is None:
            raise ConfigError(f"mechanism {mech!r} requires costs")
    elif cfg.costs is not None:
        raise ConfigError(f"mechanism {mech!r} does not use costs")
    if cfg.costs is not None:
        if mech != "reversal" and cfg.costs.reversal_feedback != 0:
            raise ConfigError("reversal_feedback is only used by the reversal mechanism")
        if mech == "baseline-cutoff" and cfg.costs.shock_sensitivity != 0:
            raise ConfigError("baseline-cutoff has no interacting process; use the dynamic mechanism")
    if mech in ("baseline-cutoff", "markov", "continuous-proxy") and cfg.horizon != 1:
        raise ConfigError(f"horizon is unused by mechanism {mech!r} and must stay at 1")

    if mech == "continuous-proxy":
        if cfg.instrument is not None:
            raise ConfigError("continuous-proxy scenarios have no instrument")
        if th.x_tilde is None:
            raise ConfigError("continuous-proxy requires thresholds.x_tilde")
    else:
        if cfg.instrument is None:
            raise ConfigError(f"mechanism {mech!r} requires an instrument")
        if th.x_tilde is not None or th.x_bar is not None:
            raise ConfigError(f"thresholds are unused by mechanism {mech!r}")
        if cfg.instrument.kind == "ternary" and mech != "baseline-cutoff":
            raise ConfigError("a ternary instrument is only supported by baseline-cutoff")

    if th.x_bar is not None:
        if th.rho_low is None or th.rho_high is None:
            raise ConfigError("thresholds.x_bar requires rho_low and rho_high")
        if any(p.rho != 1.0 for p in profiles):
            raise ConfigError("profile rho must stay at 1 when rho is assigned by x_bar")
    elif th.rho_low is not None or th.rho_high is not None:
        raise ConfigError("rho_low/rho_high are only used together with x_bar")


def _mix(*components) -> TypeMix:
    return TypeMix(tuple((float(p), prof) for p, prof in components if p > 0))


def two_type_complier(beta_h: float, beta_l: float, c0: float, c1: float) -> str:
    """Which type complies in the two-type cutoff model with benefit = return.

    Returns ``"l"``, ``"h"`` or ``"both"`` (equal returns).
    """
    if not c1 < c0:
        raise ScenarioInconsistency(f"instrument must lower the cost: need c1 < c0, got c1={c1}, c0={c0}")
    if beta_h == beta_l:
        if c1 <= beta_l < c0:
            return "both"
    elif beta_h > beta_l:
        if c1 <= beta_l < c0 <= beta_h:
            return "l"
        if beta_l < c1 <= beta_h < c0:
            return "h"
    raise ScenarioInconsistency(
        f"costs (c1={c1}, c0={c0}) and returns (beta_l={beta_l}, beta_h={beta_h}) "
        "do not single out one complier type"
    )


def ajr_two_type(
    pi_h: float = 0.4,
    beta_h: float = 2.0,
    beta_l: float = 1.0,
    c0: float = 1.5,
    c1: float = 0.5,
    u_sd: float = 0.5,
    benefit_noise: float = 0.0,
    n: int = 200_000,
    reps: int = 200,
) -> ScenarioConfig:
    """Two country types, cutoff take-up of institutions, perfect persistence.

    With c1 < beta_l < c0 < beta_h the low-return type complies; the swapped
    chain beta_l < c1 < beta_h < c0 makes the high-return type comply instead.
    """
    two_type_complier(beta_h, beta_l, c0, c1)
    return ScenarioConfig(
        name="ajr",
        mechanism="baseline-cutoff",
        mix=_mix(
            (pi_h, LocationProfile(benefit=beta_h, return_beta=beta_h)),
            (1.0 - pi_h, LocationProfile(benefit=beta_l, return_beta=beta_l)),
        ),
        costs=CostSchedule(cost_z0=c0, cost_z1=c1),
        noise=NoiseModel(u_sd=u_sd),
        benefit_noise=benefit_noise,
        n=n,
        reps=reps,
        oracle="two-type",
    )


def ag_ternary(
    pi_h: float = 0.4,
    beta_h: float = 2.0,
    beta_l: float = 1.0,
    c: float = 1.5,
    b_h: float | None = None,
    b_l: float | None = None,
    u_sd: float = 0.5,
    n: int = 200_000,
    reps: int = 200,
) -> ScenarioConfig:
    """Three ordered distances and diversity levels; only the middle level is optimal.

    High-benefit populations converge to the optimal level anywhere; the rest
    reach it only at the optimal distance z = 1.
    """
    b_h = beta_h if b_h is None else b_h
    b_l = beta_l if b_l is None else b_l
    if not b_h > c:
        raise ScenarioInconsistency(f"need b_h > c, got b_h={b_h}, c={c}")
    return ScenarioConfig(
        name="ag",
        mechanism="baseline-cutoff",
        mix=_mix(
            (pi_h, LocationProfile(benefit=b_h, return_beta=beta_h)),
            (1.0 - pi_h, LocationProfile(benefit=b_l, return_beta=beta_l)),
        ),
        costs=CostSchedule(cost_z0=c, cost_z1=min(0.0, c - 1.0)),
        instrument=InstrumentRule(kind="ternary"),
        noise=NoiseModel(u_sd=u_sd),
        n=n,
        reps=reps,
        oracle="ternary-pairwise",
    )


def reversal_defiers(
    pi_c: float = 0.3,
    pi_d: float = 0.1,
    pi_a: float = 0.3,
    beta_c: float = 1.0,
    beta_d: float = 2.0,
    beta_a: float = 3.0,
    beta_n: float = 0.5,
    c0: float = 1.0,
    c1: float = 0.8,
    feedback: float = 1.0,
    horizon: int = 3,
    u_sd: float = 0.5,
    n: int = 200_000,
    reps: int = 200,
) -> ScenarioConfig:
    """Cutoff take-up over several periods plus a cost-lowering channel for z = 0.

    Four declared types: always-takers, compliers, never-takers, and
    susceptible locations (latent trait 1) whose costs fall only when they
    start untreated under z = 0. Those are the defiers. Never-takers take the
    residual mass.
    """
    pi_n = 1.0 - pi_c - pi_d - pi_a
    if min(pi_c, pi_d, pi_a) < 0 or pi_n < -1e-12:
        raise ScenarioInconsistency("type masses must be nonnegative and sum to at most 1")
    if not c1 < c0:
        raise ScenarioInconsistency("instrument must lower the cost: need c1 < c0")
    if feedback != 0 and not c0 - feedback < c1:
        raise ScenarioInconsistency("feedback must exceed c0 - c1 for susceptible locations to defy")
    b_a = c0 + 0.5
    b_c = 0.5 * (c0 + c1)
    b_d = 0.5 * ((c0 - feedback) + c1) if feedback != 0 else c1 - 0.25
    b_n = min(c1, b_d) - 0.5
    return ScenarioConfig(
        name="defiers",
        mechanism="reversal",
        mix=_mix(
            (pi_a, LocationProfile(benefit=b_a, return_beta=beta_a)),
            (pi_c, LocationProfile(benefit=b_c, return_beta=beta_c)),
            (pi_d, LocationProfile(benefit=b_d, return_beta=beta_d, latent_trait=1.0)),
            (max(pi_n, 0.0), LocationProfile(benefit=b_n, return_beta=beta_n)),
        ),
        costs=CostSchedule(cost_z0=c0, cost_z1=c1, reversal_feedback=feedback),
        noise=NoiseModel(u_sd=u_sd),
        horizon=horizon,
        n=n,
        reps=reps,
        oracle="defier",
    )


def markov_persistence(
    pi1: float = 0.5,
    beta1: float = 1.0,
    beta2: float = 2.0,
    p1: float = 0.8,
    p2: float = 0.8,
    q1: float = 0.6,
    q2: float = 0.9,
    share: float = 0.5,
    u_sd: float = 0.5,
    n: int = 200_000,
    reps: int = 200,
) -> ScenarioConfig:
    """Historical treatment equals the instrument; persistence differs by return type."""
    if pi1 * (p1 + q1 - 1) + (1 - pi1) * (p2 + q2 - 1) == 0:
        raise ScenarioInconsistency("p_i + q_i - 1 averages to zero: the instrument has no first stage")
    return ScenarioConfig(
        name="markov",
        mechanism="markov",
        mix=_mix(
            (pi1, LocationProfile(return_beta=beta1, persist_p=p1, persist_q=q1)),
            (1.0 - pi1, LocationProfile(return_beta=beta2, persist_p=p2, persist_q=q2)),
        ),
        instrument=InstrumentRule(share=share),
        noise=NoiseModel(u_sd=u_sd),
        n=n,
        reps=reps,
        oracle="markov",
    )


def vv_pogroms(
    atoms: tuple[float, ...] = (0.25, 0.75, 1.25, 1.75),
    weights: tuple[float, ...] | None = None,
    x_tilde: float = 0.5,
    x_bar: float | None = 1.0,
    rho_l: float = 0.2,
    rho_h: float = 0.8,
    homogeneous_rho: float | None = None,
    interval: tuple[float, float] | None = None,
    eps_sd: float = 0.1,
    n: int = 200_000,
    reps: int = 200,
) -> ScenarioConfig:
    """Proxy switches on above ``x_tilde``; no instrument, the estimand is the OLS slope.

    Persistence is ``rho_h`` above ``x_bar`` and ``rho_l`` below, unless
    ``homogeneous_rho`` is given. ``interval`` replaces the atoms with a
    uniform law on ``[lo, hi]``.
    """
    law = TraitLaw(kind="uniform", lo=interval[0], hi=interval[1]) if interval else TraitLaw.atoms(atoms, weights)
    if homogeneous_rho is not None:
        profile = LocationProfile(rho=homogeneous_rho, trait_law=law)
        th = Thresholds(x_tilde=x_tilde)
    else:
        if x_bar is None:
            raise ScenarioInconsistency("heterogeneous persistence needs x_bar")
        profile = LocationProfile(trait_law=law)
        th = Thresholds(x_tilde=x_tilde, x_bar=x_bar, rho_low=rho_l, rho_high=rho_h)
    return ScenarioConfig(
        name="vv",
        mechanism="continuous-proxy",
        mix=_mix((1.0, profile)),
        costs=None,
        instrument=None,
        noise=NoiseModel(eps_sd=eps_sd),
        thresholds=th,
        n=n,
        reps=reps,
        oracle="rho-reduced",
    )


def _instrumented_proxy(name, components, d0, d1, eps_sd, n, reps):
    return ScenarioConfig(
        name=name,
        mechanism="instrumented-proxy",
        mix=_mix(*components),
        costs=CostSchedule(cost_z0=d0, cost_z1=d1),
        noise=NoiseModel(eps_sd=eps_sd),
        n=n,
        reps=reps,
        oracle="complier-mean",
    )


def nw_trust(
    pi_h: float = 0.5,
    b_h: float = 1.0,
    b_l: float = 0.4,
    d0: float = 1.2,
    d1: float = 0.6,
    rho_h: float = 0.8,
    rho_l: float = 0.3,
    eps_sd: float = 0.1,
    n: int = 200_000,
    reps: int = 200,
) -> ScenarioConfig:
    """Trust is kept iff its benefit beats the gain from slave trade d(z).

    The proxy is 1 where trust survived the trade era. Distance from the
    coast (z = 1) lowers the trade gain, which flips only high-benefit groups.
    """
    if not b_l < d1 < b_h < d0:
        raise ScenarioInconsistency(f"need b_l < d1 < b_h < d0, got {b_l}, {d1}, {b_h}, {d0}")
    return _instrumented_proxy(
        "nw",
        [(pi_h, LocationProfile(benefit=b_h, rho=rho_h)), (1 - pi_h, LocationProfile(benefit=b_l, rho=rho_l))],
        d0,
        d1,
        eps_sd,
        n,
        reps,
    )


def gsz_civic(
    pi_h: float = 0.5,
    b_h: float = 1.0,
    b_l: float = 0.5,
    c0: float = 0.8,
    c1: float = 0.3,
    rho_h: float = 0.8,
    rho_l: float = 0.3,
    eps_sd: float = 0.1,
    n: int = 200_000,
    reps: int = 200,
) -> ScenarioConfig:
    """Self-government: high-return cities adopt anyway, low-return ones need a bishop."""
    if not c1 <= b_l < c0 <= b_h:
        raise ScenarioInconsistency(f"need c1 <= b_l < c0 <= b_h, got {c1}, {b_l}, {c0}, {b_h}")
    return _instrumented_proxy(
        "gsz",
        [(pi_h, LocationProfile(benefit=b_h, rho=rho_h)), (1 - pi_h, LocationProfile(benefit=b_l, rho=rho_l))],
        c0,
        c1,
        eps_sd,
        n,
        reps,
    )


def agn_plow(
    pi_a: float = 0.3,
    pi_c: float = 0.4,
    b_a: float = 1.0,
    b_c: float = 0.5,
    b_n: float = 0.1,
    c0: float = 0.8,
    c1: float = 0.3,
    rho_a: float = 0.9,
    rho_c: float = 0.4,
    rho_n: float = 0.6,
    eps_sd: float = 0.1,
    n: int = 200_000,
    reps: int = 200,
) -> ScenarioConfig:
    """Plow adoption: attitude-driven always-takers, suitability-induced compliers, and never-takers."""
    if not b_n < c1 <= b_c < c0 <= b_a:
        raise ScenarioInconsistency(f"need b_n < c1 <= b_c < c0 <= b_a, got {b_n}, {c1}, {b_c}, {c0}, {b_a}")
    return _instrumented_proxy(
        "agn",
        [
            (pi_a, LocationProfile(benefit=b_a, rho=rho_a)),
            (pi_c, LocationProfile(benefit=b_c, rho=rho_c)),
            (1 - pi_a - pi_c, LocationProfile(benefit=b_n, rho=rho_n)),
        ],
        c0,
        c1,
        eps_sd,
        n,
        reps,
    )


def schooling_appendix(
    pi_hi: float = 0.5,
    r_hi: float = 0.12,
    r_lo: float = 0.05,
    c0: float = 0.08,
    c1: float = 0.02,
    u_sd: float = 0.05,
    n: int = 200_000,
    reps: int = 200,
) -> ScenarioConfig:
    """Extra year of school: high-ability students take it anyway, low-ability only if born late."""
    two_type_complier(r_hi, r_lo, c0, c1)
    cfg = ajr_two_type(pi_h=pi_hi, beta_h=r_hi, beta_l=r_lo, c0=c0, c1=c1, u_sd=u_sd, n=n, reps=reps)
    return cfg.with_(name="schooling")


@dataclass(frozen=True)
class ScenarioEntry:
    name: str
    constructor: object
    mechanism: str
    identity: str


SCENARIOS: dict[str, ScenarioEntry] = {
    e.name: e
    for e in (
        ScenarioEntry("ajr", ajr_two_type, "baseline-cutoff", "two-type complier mean"),
        ScenarioEntry("ag", ag_ternary, "baseline-cutoff", "pairwise ternary Wald"),
        ScenarioEntry("defiers", reversal_defiers, "reversal", "complier/defier weighted mean"),
        ScenarioEntry("markov", markov_persistence, "markov", "heterogeneous-transition Wald ratio"),
        ScenarioEntry("vv", vv_pogroms, "continuous-proxy", "reduced-form persistence contrast"),
        ScenarioEntry("nw", nw_trust, "instrumented-proxy", "complier persistence mean"),
        ScenarioEntry("gsz", gsz_civic, "instrumented-proxy", "complier persistence mean"),
        ScenarioEntry("agn", agn_plow, "instrumented-proxy", "complier persistence mean"),
        ScenarioEntry("schooling", schooling_appendix, "baseline-cutoff", "two-type complier mean"),
    )
}


def constructor_params(name: str) -> tuple[str, ...]:
    return tuple(inspect.signature(SCENARIOS[name].constructor).parameters)


def build_scenario(name: str, **params) -> ScenarioConfig:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    known = constructor_params(name)
    unknown = [k for k in params if k not in known]
    if unknown:
        raise ConfigError(f"scenario {name!r} has no parameter(s) {', '.join(unknown)}")
    return SCENARIOS[name].constructor(**params)
