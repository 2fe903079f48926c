"""Closed-form population values of the IV, LATE and ATE identities.

Nothing here simulates. Each function works from declared parameters only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import EmptyComplierSet, EmptyProxyCell, NoOracle, ScenarioInconsistency, WeakFirstStage
from .population import TraitLaw
from .scenarios import ScenarioConfig, two_type_complier


@dataclass(frozen=True)
class OracleValues:
    wald_limit: float
    late: float
    ate: float
    first_stage_limit: float
    notes: str
    extra: dict[str, float] = field(default_factory=dict)


def oracle_two_type(pi_h: float, beta_h: float, beta_l: float, c0: float, c1: float) -> OracleValues:
    """Two types with benefit equal to return and cutoff take-up.

    Evaluates the first stage and reduced form cell by cell, so the usual
    chain (low type complies) returns beta_l, the swapped chain beta_h.
    """
    who = two_type_complier(beta_h, beta_l, c0, c1)
    pi_l = 1.0 - pi_h

    def treated(b, c):
        return 1.0 if b >= c else 0.0

    ey1 = beta_h * pi_h * treated(beta_h, c1) + beta_l * pi_l * treated(beta_l, c1)
    ey0 = beta_h * pi_h * treated(beta_h, c0) + beta_l * pi_l * treated(beta_l, c0)
    fs = pi_h * (treated(beta_h, c1) - treated(beta_h, c0)) + pi_l * (treated(beta_l, c1) - treated(beta_l, c0))
    wald = (ey1 - ey0) / fs
    late = {"l": beta_l, "h": beta_h, "both": beta_l}[who]
    return OracleValues(
        wald_limit=wald,
        late=late,
        ate=pi_h * beta_h + pi_l * beta_l,
        first_stage_limit=fs,
        notes=f"two-type complier mean ({who} complies)",
    )


def oracle_ag_ternary(pi_h: float, beta_h: float, beta_l: float) -> OracleValues:
    """Pairwise Wald limits when only the middle instrument level puts everyone at the peak.

    High types sit at the peak at every distance; low types sit at level z,
    so the outcome is beta_l for them only at z = 1.
    """
    pi_l = 1.0 - pi_h
    ey = {0: pi_h * beta_h, 1: pi_l * beta_l + pi_h * beta_h, 2: pi_h * beta_h}
    ex = {0: pi_h, 1: 1.0, 2: pi_h + 2 * pi_l}
    w01 = (ey[1] - ey[0]) / (ex[1] - ex[0])
    w12 = (ey[2] - ey[1]) / (ex[2] - ex[1])
    return OracleValues(
        wald_limit=w01,
        late=beta_l,
        ate=pi_h * beta_h + pi_l * beta_l,
        first_stage_limit=ex[1] - ex[0],
        notes="pairwise ternary Wald",
        extra={"wald_12": w12, "first_stage_12": ex[2] - ex[1]},
    )


def oracle_defier(pi_c: float, pi_d: float, mean_beta_c: float, mean_beta_d: float) -> float:
    """Wald limit with both compliers and defiers; the defier weight is negative."""
    if pi_c == pi_d:
        raise WeakFirstStage("complier and defier shares are equal: void first stage")
    if not (0 <= pi_c < 1 and 0 <= pi_d < 1):
        raise ValueError("shares must lie in [0, 1)")
    denom = pi_c - pi_d
    return mean_beta_c * pi_c / denom + mean_beta_d * (-pi_d) / denom


def oracle_markov(pi, beta, p, q, x_hist_law: str = "instrument") -> OracleValues:
    """Wald limit when x_hist = z and persistence probabilities differ by type.

    ``late`` is the complier mean under the common-random-number coupling,
    where a type's complier mass is max(p + q - 1, 0).
    """
    if x_hist_law != "instrument":
        raise NoOracle(f"x_hist law {x_hist_law!r} not supported; historical treatment must equal z")
    pi, beta, p, q = (list(map(float, v)) for v in (pi, beta, p, q))
    if not len(pi) == len(beta) == len(p) == len(q):
        raise ValueError("pi, beta, p, q must have equal length")
    if abs(math.fsum(pi) - 1.0) > 1e-12:
        raise ValueError("type shares must sum to 1")
    if any(not 0 <= v <= 1 for v in (*p, *q)):
        raise ValueError("p and q must lie in [0, 1]")
    gap = [pk + qk - 1.0 for pk, qk in zip(p, q)]
    denom = math.fsum(w * g for w, g in zip(pi, gap))
    if denom == 0:
        raise WeakFirstStage("sum of pi_i (p_i + q_i - 1) is zero")
    num = math.fsum(w * b * g for w, b, g in zip(pi, beta, gap))
    cmass = [w * max(g, 0.0) for w, g in zip(pi, gap)]
    late = math.fsum(m * b for m, b in zip(cmass, beta)) / math.fsum(cmass) if any(cmass) else math.nan
    return OracleValues(
        wald_limit=num / denom,
        late=late,
        ate=math.fsum(w * b for w, b in zip(pi, beta)),
        first_stage_limit=denom,
        notes="heterogeneous-transition Wald ratio",
    )


def _pieces(trait_law):
    """Normalize a law or a mixture [(weight, law), ...] to (weight, law) pairs."""
    if isinstance(trait_law, TraitLaw):
        return [(1.0, trait_law)]
    return [(float(w), law) for w, law in trait_law]


def _moments(pieces, lo, hi):
    """Mass and first moment E[x; x in (lo, hi]]."""
    mass = first = 0.0
    for w, law in pieces:
        if law.kind == "atoms":
            for v, a in zip(law.values, law.weights):
                inside = lo < v <= hi
                if inside:
                    mass += w * a
                    first += w * a * v
        else:
            if law.hi == law.lo:
                v = law.lo
                inside = lo < v <= hi
                if inside:
                    mass += w
                    first += w * v
                continue
            a, b = max(lo, law.lo), min(hi, law.hi)
            if b > a:
                dens = w / (law.hi - law.lo)
                mass += dens * (b - a)
                first += dens * (b * b - a * a) / 2.0
    return mass, first


def oracle_rho_reduced(
    trait_law,
    x_tilde: float,
    rho: float | None = None,
    x_bar: float | None = None,
    rho_low: float | None = None,
    rho_high: float | None = None,
) -> float:
    """E(rho x | x > x_tilde) - E(rho x | x <= x_tilde) with exact integration.

    Pass ``rho`` for homogeneous persistence, or ``x_bar`` with ``rho_low`` and
    ``rho_high`` for the rule rho = rho_high above x_bar, rho_low otherwise.
    ``trait_law`` is a :class:`TraitLaw` or a mixture of them; uniform
    pieces keep every conditional expectation in closed form.
    """
    pieces = _pieces(trait_law)
    inf = math.inf
    if rho is not None:
        regions = [(-inf, inf, rho)]
    else:
        if x_bar is None or rho_low is None or rho_high is None:
            raise ValueError("give rho, or x_bar with rho_low and rho_high")
        regions = [(-inf, x_bar, rho_low), (x_bar, inf, rho_high)]

    def cell(lo, hi):
        # proxy cell (lo, hi] intersected with each rho region (r_lo, r_hi]
        mass = weighted = 0.0
        for r_lo, r_hi, r in regions:
            a, b = max(lo, r_lo), min(hi, r_hi)
            if a < b:
                m, f = _moments(pieces, a, b)
                mass += m
                weighted += r * f
        return mass, weighted

    m1, w1 = cell(x_tilde, inf)
    m0, w0 = cell(-inf, x_tilde)
    if m1 <= 0 or m0 <= 0:
        raise EmptyProxyCell("one proxy cell has zero mass")
    return w1 / m1 - w0 / m0


def oracle_complier_mean(cfg: ScenarioConfig, target: str = "beta") -> OracleValues:
    """Complier mean of the effect under deterministic cutoff take-up over the declared types."""
    costs = cfg.costs
    if costs is None or costs.shock_sensitivity != 0 or costs.reversal_feedback != 0 or cfg.benefit_noise != 0:
        raise NoOracle("complier mean needs deterministic cutoff take-up")
    c0m = c1m = 0.0
    c0w = c1w = 0.0
    fs = 0.0
    ate = 0.0
    for w, prof in cfg.mix.components:
        eff = prof.return_beta if target == "beta" else prof.rho
        t1 = prof.benefit >= costs.cost_z1
        t0 = prof.benefit >= costs.cost_z0
        fs += w * (t1 - t0)
        ate += w * eff
        if t1 and not t0:
            c1m += w
            c1w += w * eff
        if t0 and not t1:
            c0m += w
            c0w += w * eff
    if c0m > 0:
        raise ScenarioInconsistency("declared types include defiers; use the defier oracle")
    if c1m == 0:
        raise EmptyComplierSet("no declared type complies")
    late = c1w / c1m
    return OracleValues(wald_limit=late, late=late, ate=ate, first_stage_limit=fs, notes="complier mean")


def _defier_cells(cfg: ScenarioConfig):
    """Deterministic compliance of each declared type in the reversal mechanism."""
    costs = cfg.costs
    if costs.shock_sensitivity != 0 or cfg.benefit_noise != 0:
        raise NoOracle("defier oracle needs deterministic costs")
    pc = pd = bc = bd = 0.0
    ate = 0.0
    for w, prof in cfg.mix.components:
        if prof.trait_law is not None:
            raise NoOracle("defier oracle needs point latent traits")
        b = prof.benefit
        d1 = b >= costs.cost_z1
        d0_hist = b >= costs.cost_z0
        d0 = d0_hist or (cfg.horizon > 1 and b >= costs.cost_z0 - costs.reversal_feedback * prof.latent_trait)
        ate += w * prof.return_beta
        if d1 and not d0:
            pc += w
            bc += w * prof.return_beta
        elif d0 and not d1:
            pd += w
            bd += w * prof.return_beta
    return pc, pd, (bc / pc if pc else 0.0), (bd / pd if pd else 0.0), ate


def oracle_scenario(cfg: ScenarioConfig) -> OracleValues:
    """Dispatch to the closed form bound to the scenario."""
    kind = cfg.oracle
    comps = cfg.mix.components
    if kind == "two-type":
        if len(comps) != 2 or cfg.benefit_noise != 0:
            raise NoOracle("two-type oracle needs exactly two types and exact benefits")
        (pi_h, h), (_, l) = comps if comps[0][1].return_beta >= comps[1][1].return_beta else comps[::-1]
        return oracle_two_type(pi_h, h.return_beta, l.return_beta, cfg.costs.cost_z0, cfg.costs.cost_z1)
    if kind == "ternary-pairwise":
        (pi_h, h), (_, l) = comps
        return oracle_ag_ternary(pi_h, h.return_beta, l.return_beta)
    if kind == "defier":
        pc, pd, bc, bd, ate = _defier_cells(cfg)
        w = oracle_defier(pc, pd, bc, bd)
        return OracleValues(
            wald_limit=w,
            late=bc if pc else math.nan,
            ate=ate,
            first_stage_limit=pc - pd,
            notes="complier/defier weighted mean",
            extra={"pi_c": pc, "pi_d": pd, "mean_beta_c": bc, "mean_beta_d": bd},
        )
    if kind == "markov":
        pi = [w for w, _ in comps]
        profs = [p for _, p in comps]
        return oracle_markov(
            pi, [p.return_beta for p in profs], [p.persist_p for p in profs], [p.persist_q for p in profs]
        )
    if kind == "rho-reduced":
        th = cfg.thresholds
        pieces = [(w, p.trait_law or TraitLaw(kind="uniform", lo=p.latent_trait, hi=p.latent_trait)) for w, p in comps]
        if th.x_bar is not None:
            value = oracle_rho_reduced(pieces, th.x_tilde, x_bar=th.x_bar, rho_low=th.rho_low, rho_high=th.rho_high)
        else:
            rhos = {p.rho for _, p in comps}
            if len(rhos) != 1:
                raise NoOracle("rho-reduced oracle needs homogeneous rho or an x_bar rule")
            value = oracle_rho_reduced(pieces, th.x_tilde, rho=rhos.pop())
        return OracleValues(
            wald_limit=value,
            late=math.nan,
            ate=_mean_rho(pieces, th, comps),
            first_stage_limit=math.nan,
            notes="reduced-form persistence contrast",
        )
    if kind == "complier-mean":
        target = "rho" if cfg.mechanism == "instrumented-proxy" else "beta"
        return oracle_complier_mean(cfg, target)
    raise NoOracle(f"scenario {cfg.name!r} carries no oracle binding")


def _mean_rho(pieces, th, comps) -> float:
    if th.x_bar is None:
        return math.fsum(w * p.rho for w, p in comps)
    above, _ = _moments(pieces, th.x_bar, math.inf)
    return th.rho_high * above + th.rho_low * (1.0 - above)
