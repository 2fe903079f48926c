from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persistlab import (
    Compliance,
    CostSchedule,
    InstrumentRule,
    LocationProfile,
    NoiseModel,
    Population,
    ScenarioConfig,
    ShockProcess,
    TernaryInstrument,
    TypeMix,
    build_scenario,
    classify_compliance,
    sample_population,
)
from persistlab.history import (
    continuous_ar_step,
    evolve_dynamic_takeup,
    evolve_markov_persistence,
    evolve_perfect_persistence,
    evolve_with_reversal_channel,
    outcome,
    proxy_from_threshold,
    simulate_panel,
    takeup_baseline,
)

COSTS = CostSchedule(cost_z0=1.5, cost_z1=0.5)


def _pop(n=1, **fields):
    return Population.from_profiles([LocationProfile(**fields)] * n)


@pytest.mark.parametrize("b, z, expected", [(1.0, 1, 1), (1.0, 0, 0), (0.5, 1, 1), (1.5, 0, 1), (0.4999, 1, 0)])
def test_cutoff_and_tie_rule(b, z, expected):
    assert takeup_baseline(_pop(benefit=b), COSTS, np.array([z]))[0] == expected


def test_perfect_persistence_is_identity():
    x = np.array([1, 0, 1, 1, 0])
    out = evolve_perfect_persistence(x)
    assert np.array_equal(out, x) and out is not x


def test_dynamic_without_shock_sensitivity_reduces_to_baseline():
    pop = sample_population(TypeMix(((0.5, LocationProfile(benefit=1.0)), (0.5, LocationProfile(benefit=2.0)))), 500, 1)
    z = np.arange(500) % 2
    x = evolve_dynamic_takeup(pop, COSTS, z, ShockProcess(), horizon=5, seed=3)
    assert np.array_equal(x, takeup_baseline(pop, COSTS, z))


def test_dynamic_benefit_below_every_cost_never_treats():
    costs = CostSchedule(cost_z0=1.5, cost_z1=0.5, shock_sensitivity=1.0)
    x = evolve_dynamic_takeup(_pop(1000, benefit=0.4), costs, np.ones(1000, int), ShockProcess(), 10, seed=2)
    assert x.sum() == 0


def test_dynamic_crossing_probability_matches_brute_force():
    # b = 1, c(1, s) = 0.5 + s, s ~ U[0, 1], 10 periods: treated iff some s <= 0.5
    n = 1_000_000
    costs = CostSchedule(cost_z0=5.0, cost_z1=0.5, shock_sensitivity=1.0)
    x = evolve_dynamic_takeup(_pop(n, benefit=1.0), costs, np.ones(n, int), ShockProcess(), 10, seed=17)
    # independent oracle: plain numpy paths, unrelated generator
    s = np.random.default_rng(123).random((n, 10))
    brute = np.mean(np.any(1.0 >= 0.5 + s, axis=1))
    exact = 1 - 0.5**10
    se = np.sqrt(exact * (1 - exact) / n)
    assert abs(brute - exact) < 4 * se
    assert abs(x.mean() - exact) < 4 * se


def test_dynamic_is_absorbing():
    costs = CostSchedule(cost_z0=1.0, cost_z1=0.8, shock_sensitivity=1.0)
    pop = _pop(20_000, benefit=1.2)
    z = np.zeros(20_000, int)
    shorter = evolve_dynamic_takeup(pop, costs, z, ShockProcess(), 3, seed=5)
    longer = evolve_dynamic_takeup(pop, costs, z, ShockProcess(), 6, seed=5)
    assert np.all(longer >= shorter)
    assert longer.mean() > shorter.mean()


def test_reversal_with_zero_feedback_equals_dynamic():
    costs = CostSchedule(cost_z0=1.0, cost_z1=0.8, shock_sensitivity=0.3)
    pop = sample_population(TypeMix(((1.0, LocationProfile(benefit=0.9, latent_trait=1.0)),)), 5000, 2)
    z = np.arange(5000) % 2
    a = evolve_with_reversal_channel(pop, costs, z, 4, seed=8)
    b = evolve_dynamic_takeup(pop, costs, z, ShockProcess(), 4, seed=8)
    assert np.array_equal(a, b)


def _panel_cfg(mechanism, mix, costs, **kw):
    return ScenarioConfig(name="t", mechanism=mechanism, mix=mix, costs=costs, n=kw.pop("n", 5000), **kw)


def test_all_defier_construction():
    # z = 1: cost 0.8 + 0.1 s > 0.6 always. z = 0: period 0 cost 1 + 0.1 s > 0.6,
    # later periods cost 0.4 + 0.1 s < 0.6, so every location enters only under z = 0.
    costs = CostSchedule(cost_z0=1.0, cost_z1=0.8, shock_sensitivity=0.1, reversal_feedback=0.6)
    mix = TypeMix(((1.0, LocationProfile(benefit=0.6, return_beta=1.0, latent_trait=1.0)),))
    cfg = _panel_cfg("reversal", mix, costs, horizon=3)
    pop, _ = simulate_panel(cfg, 4)
    counts, labels = classify_compliance(pop, cfg, 4)
    assert counts.defiers == cfg.n
    assert np.all(labels == Compliance.DEFIER)


def test_zero_feedback_means_no_defiers():
    cfg = build_scenario("defiers", feedback=0.0, n=20_000)
    pop, _ = simulate_panel(cfg, 1)
    counts, _ = classify_compliance(pop, cfg, 1)
    assert counts.defiers == 0


def test_declared_defier_mass_recovered():
    cfg = build_scenario("defiers", n=100_000)
    pop, _ = simulate_panel(cfg, 6)
    counts, _ = classify_compliance(pop, cfg, 6)
    shares = counts.shares()
    for key, mass in (("defiers", 0.1), ("compliers", 0.3), ("always_takers", 0.3), ("never_takers", 0.3)):
        assert abs(shares[key] - mass) < 3 * np.sqrt(mass * (1 - mass) / cfg.n)


@settings(max_examples=40, deadline=None)
@given(
    c1=st.floats(0.0, 2.0),
    gap=st.floats(0.0, 1.0),
    sens=st.floats(0.0, 1.0),
    horizon=st.integers(1, 4),
    benefits=st.lists(st.floats(-1.0, 3.5), min_size=1, max_size=4),
    seed=st.integers(0, 2**32),
)
def test_monotone_costs_never_create_defiers(c1, gap, sens, horizon, benefits, seed):
    costs = CostSchedule(cost_z0=c1 + gap, cost_z1=c1, shock_sensitivity=sens)
    w = 1.0 / len(benefits)
    comps = [(w, LocationProfile(benefit=b)) for b in benefits]
    comps[-1] = (1.0 - w * (len(benefits) - 1), comps[-1][1])
    cfg = _panel_cfg("dynamic", TypeMix(tuple(comps)), costs, horizon=horizon, n=500)
    pop, _ = simulate_panel(cfg, seed)
    counts, _ = classify_compliance(pop, cfg, seed)
    assert counts.defiers == 0
    assert counts.total == cfg.n


def test_equal_costs_make_instrument_irrelevant():
    cfg = build_scenario("ajr", n=2000).with_(costs=CostSchedule(cost_z0=1.2, cost_z1=1.2))
    pop, _ = simulate_panel(cfg, 0)
    counts, _ = classify_compliance(pop, cfg, 0)
    assert counts.compliers == counts.defiers == 0


def test_ajr_taxonomy():
    cfg = build_scenario("ajr", n=20_000)
    pop, _ = simulate_panel(cfg, 2)
    _, labels = classify_compliance(pop, cfg, 2)
    high = pop.return_beta == 2.0
    assert np.all(labels[high] == Compliance.ALWAYS_TAKER)
    assert np.all(labels[~high] == Compliance.COMPLIER)


def test_ternary_needs_a_pair():
    cfg = build_scenario("ag", n=1000)
    pop, _ = simulate_panel(cfg, 0)
    with pytest.raises(TernaryInstrument):
        classify_compliance(pop, cfg, 0)
    counts, _ = classify_compliance(pop, cfg, 0, pair=(0, 1))
    assert counts.total == 1000


@pytest.mark.parametrize("p, q, x_hist, expected", [(1.0, 1.0, 1, 1), (1.0, 1.0, 0, 0), (1.0, 0.0, 1, 0), (1.0, 0.0, 0, 0)])
def test_markov_degenerate_chains(p, q, x_hist, expected):
    x = evolve_markov_persistence(_pop(100, persist_p=p, persist_q=q), np.full(100, x_hist), seed=1)
    assert np.all(x == expected)


def test_markov_transition_frequency():
    x = evolve_markov_persistence(_pop(100_000, persist_p=0.8, persist_q=0.6), np.ones(100_000, int), seed=3)
    assert abs(x.mean() - 0.6) < 0.005
    x0 = evolve_markov_persistence(_pop(100_000, persist_p=0.8, persist_q=0.6), np.zeros(100_000, int), seed=3)
    assert abs(x0.mean() - 0.2) < 0.005


def test_markov_rejects_probabilities_outside_unit_interval():
    with pytest.raises(ValueError):
        LocationProfile(persist_q=1.2)


def test_ar_step():
    x = continuous_ar_step(_pop(1, rho=0.5), np.array([2.0]), NoiseModel(), seed=0)
    assert x[0] == 1.0
    noise = continuous_ar_step(_pop(100_000, rho=0.0), np.full(100_000, 3.0), NoiseModel(eps_sd=1.0), seed=0)
    assert abs(noise.mean()) < 3 / np.sqrt(100_000)
    mix = TypeMix(((0.5, LocationProfile(rho=0.2)), (0.5, LocationProfile(rho=0.8))))
    pop = sample_population(mix, 100_000, 1)
    mixed = continuous_ar_step(pop, np.ones(100_000), NoiseModel(eps_sd=0.1), seed=1)
    assert abs(mixed.mean() - 0.5) < 3 * np.sqrt((0.09 + 0.01) / 100_000)


def test_ar_step_rejects_non_finite_history():
    with pytest.raises(ValueError):
        continuous_ar_step(_pop(1), np.array([np.nan]), NoiseModel(), seed=0)


def test_proxy_threshold_is_strict():
    assert proxy_from_threshold(np.array([0.5]), 0.5)[0] == 0
    assert proxy_from_threshold(np.array([0.5 + 1e-12]), 0.5)[0] == 1
    assert not proxy_from_threshold(np.full(10, 0.2), 0.5).any()


def test_outcome_equation():
    noise = NoiseModel()
    assert outcome(_pop(return_beta=2.0), np.array([1]), noise, 0)[0] == 2.0
    assert outcome(_pop(return_beta=2.0), np.array([0]), NoiseModel(alpha=0.7), 0)[0] == 0.7
    mix = TypeMix(((0.6, LocationProfile(return_beta=1.0)), (0.4, LocationProfile(return_beta=2.0))))
    pop = sample_population(mix, 100_000, 3)
    assert abs(outcome(pop, np.ones(100_000), noise, 3).mean() - 1.4) < 0.01


def test_common_random_numbers_make_panels_reproducible():
    cfg = build_scenario("markov", n=5000)
    pop_a, a = simulate_panel(cfg, 21)
    pop_b, b = simulate_panel(cfg, 21)
    assert pop_a == pop_b
    for col in ("z", "x_hist", "x_now", "outcome"):
        assert np.array_equal(getattr(a, col), getattr(b, col))


def test_split_instrument_runs_through_panel():
    cfg = build_scenario("markov", n=1000).with_(instrument=InstrumentRule(kind="split"))
    _, panel = simulate_panel(cfg, 0)
    assert panel.z.sum() == 500
