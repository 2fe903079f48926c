from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persistlab import (
    Compliance,
    ConstantRegressor,
    DegenerateInstrument,
    EmptyComplierSet,
    LocationProfile,
    Population,
    TraitLaw,
    TypeMix,
    WeakFirstStage,
    ate,
    build_scenario,
    first_stage,
    late_classified,
    monte_carlo,
    ols_slope,
    pairwise_wald,
    reduced_form,
    wald,
)
from persistlab.estimators import McSummary, run_replication

binary = st.lists(st.integers(0, 1), min_size=4, max_size=60)


@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_wald_is_reduced_form_over_first_stage(data):
    z = np.array(data.draw(binary))
    d = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(z), max_size=len(z))))
    y = np.array(data.draw(st.lists(st.floats(-1e3, 1e3), min_size=len(z), max_size=len(z))))
    if z.min() == z.max():
        with pytest.raises(DegenerateInstrument):
            wald(z, d, y)
        return
    fs = first_stage(z, d)
    if abs(fs) < 1e-10:
        with pytest.raises(WeakFirstStage):
            wald(z, d, y)
        return
    assert wald(z, d, y) == reduced_form(z, y) / fs


@settings(max_examples=100, deadline=None)
@given(shift=st.floats(-100, 100), seed=st.integers(0, 1000))
def test_wald_ignores_outcome_intercept(shift, seed):
    rng = np.random.default_rng(seed)
    z = np.tile([0, 1], 50)
    d = (rng.random(100) < 0.3 + 0.4 * z).astype(int)
    d[:2] = [0, 1]
    y = rng.normal(size=100) + 2 * d
    assert wald(z, d, y + shift) == pytest.approx(wald(z, d, y), rel=1e-9, abs=1e-9)


def test_binary_regressor_ols_equals_mean_difference():
    rng = np.random.default_rng(0)
    d = rng.integers(0, 2, 1000)
    y = rng.normal(size=1000) + 0.7 * d
    assert ols_slope(d, y) == pytest.approx(y[d == 1].mean() - y[d == 0].mean(), rel=1e-12)
    assert ols_slope(d, d.astype(float)) == pytest.approx(1.0, rel=1e-14)


def test_error_conditions():
    with pytest.raises(DegenerateInstrument):
        wald(np.ones(10), np.arange(10), np.arange(10))
    with pytest.raises(WeakFirstStage):
        wald(np.array([0, 1, 0, 1]), np.array([1, 1, 0, 0]), np.arange(4.0))
    with pytest.raises(ConstantRegressor):
        ols_slope(np.ones(5), np.arange(5.0))
    with pytest.raises(EmptyComplierSet):
        late_classified(np.full(3, Compliance.ALWAYS_TAKER), Population.from_profiles([LocationProfile()] * 3))


def test_first_stage_extremes():
    z = np.array([0, 0, 1, 1])
    assert first_stage(z, z) == 1.0
    assert first_stage(z, np.array([1, 1, 1, 1])) == 0.0


def test_homogeneous_effect_wald_is_exact():
    z = np.tile([0, 1], 500)
    rng = np.random.default_rng(4)
    d = (rng.random(1000) < 0.2 + 0.5 * z).astype(int)
    assert wald(z, d, 3.0 * d) == pytest.approx(3.0, rel=1e-13)
    zz = np.tile([0, 1, 2], 300)
    dd = (rng.random(900) < 0.2 + 0.3 * zz).astype(int)
    assert pairwise_wald(zz, dd, 3.0 * dd, (0, 1)) == pytest.approx(3.0, rel=1e-13)
    assert pairwise_wald(zz, dd, 3.0 * dd, (1, 2)) == pytest.approx(3.0, rel=1e-13)


def _atom_panel(values, reps_each, rho_of, x_tilde):
    x = np.repeat(np.asarray(values, dtype=float), reps_each)
    return (x > x_tilde).astype(int), np.array([rho_of(v) for v in x]) * x


def test_homogeneous_rho_slope_by_enumeration():
    d, y = _atom_panel([1, 2, 3], 1, lambda v: 0.5, 1.5)
    assert ols_slope(d, y) == pytest.approx(0.75, abs=1e-14)


def test_heterogeneous_rho_slope_by_enumeration():
    d, y = _atom_panel([0.25, 0.75, 1.25, 1.75], 1, lambda v: 0.8 if v > 1.0 else 0.2, 0.5)
    assert ols_slope(d, y) == pytest.approx(0.80, abs=1e-14)


def test_late_and_ate():
    pop = Population.from_profiles([LocationProfile(return_beta=b, rho=r) for b, r in ((1, 0.2), (2, 0.4), (4, 0.9))])
    labels = np.array([Compliance.COMPLIER, Compliance.NEVER_TAKER, Compliance.COMPLIER])
    assert late_classified(labels, pop) == 2.5
    assert late_classified(labels, pop, target="rho") == pytest.approx(0.55)
    assert ate(pop) == pytest.approx(7 / 3)
    assert late_classified(np.full(3, Compliance.COMPLIER), pop) == ate(pop)
    with pytest.raises(ValueError):
        ate(pop, target="gamma")


def test_summary_of_one_value_has_zero_sd():
    s = McSummary.from_values([1.5])
    assert (s.mean, s.sd, s.ci_lo, s.ci_hi) == (1.5, 0.0, 1.5, 1.5)


def test_summary_drops_nan():
    s = McSummary.from_values([1.0, math.nan, 3.0])
    assert s.count == 2 and s.mean == 2.0


def test_single_rep_report():
    r = monte_carlo(build_scenario("ajr", n=2000), reps=1, seed=0)
    assert r.mc_sd == 0.0 and r.n_reps == 1


def test_noiseless_homogeneous_reps_are_identical():
    # different benefits, one return: every rep's Wald is that return exactly
    base = build_scenario("ajr", n=3000, u_sd=0.0)
    mix = TypeMix(((0.4, LocationProfile(benefit=2.0, return_beta=1.5)), (0.6, LocationProfile(benefit=1.0, return_beta=1.5))))
    r = monte_carlo(base.with_(mix=mix, oracle=""), reps=5, seed=3)
    for rep in r.replications:
        assert rep.values["wald"] == pytest.approx(1.5, abs=1e-12)
    assert r.mc_sd == pytest.approx(0.0, abs=1e-12)


def test_noiseless_ajr_late_is_exact_but_wald_carries_sampling_error():
    r = monte_carlo(build_scenario("ajr", n=3000, u_sd=0.0), reps=5, seed=3)
    assert all(rep.values["late_classified"] == 1.0 for rep in r.replications)
    assert abs(r.mc_mean - 1.0) < 0.05


def test_void_replications_are_counted():
    cfg = build_scenario("ajr", n=5).with_(costs=build_scenario("ajr").costs.__class__(cost_z0=1.0, cost_z1=1.0))
    r = monte_carlo(cfg, reps=4, seed=0)
    assert r.n_void == 4
    assert all(rep.void_reason for rep in r.replications)


def test_thread_count_does_not_change_results():
    cfg = build_scenario("defiers", n=3000)
    a = monte_carlo(cfg, reps=12, seed=5, threads=1)
    b = monte_carlo(cfg, reps=12, seed=5, threads=8)
    assert [r.values for r in a.replications] == [r.values for r in b.replications]
    assert a.summaries == b.summaries


def test_replication_is_pure_function_of_index_and_seed():
    cfg = build_scenario("nw", n=2000)
    assert run_replication(cfg, 3, 11) == run_replication(cfg, 3, 11)


def test_mc_calibration_for_trait_law_population():
    # uniform trait law in the proxy mechanism: estimate and complier mean agree
    cfg = build_scenario("gsz", n=20_000)
    prof = cfg.mix.components[0][1]
    law = TraitLaw(lo=-1.0, hi=1.0)
    cfg = cfg.with_(mix=cfg.mix.__class__(((0.5, prof.__class__(benefit=prof.benefit, rho=prof.rho, trait_law=law)), cfg.mix.components[1])))
    r = monte_carlo(cfg, reps=10, seed=2)
    assert abs(r.mc_mean - 0.3) < 4 * r.mc_sd / math.sqrt(10) + 1e-9
