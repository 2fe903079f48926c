"""Simulate historical take-up and persistence, then compare IV estimates with complier means.

The package builds synthetic populations of locations, runs a history
mechanism that decides treatment at t - h and at t, and estimates the effect
of the endogenous variable with the Wald estimator. Closed-form oracles give
the population limit of each scenario so estimates can be checked directly.
"""

from __future__ import annotations

from .errors import (
    ConfigError,
    ConstantRegressor,
    DegenerateInstrument,
    EmptyComplierSet,
    EmptyProxyCell,
    NoOracle,
    PersistLabError,
    ScenarioInconsistency,
    TernaryInstrument,
    WeakFirstStage,
)
from .estimators import (
    EstimateReport,
    McSummary,
    ate,
    first_stage,
    late_classified,
    monte_carlo,
    ols_slope,
    pairwise_wald,
    reduced_form,
    wald,
)
from .history import (
    Compliance,
    ComplianceCounts,
    CostSchedule,
    NoiseModel,
    ShockProcess,
    SimulatedPanel,
    classify_compliance,
    simulate_panel,
)
from .oracles import (
    OracleValues,
    oracle_ag_ternary,
    oracle_defier,
    oracle_markov,
    oracle_rho_reduced,
    oracle_scenario,
    oracle_two_type,
)
from .population import (
    InstrumentRule,
    LocationProfile,
    Population,
    TraitLaw,
    TypeMix,
    assign_instrument,
    sample_population,
)
from .scenarios import SCENARIOS, ScenarioConfig, Thresholds, build_scenario

__version__ = "0.1.0"

__all__ = [
    "SCENARIOS",
    "Compliance",
    "ComplianceCounts",
    "ConfigError",
    "ConstantRegressor",
    "CostSchedule",
    "DegenerateInstrument",
    "EmptyComplierSet",
    "EmptyProxyCell",
    "EstimateReport",
    "InstrumentRule",
    "LocationProfile",
    "McSummary",
    "NoOracle",
    "NoiseModel",
    "OracleValues",
    "PersistLabError",
    "Population",
    "ScenarioConfig",
    "ScenarioInconsistency",
    "ShockProcess",
    "SimulatedPanel",
    "TernaryInstrument",
    "Thresholds",
    "TraitLaw",
    "TypeMix",
    "WeakFirstStage",
    "assign_instrument",
    "ate",
    "build_scenario",
    "classify_compliance",
    "first_stage",
    "late_classified",
    "monte_carlo",
    "ols_slope",
    "oracle_ag_ternary",
    "oracle_defier",
    "oracle_markov",
    "oracle_rho_reduced",
    "oracle_scenario",
    "oracle_two_type",
    "pairwise_wald",
    "reduced_form",
    "sample_population",
    "simulate_panel",
    "wald",
]
