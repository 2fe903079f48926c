"""
When the instrument pushes the other way
========================================

A later process lowers costs for untreated z = 0 locations that are
susceptible to it. Those locations end up treated only when z = 0: they are
defiers. Their weight in the Wald ratio is negative, so the estimate can
fall far from any group's effect.
"""

# %%
from persistlab import build_scenario, classify_compliance, monte_carlo, oracle_scenario, simulate_panel

for feedback in (0.0, 1.0):
    cfg = build_scenario("defiers", feedback=feedback, n=50_000, reps=20)
    pop, _ = simulate_panel(cfg, 3)
    counts, _ = classify_compliance(pop, cfg, 3)
    r = monte_carlo(cfg, cfg.reps, seed=3)
    o = oracle_scenario(cfg)
    print(
        f"feedback {feedback}: compliers {counts.shares()['compliers']:.3f}, defiers {counts.shares()['defiers']:.3f}, "
        f"Wald {r.wald:.3f} (oracle {o.wald_limit:.3f}), complier mean {r.late_classified:.3f}"
    )

# %%
# The oracle itself: complier effect 1, defier effect 2, masses 0.3 and 0.1.
from persistlab import oracle_defier

print("\nweighted mean with a negative weight:", oracle_defier(0.3, 0.1, 1.0, 2.0))
print("swap the masses:", oracle_defier(0.1, 0.3, 1.0, 2.0))
