"""
Persistence seen through a binary proxy
=======================================

The historical level is only observed as a 0/1 proxy above a threshold. The
slope of today's level on that proxy mixes the persistence parameter with
the jump in historical levels across the threshold. When persistence itself
rises with the historical level, the slope mixes both.
"""

# %%
from persistlab import TraitLaw, build_scenario, monte_carlo, oracle_rho_reduced

hom = build_scenario("vv", atoms=(1.0, 2.0, 3.0), x_tilde=1.5, homogeneous_rho=0.5, n=50_000, reps=10)
het = build_scenario("vv", n=50_000, reps=10)
for label, cfg in (("homogeneous rho = 0.5", hom), ("rho 0.2 below / 0.8 above x_bar", het)):
    print(f"{label:34s} slope {monte_carlo(cfg, cfg.reps, seed=5).mc_mean:.4f}")

# %%
# The oracle handles atoms and uniform laws alike, including a threshold rule
# where x_tilde sits above x_bar.
atoms = TraitLaw.atoms((0.25, 0.75, 1.25, 1.75))
print("\nreversed thresholds:", oracle_rho_reduced(atoms, 1.0, x_bar=0.5, rho_low=0.2, rho_high=0.8))
print("uniform on [0, 2]:  ", oracle_rho_reduced(TraitLaw(lo=0.0, hi=2.0), 0.5, x_bar=1.0, rho_low=0.2, rho_high=0.8))
