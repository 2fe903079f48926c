"""
Config files, overrides and reports
===================================

Every scenario serializes to a TOML file with one dotted key per line. The
command-line runner reads it back, applies ``--set`` overrides, and writes a
CSV summary next to the echoed config.
"""

# %%
import tempfile
from pathlib import Path

from persistlab import build_scenario
from persistlab import config as cf
from persistlab.cli import run

cfg = build_scenario("markov", n=20_000, reps=8)
text = cf.dumps(cfg)
print(text[:300] + "...")
assert cf.loads(text) == cfg

# %%
# Run from the file with one override and show the summary CSV.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "markov.toml"
    path.write_text(text)
    code = run(["--config", str(path), "--set", "noise.u_sd=0.1", "--seed", "3", "--out", tmp])
    print("exit code", code)
    print((Path(tmp) / "summary.csv").read_text())
