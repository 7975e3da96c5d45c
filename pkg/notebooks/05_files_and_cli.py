# %% [markdown]
# # Problem files and the command line
#
# Problems and gains are JSON. The `teamlmi` command solves, verifies, lifts
# and reports the ceiling; this script drives it through `main` so that it
# runs in-process.

# %%
import json
import tempfile
from pathlib import Path

from teamlmi.cli import main

tmp = Path(tempfile.mkdtemp())

# %%
main(["example", "witsenhausen-team", "--k2", "1", "--output", str(tmp / "wt.json")])
print((tmp / "wt.json").read_text()[:300])

# %%
main(["gamma-bar", str(tmp / "wt.json")])
main(["solve", str(tmp / "wt.json"), "--output", str(tmp / "report.json")])
report = json.loads((tmp / "report.json").read_text())
print(report["gamma_star"], report["gain"])

# %%
(tmp / "gain.json").write_text(json.dumps({"blocks": report["gain"]}))
main(["verify", str(tmp / "wt.json"), "--gain", str(tmp / "gain.json"), "--quiet"])

# %% [markdown]
# A value at the ceiling exits with status 2 and a report that says why.

# %%
print("exit status", main(["solve", "--example", "multistage", "--m", "3", "--quiet"]))
