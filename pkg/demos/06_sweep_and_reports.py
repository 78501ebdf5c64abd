"""
Sweeps and reports
==================

The same pipeline drives the ``calabi`` command.  Here a small sweep is
written as CSV and a single solve is round-tripped through JSON and verified.
"""

import tempfile
from pathlib import Path

from calabi.reports import ReportEnvelope, plot_data, rows_to_csv, solve_conical_envelope, sweep_row, verify_report
from calabi.shooting import solve_smooth

rows = []
for m in (0.5, 1.0):
    c_m = solve_smooth(m).C_star
    rows += [sweep_row(m, b, c_m, 1e-10) for b in (0.5, 1.0)]
print(rows_to_csv(rows))

# %%
env = solve_conical_envelope(1.0, 1.0, 1e-10, 513, {"command": "solve-conical"})
again = ReportEnvelope.from_json(env.to_json())
print("lossless:", again == env)
checks = verify_report(again)
print("all checks pass:", all(c["ok"] for c in checks.values()))

out = Path(tempfile.mkdtemp())
print([p.name for p in plot_data(again, out)])
