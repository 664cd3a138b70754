"""A small spacing benchmark, end to end.

Runs the full localization pipeline for two source spacings and two
schemes over a handful of seeded trials, writes the CSV report, then
reads it back and prints the table.  The trial count and reverberation
here are scaled down to finish in well under a minute; see the README
for the full-size configuration.
"""

import pathlib

from sphdoa.pipeline import TrialConfig, run_benchmark
from sphdoa.reports import emit_report, load_report, report_rows

cfg = TrialConfig(
    t60=0.3,
    snr_db=20.0,
    n_sources=2,
    duration=1.5,
    max_delay=0.07,
    seed=11,
)
report = run_benchmark(cfg, spacings=[20.0, 60.0], trials=3, schemes=["ec", "ec3"])

here = pathlib.Path(__file__).parent
emit_report(report, here / "bench_demo.csv")
emit_report(report, here / "bench_demo.json")
print(f"wrote bench_demo.csv and bench_demo.json to {here}\n")

# JSON reports round-trip; the table below comes from the file on disk
again = load_report(here / "bench_demo.json")
print(f"{'scheme':>8} {'spacing':>8} {'median err':>11} {'trials':>7}")
for row in report_rows(again):
    print(f"{row[0]:>8} {row[1]:>8} {row[2]:>11} {row[3]:>7}")
