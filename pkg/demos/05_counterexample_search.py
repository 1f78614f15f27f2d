"""Randomized search for runs that single out an excited label.

Each hit is reported with a replayable trial config. Hits under the wrapped
schemes are logged at CRITICAL level.
"""

import logging

from dioph_adiabatic import TrialConfig, counterexample_search, run_trial

logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")

for boundary in ("abrupt", "antiperiodic"):
    report = counterexample_search(dimension=5, trials=500, seed=1, boundary=boundary)
    print(f"\n{boundary}: {report.evaluated} evaluated, {len(report.hits)} hits, "
          f"{report.skipped_degenerate} degenerate, {report.skipped_premise} premise-skipped")
    for hit in report.hits:
        c = hit.config
        print(f"  trial {c.trial}: coeffs {c.coefficients} alpha {c.alpha:.3f} T {c.total_time:.2f}"
              f" -> label {hit.violating_label} p={hit.probability:.3f} (ground {hit.ground_label})")

    if report.hits:
        cfg = TrialConfig.from_dict(report.hits[0].config.to_dict())
        again = run_trial(cfg)
        print("  replay identical:", again["probabilities"][report.hits[0].violating_label] == report.hits[0].probability)
