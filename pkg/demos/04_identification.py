"""Sweep the total time T and watch the solution label take over."""

from dioph_adiabatic import ExperimentConfig, run_experiment

for poly in ("x1 - 2", "3*x1 - 1"):
    report = run_experiment(ExperimentConfig(poly, t_count=6))
    print(f"\nD = {poly}: ground {report.ground_label} at energy {report.ground_energy}")
    for T, steps, label in zip(report.t_values, report.num_steps, report.identified):
        p = report.probability_of(report.ground_label, list(report.t_values).index(T))
        print(f"  T={T:6g}  steps={steps:6d}  p(ground)={p:.4f}  identified={label}")
    print(f"  verdict: {report.verdict}; {report.solution_verdict}; min gap {report.min_gap:.3f}")
