"""Numerical laboratory for the quantum adiabatic algorithm on Diophantine equations.

Typical use::

    from dioph_adiabatic import ExperimentConfig, run_experiment

    report = run_experiment(ExperimentConfig("x1 - 2", alphas=(1.0,), cutoff=12))
    report.verdict, report.identified[-1]
"""

__version__ = "0.1.0"

from .criterion import (
    ExperimentConfig,
    ExperimentReport,
    SearchReport,
    TrialConfig,
    counterexample_search,
    identify,
    run_experiment,
    run_trial,
)
from .errors import (
    AdiabaticError,
    ConfigError,
    NormDriftError,
    NumericalGuardError,
    PolynomialSyntaxError,
    PrecisionGuardError,
    TailMassError,
)
from .evolution import (
    StateVector,
    Trajectory,
    coherent_amplitudes,
    coherent_state,
    evolve,
    measure_probabilities,
)
from .fock import BoundaryCondition, FockSpace, Scheme, annihilation, creation, number_diag
from .hamiltonian import (
    CoherentParams,
    HermitianOperator,
    Schedule,
    build_HI,
    build_HP,
    commutator_norm,
    interpolate,
    problem_values,
)
from .polynomial import DiophantinePolynomial, evaluate, has_solution_under_cutoff, parse
from .spectral import (
    ConditionScanReport,
    EigenSystem,
    condition_scan,
    eigendecompose,
    partial_sum_probe,
    recurrence_residual,
)
