"""End-to-end identification experiments and the counterexample search.

An experiment sweeps the total time ``T`` geometrically, evolves the coherent
initial state under the linear interpolation for every ``T`` and declares the
Fock label measured with probability above one half to be the ground state of
``HP``. The declared label is compared with the true ground label, read off
the exact diagonal of ``HP``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._workers import ordered_map
from .errors import ConfigError
from .evolution import MIN_STEPS, StateVector, coherent_state, evolve, measure_probabilities
from .fock import BoundaryCondition, FockSpace, Scheme
from .hamiltonian import CoherentParams, Schedule, build_HI, build_HP, problem_values
from .polynomial import DiophantinePolynomial, has_solution_under_cutoff, parse
from .spectral import ConditionScanReport, condition_scan, eigendecompose

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "TrialConfig",
    "SearchHit",
    "SearchReport",
    "counterexample_search",
    "run_trial",
    "identify",
    "TIE_BAND",
]

log = logging.getLogger(__name__)

#: Probabilities this close to 1/2 are neither above nor below the threshold.
TIE_BAND = 1e-9
DEGENERACY_RTOL = 1e-9

MATCH = "match"
MISMATCH = "mismatch"
NONE_IDENTIFIED = "none-identified"
SKIPPED_DEGENERATE = "skipped-degenerate"


def _complex_str(z: complex) -> str:
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{abs(z.imag)!r}i"


def parse_complex(text) -> complex:
    """Read ``a+bi`` style complex numbers (``1``, ``-0.5i``, ``1+0i``)."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise ConfigError(f"cannot read complex number {text!r}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one identification experiment.

    The T sweep is ``t_initial * t_ratio**k`` for ``k < t_count``. Each run
    takes ``max(100, ceil(steps_per_unit_time * T))`` steps.
    """

    polynomial: str
    alphas: tuple[complex, ...] = (1.0,)
    cutoff: int = 12
    boundary: str = "antiperiodic"
    wrap_coefficient: complex = 1.0
    t_initial: float = 1.0
    t_ratio: float = 2.0
    t_count: int = 8
    steps_per_unit_time: float = 100.0
    grid_points: int = 19
    seed: int = 0
    num_vars: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(parse_complex(a) for a in np.atleast_1d(self.alphas)))
        object.__setattr__(self, "wrap_coefficient", parse_complex(self.wrap_coefficient))
        object.__setattr__(self, "boundary", str(self.boundary).strip().lower())
        self.validate()

    def validate(self):
        try:
            Scheme(self.boundary)
        except ValueError:
            raise ConfigError(f"unknown boundary condition {self.boundary!r}") from None
        if self.cutoff < 0:
            raise ConfigError("cutoff must be non-negative")
        if self.t_initial <= 0 or self.t_count < 1:
            raise ConfigError("t_initial must be positive and t_count at least 1")
        if self.t_count > 1 and not self.t_ratio > 1:
            raise ConfigError("the T sweep must be strictly increasing (t_ratio > 1)")
        if self.steps_per_unit_time <= 0 or self.grid_points < 1:
            raise ConfigError("steps_per_unit_time and grid_points must be positive")
        try:
            poly = self.poly()
            self.params()
            space = self.space()
        except (ValueError, ArithmeticError) as exc:
            raise ConfigError(str(exc)) from exc
        if poly.num_vars != space.num_modes:
            raise ConfigError("polynomial variables and alphas disagree on K")

    def poly(self) -> DiophantinePolynomial:
        return parse(self.polynomial, self.num_vars or len(self.alphas))

    def params(self) -> CoherentParams:
        return CoherentParams(self.alphas)

    def bc(self) -> BoundaryCondition:
        scheme = Scheme(self.boundary)
        if scheme is Scheme.ABRUPT:
            return BoundaryCondition.abrupt()
        return BoundaryCondition(scheme, self.wrap_coefficient)

    def space(self) -> FockSpace:
        return FockSpace(len(self.alphas), self.cutoff, self.bc())

    def t_values(self) -> list[float]:
        return [self.t_initial * self.t_ratio**k for k in range(self.t_count)]

    def num_steps(self, T: float) -> int:
        return max(MIN_STEPS, math.ceil(self.steps_per_unit_time * T))

    def to_dict(self) -> dict:
        """Canonical plain-data form (complex numbers as ``a+bi`` strings)."""
        d = asdict(self)
        d["polynomial"] = str(self.poly())
        d["alphas"] = [_complex_str(a) for a in self.alphas]
        d["wrap_coefficient"] = _complex_str(self.wrap_coefficient)
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def identify(probabilities: np.ndarray) -> tuple[int | None, bool]:
    """Index with probability strictly above 1/2, and whether a tie blocked it.

    Returns ``(index, inconclusive)``. ``inconclusive`` is True when the top
    probability lies within ``TIE_BAND`` of one half.
    """
    k = int(np.argmax(probabilities))
    p = float(probabilities[k])
    if abs(p - 0.5) <= TIE_BAND:
        return None, True
    return (k if p > 0.5 else None), False


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    labels: list[tuple[int, ...]]
    t_values: list[float]
    num_steps: list[int]
    probabilities: list[np.ndarray]
    identified: list[tuple[int, ...] | None]
    inconclusive: list[bool]
    ground_label: tuple[int, ...]
    ground_energy: int
    ground_degenerate: bool
    verdict: str
    premise_ok: bool
    premise_violations: list[tuple[tuple[int, ...], float]]
    scan: dict
    min_gap: float
    solution: tuple[int, ...] | None
    identified_is_solution: bool | None
    tail_mass: float
    norm_drift: float = 0.0
    condition: ConditionScanReport | None = field(default=None, repr=False)

    @property
    def has_solution(self) -> bool:
        return self.solution is not None

    @property
    def solution_verdict(self) -> str:
        return "has solution" if self.has_solution else "no solution under cutoff"

    def probability_of(self, label, t_index: int = -1) -> float:
        return float(self.probabilities[t_index][self.labels.index(tuple(label))])

    def probability_rows(self):
        """``(T, label, probability)`` rows in sweep then basis order."""
        for T, probs in zip(self.t_values, self.probabilities):
            for label, p in zip(self.labels, probs):
                yield T, label, float(p)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "config_hash": self.config.config_hash(),
            "labels": [list(l) for l in self.labels],
            "t_values": self.t_values,
            "num_steps": self.num_steps,
            "probabilities": [[float(x) for x in p] for p in self.probabilities],
            "identified": [None if l is None else list(l) for l in self.identified],
            "inconclusive": self.inconclusive,
            "ground_label": list(self.ground_label),
            "ground_energy": self.ground_energy,
            "ground_degenerate": self.ground_degenerate,
            "verdict": self.verdict,
            "premise_ok": self.premise_ok,
            "premise_violations": [
                {"label": list(l), "probability": p} for l, p in self.premise_violations
            ],
            "condition_scan": self.scan,
            "min_gap": self.min_gap,
            "solution": None if self.solution is None else list(self.solution),
            "solution_verdict": self.solution_verdict,
            "identified_is_solution": self.identified_is_solution,
            "tail_mass": self.tail_mass,
            "norm_drift": self.norm_drift,
        }


def _ground_of(values: list[int], hp_norm: float) -> tuple[int, bool]:
    squares = np.array([float(v) ** 2 for v in values])
    k = int(np.argmin([v * v for v in values]))
    tol = DEGENERACY_RTOL * (1.0 + hp_norm)
    degenerate = int(np.sum(np.abs(squares - squares[k]) <= tol)) > 1
    return k, degenerate


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """Run the full identification pipeline for ``config``.

    Steps: check that no excited label of ``HP`` starts above one half, scan
    the matrix-element condition, evolve for every ``T`` in the sweep and
    compare the label found above one half with the exact ground label.

    A violated premise or a degenerate ground state is recorded on the report
    (and logged) rather than raised.
    """
    space = config.space()
    poly = config.poly()
    params = config.params()
    HI = build_HI(space, params)
    HP = build_HP(space, poly)
    labels = space.labels()
    values = problem_values(space, poly)
    ground, degenerate = _ground_of(values, HP.frobenius_norm())
    psi0 = coherent_state(space, params)

    p0 = measure_probabilities(psi0)
    excited = [k for k in range(space.dimension) if k != ground]
    violations = [(labels[k], float(p0[k])) for k in excited if p0[k] >= 0.5]
    if violations:
        log.warning("premise violated: excited labels start at >= 1/2: %s", violations)
    if degenerate:
        log.warning("HP ground state is degenerate; no verdict will be issued")

    scan = condition_scan(HI, HP, config.grid_points, workers)

    def cell(T):
        sched = Schedule(T, config.num_steps(T))
        traj = evolve(space, HI, HP, sched, psi0)
        return measure_probabilities(traj.final), traj.norm_drift

    cells = ordered_map(cell, config.t_values(), workers)
    probs = [c[0] for c in cells]
    identified, ties = [], []
    for p in probs:
        k, tie = identify(p)
        identified.append(None if k is None else labels[k])
        ties.append(tie)

    found = [l for l in identified if l is not None]
    if degenerate:
        verdict = SKIPPED_DEGENERATE
    elif any(l != labels[ground] for l in found):
        verdict = MISMATCH
    elif found:
        verdict = MATCH
    else:
        verdict = NONE_IDENTIFIED

    last = found[-1] if found else None
    is_solution = None if last is None else values[labels.index(last)] == 0

    return ExperimentReport(
        config=config,
        labels=labels,
        t_values=config.t_values(),
        num_steps=[config.num_steps(T) for T in config.t_values()],
        probabilities=probs,
        identified=identified,
        inconclusive=ties,
        ground_label=labels[ground],
        ground_energy=values[ground] ** 2,
        ground_degenerate=degenerate,
        verdict=verdict,
        premise_ok=not violations,
        premise_violations=violations,
        scan=scan.summary(),
        min_gap=scan.min_gap,
        solution=has_solution_under_cutoff(poly, config.cutoff),
        identified_is_solution=is_solution,
        tail_mass=psi0.tail_mass,
        norm_drift=max(c[1] for c in cells),
        condition=scan,
    )


# --- counterexample search ------------------------------------------------------

ALPHA_RADII = (0.3, 3.0)
COEFF_RANGE = (-5, 5)
SEARCH_DEGREE = 2
SEARCH_T_RANGE = (0.5, 20.0)
SEARCH_STEPS_PER_UNIT_TIME = 200.0
CONVERGENCE_TOL = 1e-3


@dataclass(frozen=True)
class TrialConfig:
    """A single-mode search trial, complete enough to replay bit for bit."""

    trial: int
    seed: int
    alpha: complex
    coefficients: tuple[int, ...]
    total_time: float
    num_steps: int
    cutoff: int
    boundary: str
    wrap_coefficient: complex = 1.0

    def poly(self) -> DiophantinePolynomial:
        terms = [(c, (p,)) for p, c in enumerate(self.coefficients)]
        return DiophantinePolynomial.from_terms(1, terms)

    def space(self) -> FockSpace:
        scheme = Scheme(self.boundary)
        bc = BoundaryCondition.abrupt() if scheme is Scheme.ABRUPT else BoundaryCondition(scheme, self.wrap_coefficient)
        return FockSpace(1, self.cutoff, bc)

    @classmethod
    def from_dict(cls, d: dict) -> "TrialConfig":
        """Inverse of :meth:`to_dict`, used to replay recorded hits."""
        return cls(
            trial=int(d["trial"]),
            seed=int(d["seed"]),
            alpha=parse_complex(d["alpha"]),
            coefficients=tuple(int(c) for c in d["coefficients"]),
            total_time=float(d["total_time"]),
            num_steps=int(d["num_steps"]),
            cutoff=int(d["cutoff"]),
            boundary=str(d["boundary"]),
            wrap_coefficient=parse_complex(d["wrap_coefficient"]),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha"] = _complex_str(self.alpha)
        d["wrap_coefficient"] = _complex_str(self.wrap_coefficient)
        d["coefficients"] = list(self.coefficients)
        d["polynomial"] = str(self.poly())
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class SearchHit:
    config: TrialConfig
    violating_label: int
    probability: float
    ground_label: int

    @property
    def trial(self) -> int:
        return self.config.trial


@dataclass
class SearchReport:
    trials: int
    seed: int
    dimension: int
    boundary: str
    evaluated: int
    skipped_degenerate: int
    skipped_premise: int
    hits: list[SearchHit]
    unconverged: list[TrialConfig]

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "dimension": self.dimension,
            "boundary": self.boundary,
            "evaluated": self.evaluated,
            "skipped_degenerate": self.skipped_degenerate,
            "skipped_premise": self.skipped_premise,
            "hits": [
                {
                    "config": h.config.to_dict(),
                    "config_hash": h.config.config_hash(),
                    "violating_label": h.violating_label,
                    "ground_label": h.ground_label,
                    "probability": h.probability,
                }
                for h in self.hits
            ],
            "unconverged": [c.to_dict() for c in self.unconverged],
        }


def draw_trial(
    trial: int,
    seed: int,
    dimension: int,
    boundary: str,
    wrap_coefficient: complex = 1.0,
    t_range: tuple[float, float] = SEARCH_T_RANGE,
    steps_per_unit_time: float = SEARCH_STEPS_PER_UNIT_TIME,
) -> TrialConfig:
    """Deterministic trial ``trial`` of the stream seeded by ``seed``.

    ``alpha`` is uniform over the annulus ``0.3 <= |alpha| <= 3``, the
    coefficients of a degree-2 polynomial are uniform integers in ``[-5, 5]``
    and ``T`` is log-uniform over ``t_range``.
    """
    rng = np.random.default_rng([seed, trial])
    r_lo, r_hi = ALPHA_RADII
    radius = math.sqrt(rng.uniform(r_lo**2, r_hi**2))
    angle = rng.uniform(0, 2 * math.pi)
    alpha = radius * complex(math.cos(angle), math.sin(angle))
    coeffs = tuple(int(c) for c in rng.integers(COEFF_RANGE[0], COEFF_RANGE[1] + 1, SEARCH_DEGREE + 1))
    T = float(math.exp(rng.uniform(math.log(t_range[0]), math.log(t_range[1]))))
    return TrialConfig(
        trial=trial,
        seed=seed,
        alpha=alpha,
        coefficients=coeffs,
        total_time=T,
        num_steps=max(MIN_STEPS, math.ceil(steps_per_unit_time * T)),
        cutoff=dimension - 1,
        boundary=boundary,
        wrap_coefficient=complex(wrap_coefficient),
    )


def run_trial(cfg: TrialConfig, num_steps: int | None = None) -> dict:
    """Evolve one trial from the ground state of the truncated ``HI``.

    Returns a dict with ``status`` (``ok``, ``degenerate`` or ``premise``),
    the final ``probabilities`` and the exact ``ground`` label index.
    """
    space = cfg.space()
    poly = cfg.poly()
    HI = build_HI(space, CoherentParams((cfg.alpha,)))
    HP = build_HP(space, poly)
    values = problem_values(space, poly)
    ground, degenerate = _ground_of(values, HP.frobenius_norm())
    if degenerate:
        return {"status": "degenerate", "ground": ground, "probabilities": None}
    system = eigendecompose(HI)
    if system.gap < DEGENERACY_RTOL * (1.0 + HI.frobenius_norm()):
        return {"status": "degenerate", "ground": ground, "probabilities": None}
    psi0 = StateVector(system.vector(0), space)
    p0 = measure_probabilities(psi0)
    if any(p0[k] >= 0.5 for k in range(space.dimension) if k != ground):
        return {"status": "premise", "ground": ground, "probabilities": p0}
    sched = Schedule(cfg.total_time, num_steps or cfg.num_steps)
    final = evolve(space, HI, HP, sched, psi0).final
    return {"status": "ok", "ground": ground, "probabilities": measure_probabilities(final)}


def counterexample_search(
    dimension: int = 5,
    trials: int = 1000,
    seed: int = 0,
    boundary: str = "abrupt",
    wrap_coefficient: complex = 1.0,
    workers: int | None = None,
    t_range: tuple[float, float] = SEARCH_T_RANGE,
) -> SearchReport:
    """Random search for runs whose final state puts more than 1/2 on an
    excited label of ``HP``.

    Trials that pass the premises are evolved once at the drawn step count; a
    candidate hit is re-run with twice the steps and kept only if the
    violating probability moves by less than ``1e-3`` and stays above one
    half. Candidates failing that check go to ``unconverged``.
    """
    Scheme(boundary)

    def one(trial):
        cfg = draw_trial(trial, seed, dimension, boundary, wrap_coefficient, t_range)
        out = run_trial(cfg)
        if out["status"] != "ok":
            return cfg, out, None
        p = out["probabilities"]
        k, _ = identify(p)
        if k is None or k == out["ground"]:
            return cfg, out, None
        check = run_trial(cfg, 2 * cfg.num_steps)["probabilities"]
        converged = abs(check[k] - p[k]) < CONVERGENCE_TOL and check[k] > 0.5 + TIE_BAND
        return cfg, out, (k, float(p[k]), converged)

    results = ordered_map(one, range(trials), workers)
    hits, unconverged = [], []
    counts = {"ok": 0, "degenerate": 0, "premise": 0}
    for cfg, out, hit in results:
        counts[out["status"]] += 1
        if hit is None:
            continue
        k, p, converged = hit
        if converged:
            hits.append(SearchHit(cfg, k, p, out["ground"]))
            level = logging.CRITICAL if boundary != "abrupt" else logging.WARNING
            log.log(level, "criterion violated in trial %d (%s): label %d at p=%r",
                    cfg.trial, boundary, k, p)
        else:
            unconverged.append(cfg)
    return SearchReport(
        trials=trials,
        seed=seed,
        dimension=dimension,
        boundary=boundary,
        evaluated=counts["ok"],
        skipped_degenerate=counts["degenerate"],
        skipped_premise=counts["premise"],
        hits=hits,
        unconverged=unconverged,
    )
