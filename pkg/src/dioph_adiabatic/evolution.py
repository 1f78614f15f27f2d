"""Coherent initial states and time evolution under the linear sweep.

The propagator is the exponential midpoint rule: each step applies
``exp(-i dt H(s_mid))`` built from an exact eigendecomposition of ``H`` at the
step centre, so every step is unitary to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc

from .errors import NormDriftError, TailMassError
from .fock import FockSpace
from .hamiltonian import CoherentParams, Schedule, as_matrix

__all__ = [
    "StateVector",
    "Trajectory",
    "coherent_amplitudes",
    "coherent_state",
    "evolve",
    "measure_probabilities",
    "MIN_STEPS",
]

NORM_TOL = 1e-9
NORM_ABORT = 1e-7
MAX_TAIL = 1e-6
MIN_STEPS = 100
_CHUNK_BYTES = 32 * 2**20


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over the Fock basis of ``space``."""

    amplitudes: np.ndarray
    space: FockSpace | None = None
    tail_mass: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if self.space is not None and amps.size != self.space.dimension:
            raise ValueError("amplitude count does not match the space dimension")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, space: FockSpace, label) -> "StateVector":
        return cls(space.basis_state(label), space)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other) -> complex:
        """``<self|other>``."""
        other = other.amplitudes if isinstance(other, StateVector) else np.asarray(other)
        return complex(np.vdot(self.amplitudes, other))


def coherent_amplitudes(space: FockSpace, params: CoherentParams) -> np.ndarray:
    """Untruncated-normalization coherent amplitudes restricted to ``space``.

    Entry at label ``n`` is ``prod_i exp(-|a_i|^2/2) a_i^n_i / sqrt(n_i!)``.
    """
    if params.num_modes != space.num_modes:
        raise ValueError(f"{params.num_modes} alphas given for {space.num_modes} modes")
    out = np.ones(1, dtype=complex)
    for alpha in params.alphas:
        mode = np.empty(space.levels, dtype=complex)
        mode[0] = np.exp(-abs(alpha) ** 2 / 2)
        for n in range(1, space.levels):
            mode[n] = mode[n - 1] * alpha / np.sqrt(n)
        out = np.kron(out, mode)
    return out


def _tail_mass(space: FockSpace, params: CoherentParams) -> float:
    # P(Poisson(|a|^2) > N) per mode, combined as 1 - prod(1 - tail_i)
    tails = [gammainc(space.cutoff + 1, abs(a) ** 2) for a in params.alphas]
    return float(-np.expm1(np.sum(np.log1p(-np.array(tails)))))


def coherent_state(
    space: FockSpace, params: CoherentParams, max_tail: float | None = MAX_TAIL
) -> StateVector:
    """Truncated coherent state ``|alpha_1> x ... x |alpha_K>``, renormalized.

    The weight lost to the cutoff is reported as ``tail_mass``.

    Raises:
        TailMassError: if ``tail_mass`` exceeds ``max_tail`` (pass None to
            accept any truncation).
    """
    tail = _tail_mass(space, params)
    if max_tail is not None and tail > max_tail:
        raise TailMassError(
            f"cutoff {space.cutoff} discards {tail:.3g} of the coherent state; "
            f"raise the cutoff or lower |alpha|"
        )
    amps = coherent_amplitudes(space, params)
    return StateVector(amps / np.linalg.norm(amps), space, tail)


def measure_probabilities(state) -> np.ndarray:
    """Born probabilities ``|amplitude|^2`` per basis label."""
    amps = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    p = np.abs(amps) ** 2
    if abs(p.sum() - 1.0) > NORM_TOL:
        raise ValueError(f"probabilities sum to {p.sum()!r}, state is not normalized")
    return p


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States recorded at the requested sweep fractions ``s``."""

    schedule: Schedule
    samples: list[tuple[float, StateVector]] = field(default_factory=list)
    norm_drift: float = 0.0

    @property
    def final(self) -> StateVector:
        return self.samples[-1][1]

    def at(self, s: float) -> StateVector:
        for s_k, state in self.samples:
            if np.isclose(s_k, s, rtol=0, atol=0.5 / self.schedule.num_steps):
                return state
        raise KeyError(f"no sample recorded at s={s}")


def _sample_steps(sample_s, num_steps: int) -> dict[int, float]:
    wanted = {0: 0.0, num_steps: 1.0}
    for s in sample_s or ():
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"sample point {s} outside [0, 1]")
        m = int(round(s * num_steps))
        wanted[m] = m / num_steps
    return wanted


def evolve(
    space: FockSpace | None,
    HI,
    HP,
    schedule: Schedule,
    psi0: StateVector,
    sample_s=None,
) -> Trajectory:
    """Integrate ``i d/dt psi = H(t/T) psi`` from ``psi0`` over ``[0, T]``.

    Args:
        space: Fock space attached to returned states (may be None).
        HI, HP: end-point Hamiltonians.
        schedule: total time and step count (at least ``MIN_STEPS``).
        psi0: initial state.
        sample_s: extra sweep fractions to record; each is rounded to the
            nearest step boundary. ``s=0`` and ``s=1`` are always recorded.

    Raises:
        NormDriftError: if the final norm drifts by more than 1e-7.
    """
    if schedule.num_steps < MIN_STEPS:
        raise ValueError(f"num_steps must be at least {MIN_STEPS}")
    a, b = as_matrix(HI), as_matrix(HP)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if psi0.amplitudes.size != a.shape[0]:
        raise ValueError("initial state does not match the Hamiltonian dimension")
    diff = b - a
    n = a.shape[0]
    dt = schedule.dt
    mids = schedule.midpoints()
    wanted = _sample_steps(sample_s, schedule.num_steps)

    samples = [(0.0, psi0)]
    psi = psi0.amplitudes.copy()
    chunk = max(1, _CHUNK_BYTES // (16 * n * n * 3))
    for start in range(0, schedule.num_steps, chunk):
        s_block = mids[start : start + chunk]
        H = a[None, :, :] + s_block[:, None, None] * diff[None, :, :]
        E, V = np.linalg.eigh(H)
        U = (V * np.exp(-1j * dt * E)[:, None, :]) @ np.conj(np.swapaxes(V, 1, 2))
        for offset in range(len(s_block)):
            psi = U[offset] @ psi
            m = start + offset + 1
            if m in wanted and m > 0:
                _check_drift(psi)
                samples.append((wanted[m], _wrap(psi, space)))
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    return Trajectory(schedule, samples, drift)


def _check_drift(psi: np.ndarray):
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    if drift > NORM_ABORT:
        raise NormDriftError(f"norm drifted by {drift:.3g}; use more steps")


def _wrap(psi: np.ndarray, space: FockSpace | None) -> StateVector:
    return StateVector(psi.copy(), space)
