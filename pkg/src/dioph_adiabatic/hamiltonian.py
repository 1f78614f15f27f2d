"""Initial, problem and interpolated Hamiltonians on a truncated Fock space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockSpace, annihilation
from .polynomial import DiophantinePolynomial, evaluate, square_as_float

__all__ = [
    "HermitianOperator",
    "CoherentParams",
    "Schedule",
    "as_matrix",
    "build_HI",
    "build_HP",
    "problem_values",
    "interpolate",
    "commutator_norm",
    "ALPHA_MIN",
]

ALPHA_MIN = 1e-12
HERMITIAN_RTOL = 1e-12


def _hermitian_defect(m: np.ndarray) -> float:
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T))) / scale


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense Hermitian matrix, optionally tied to the Fock space it acts on.

    Construction fails if ``matrix`` deviates from its adjoint by more than
    ``1e-12`` relative to its largest entry.
    """

    matrix: np.ndarray
    space: FockSpace | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if self.space is not None and m.shape[0] != self.space.dimension:
            raise ValueError("matrix size does not match the Fock space dimension")
        defect = _hermitian_defect(m)
        if defect > HERMITIAN_RTOL:
            raise ValueError(f"matrix is not Hermitian (relative defect {defect:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def as_matrix(op) -> np.ndarray:
    """Underlying complex matrix of a :class:`HermitianOperator` or array."""
    if isinstance(op, HermitianOperator):
        return op.matrix
    return np.asarray(op, dtype=complex)


def _space_of(*ops) -> FockSpace | None:
    for op in ops:
        if isinstance(op, HermitianOperator) and op.space is not None:
            return op.space
    return None


@dataclass(frozen=True)
class CoherentParams:
    """Per-mode complex displacements of the initial Hamiltonian."""

    alphas: tuple[complex, ...]

    def __post_init__(self):
        alphas = tuple(complex(a) for a in np.atleast_1d(self.alphas))
        if not alphas:
            raise ValueError("need at least one alpha")
        for a in alphas:
            if abs(a) <= ALPHA_MIN:
                raise ValueError("every alpha must be non-zero")
        object.__setattr__(self, "alphas", alphas)

    @property
    def num_modes(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class Schedule:
    """Linear sweep ``s = t/T`` over ``num_steps`` equal steps (hbar = 1)."""

    total_time: float
    num_steps: int

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        if self.num_steps < 1:
            raise ValueError("num_steps must be positive")

    @property
    def dt(self) -> float:
        return self.total_time / self.num_steps

    def midpoints(self) -> np.ndarray:
        """``s`` at the centre of each step."""
        return (np.arange(self.num_steps) + 0.5) / self.num_steps


def build_HI(space: FockSpace, params: CoherentParams) -> HermitianOperator:
    """``sum_i (a_i^dag - alpha_i*)(a_i - alpha_i)`` with the space's ladders.

    Wrapped schemes keep the full product, so the vacuum diagonal picks up
    ``|c|^2`` instead of 0.
    """
    if params.num_modes != space.num_modes:
        raise ValueError(
            f"{params.num_modes} alphas given for {space.num_modes} modes"
        )
    dim = space.dimension
    h = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(dim)
    for mode, alpha in enumerate(params.alphas, start=1):
        shifted = annihilation(space, mode) - alpha * eye
        h += shifted.conj().T @ shifted
    # the product is Hermitian analytically; remove rounding asymmetry
    h = 0.5 * (h + h.conj().T)
    return HermitianOperator(h, space)


def problem_values(space: FockSpace, poly: DiophantinePolynomial) -> list[int]:
    """Exact ``D(n_1, ..., n_K)`` at every basis label, in basis order."""
    if poly.num_vars != space.num_modes:
        raise ValueError(
            f"polynomial has {poly.num_vars} variables but the space has {space.num_modes} modes"
        )
    return [evaluate(poly, label) for label in space.labels()]


def build_HP(space: FockSpace, poly: DiophantinePolynomial) -> HermitianOperator:
    """Diagonal operator with ``D(n)^2`` at each label.

    Raises:
        PrecisionGuardError: if some ``D(n)^2`` exceeds ``2**53``.
    """
    diag = [square_as_float(v) for v in problem_values(space, poly)]
    return HermitianOperator(np.diag(np.array(diag, dtype=complex)), space)


def interpolate(HI, HP, s: float) -> HermitianOperator:
    """``(1 - s) HI + s HP``."""
    a, b = as_matrix(HI), as_matrix(HP)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    if s == 0.0:
        m = a.copy()
    elif s == 1.0:
        m = b.copy()
    else:
        m = (1.0 - s) * a + s * b
    return HermitianOperator(m, _space_of(HI, HP))


def commutator_norm(HI, HP) -> float:
    """Frobenius norm of ``HI HP - HP HI``."""
    a, b = as_matrix(HI), as_matrix(HP)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a @ b - b @ a))

