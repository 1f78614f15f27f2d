"""Truncated Fock spaces and bosonic ladder operators.

Each mode keeps occupations ``0..cutoff``. Three rules decide what happens at
the truncation edge:

* ``ABRUPT``: ``a|0> = 0`` and ``a^dag|N> = 0``.
* ``PERIODIC``: ``a|0> = +c* |N>`` and ``a^dag|N> = +c |0>``.
* ``ANTIPERIODIC``: the same wrap with a minus sign.

Basis labels are occupation tuples ordered row-major with mode 1 slowest,
matching ``numpy.ndindex``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Scheme",
    "BoundaryCondition",
    "FockSpace",
    "annihilation",
    "creation",
    "number_diag",
    "MAX_DIMENSION",
]

#: Dense matrices beyond this dimension are refused.
MAX_DIMENSION = 20_000


class Scheme(enum.Enum):
    ABRUPT = "abrupt"
    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"

    @property
    def sign(self) -> int:
        return {Scheme.ABRUPT: 0, Scheme.PERIODIC: 1, Scheme.ANTIPERIODIC: -1}[self]


@dataclass(frozen=True)
class BoundaryCondition:
    """Edge rule for the ladder operators.

    ``wrap_coefficient`` is the complex ``c`` of the wrapped schemes and must be
    None for ``ABRUPT``.
    """

    scheme: Scheme = Scheme.ABRUPT
    wrap_coefficient: complex | None = None

    def __post_init__(self):
        scheme = Scheme(self.scheme)
        object.__setattr__(self, "scheme", scheme)
        if scheme is Scheme.ABRUPT:
            if self.wrap_coefficient is not None:
                raise ValueError("abrupt truncation takes no wrap coefficient")
        else:
            c = 1.0 if self.wrap_coefficient is None else self.wrap_coefficient
            c = complex(c)
            if abs(c) == 0:
                raise ValueError("wrapped boundary conditions need a non-zero coefficient")
            object.__setattr__(self, "wrap_coefficient", c)

    @classmethod
    def abrupt(cls) -> "BoundaryCondition":
        return cls(Scheme.ABRUPT)

    @classmethod
    def periodic(cls, c: complex = 1.0) -> "BoundaryCondition":
        return cls(Scheme.PERIODIC, c)

    @classmethod
    def antiperiodic(cls, c: complex = 1.0) -> "BoundaryCondition":
        return cls(Scheme.ANTIPERIODIC, c)

    @property
    def is_wrapped(self) -> bool:
        return self.scheme is not Scheme.ABRUPT

    @property
    def signed_coefficient(self) -> complex:
        """``+c``, ``-c`` or 0: the amplitude of ``a^dag|N>`` on ``|0>``."""
        if not self.is_wrapped:
            return 0j
        return self.scheme.sign * self.wrap_coefficient


@dataclass(frozen=True)
class FockSpace:
    """``num_modes`` bosonic modes, each truncated at occupation ``cutoff``."""

    num_modes: int
    cutoff: int
    bc: BoundaryCondition = BoundaryCondition()

    def __post_init__(self):
        if self.num_modes < 1:
            raise ValueError("need at least one mode")
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        if self.dimension > MAX_DIMENSION:
            raise ValueError(
                f"dimension {self.dimension} exceeds the dense limit {MAX_DIMENSION}"
            )

    @property
    def levels(self) -> int:
        return self.cutoff + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.levels,) * self.num_modes

    @property
    def dimension(self) -> int:
        return self.levels**self.num_modes

    def labels(self) -> list[tuple[int, ...]]:
        return list(np.ndindex(*self.shape))

    def index(self, label) -> int:
        if len(label) != self.num_modes:
            raise ValueError(f"label {label} has wrong length for {self.num_modes} modes")
        return int(np.ravel_multi_index(tuple(label), self.shape))

    def label(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.shape))

    def basis_state(self, label) -> np.ndarray:
        v = np.zeros(self.dimension, dtype=complex)
        v[self.index(label)] = 1.0
        return v

    @cached_property
    def occupations(self) -> np.ndarray:
        """Integer array of shape (dimension, num_modes) listing every label."""
        grids = np.indices(self.shape).reshape(self.num_modes, -1)
        return grids.T.copy()

    def _check_mode(self, mode: int):
        if not 1 <= mode <= self.num_modes:
            raise ValueError(f"mode must be in 1..{self.num_modes}, got {mode}")

    def embed(self, single: np.ndarray, mode: int) -> np.ndarray:
        """Tensor a single-mode matrix with identities on the other modes."""
        self._check_mode(mode)
        before = np.eye(self.levels ** (mode - 1))
        after = np.eye(self.levels ** (self.num_modes - mode))
        return np.kron(np.kron(before, single), after)


def single_mode_annihilation(cutoff: int, bc: BoundaryCondition) -> np.ndarray:
    n = cutoff + 1
    a = np.zeros((n, n), dtype=complex)
    k = np.arange(1, n)
    a[k - 1, k] = np.sqrt(k)
    if bc.is_wrapped:
        # a|0> = (+/-) c* |N>
        a[cutoff, 0] += np.conj(bc.signed_coefficient)
    return a


def annihilation(space: FockSpace, mode: int) -> np.ndarray:
    """Matrix of ``a_mode`` on ``space`` under its boundary condition."""
    space._check_mode(mode)
    return space.embed(single_mode_annihilation(space.cutoff, space.bc), mode)


def creation(space: FockSpace, mode: int) -> np.ndarray:
    """Matrix of ``a_mode^dag``: the conjugate transpose of :func:`annihilation`."""
    return annihilation(space, mode).conj().T.copy()


def number_diag(space: FockSpace, mode: int) -> np.ndarray:
    """Occupation of ``mode`` at every basis label, as a real diagonal.

    This is the label itself, not ``a^dag a``; under a wrapped scheme the
    product picks up ``|c|^2`` on the vacuum entry.
    """
    space._check_mode(mode)
    return space.occupations[:, mode - 1].astype(float)
