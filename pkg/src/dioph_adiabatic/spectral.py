"""Eigendecomposition of ``H(s)`` and scans over its instantaneous eigenpairs.

:func:`condition_scan` tabulates ``|<e(s)| HP - HI |f(s)>|`` for every pair of
instantaneous eigenvectors across interior ``s``; a vanishing entry is the
event the identification criterion relies on never happening.
:func:`recurrence_residual` checks the three-term componentwise eigen-relation
of a single mode, and :func:`partial_sum_probe` returns truncated orthogonality
sums together with the bounded-variation sum of ``D(n)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._workers import ordered_map
from .errors import NumericalGuardError
from .fock import FockSpace
from .hamiltonian import CoherentParams, HermitianOperator, as_matrix, interpolate
from .polynomial import DiophantinePolynomial, evaluate

__all__ = [
    "EigenSystem",
    "ConditionScanReport",
    "eigendecompose",
    "condition_scan",
    "recurrence_residual",
    "partial_sum_probe",
    "scan_grid",
]

RESIDUAL_RTOL = 1e-8
ORTHO_TOL = 1e-10
DEGENERACY_RTOL = 1e-9
VIOLATION_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending energies and matching orthonormal eigenvectors (columns)."""

    energies: np.ndarray
    vectors: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.energies)

    def vector(self, k: int) -> np.ndarray:
        return self.vectors[:, k]

    @property
    def gap(self) -> float:
        """``E_1 - E_0``, or ``inf`` for a one-dimensional space."""
        if self.dimension < 2:
            return float("inf")
        return float(self.energies[1] - self.energies[0])


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vectors), axis=0)
    cols = np.arange(vectors.shape[1])
    pivot = vectors[idx, cols]
    fixed = vectors * (np.conj(pivot) / np.abs(pivot))[None, :]
    fixed[idx, cols] = np.abs(pivot)
    return fixed


def eigendecompose(H, check: bool = True) -> EigenSystem:
    """Full spectrum of a Hermitian matrix, ascending, with fixed gauge.

    Each eigenvector is rotated so that its largest-magnitude component is
    real and positive, which makes stored results reproducible.

    Raises:
        ValueError: ``H`` is not Hermitian.
        NumericalGuardError: the solver result misses the residual or
            orthonormality bounds.
    """
    if not isinstance(H, HermitianOperator):
        H = HermitianOperator(H)
    m = H.matrix
    try:
        energies, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalGuardError(f"eigensolver failed: {exc}") from exc
    vectors = _fix_phases(vectors)
    if check:
        scale = float(np.linalg.norm(m))
        resid = np.linalg.norm(m @ vectors - vectors * energies[None, :], axis=0)
        if resid.max(initial=0.0) > RESIDUAL_RTOL * max(scale, 1e-300):
            raise NumericalGuardError(f"eigen-residual {resid.max():.3g} too large")
        gram = vectors.conj().T @ vectors
        if np.abs(gram - np.eye(len(energies))).max(initial=0.0) > ORTHO_TOL:
            raise NumericalGuardError("eigenvectors are not orthonormal to 1e-10")
    energies.setflags(write=False)
    vectors.setflags(write=False)
    return EigenSystem(energies, vectors)


def scan_grid(grid_points: int) -> np.ndarray:
    """Interior points ``g / (grid_points + 1)``, ``g = 1..grid_points``."""
    if grid_points < 1:
        raise ValueError("grid_points must be positive")
    return np.arange(1, grid_points + 1) / (grid_points + 1)


@dataclass(frozen=True, eq=False)
class ConditionScanReport:
    """Matrix elements of ``HP - HI`` between instantaneous eigenvectors.

    ``abs_elements[g, i, j]`` is ``|<v_i(s_g)| HP - HI |v_j(s_g)>|`` with
    eigenvectors in ascending-energy order. ``degenerate[g, i, j]`` marks pairs
    whose energies are closer than ``1e-9 * ||H(s_g)||_F``; those elements
    depend on the arbitrary basis inside the degenerate subspace and are left
    out of every minimum.
    """

    grid: np.ndarray
    energies: np.ndarray
    abs_elements: np.ndarray
    degenerate: np.ndarray
    commutator_norm: float
    difference_norm: float
    endpoint_scale: float = field(default=1.0)

    @property
    def dimension(self) -> int:
        return self.energies.shape[1]

    @property
    def violation_tolerance(self) -> float:
        return VIOLATION_RTOL * self.difference_norm

    @property
    def endpoints_commute(self) -> bool:
        """True when ``[HI, HP]`` vanishes, so the criterion's premise fails."""
        return self.commutator_norm <= 1e-12 * max(self.endpoint_scale, 1e-300)

    def _masked(self) -> np.ndarray:
        n = self.dimension
        vals = self.abs_elements.copy()
        off_diag = ~np.eye(n, dtype=bool)
        usable = off_diag[None, :, :] & ~self.degenerate
        # each unordered pair once: keep i < j
        usable &= np.triu(np.ones((n, n), dtype=bool), k=1)[None, :, :]
        vals[~usable] = np.inf
        return vals

    @property
    def per_pair_minimum(self) -> np.ndarray:
        """Minimum over the grid for each pair ``i < j`` (``inf`` elsewhere)."""
        return self._masked().min(axis=0)

    @property
    def per_s_minimum(self) -> list[tuple[float, int, int, float]]:
        """Rows ``(s, i, j, value)`` with the smallest usable element at each s."""
        vals = self._masked()
        rows = []
        for g, s in enumerate(self.grid):
            flat = int(np.argmin(vals[g]))
            i, j = divmod(flat, self.dimension)
            rows.append((float(s), i, j, float(vals[g, i, j])))
        return rows

    @property
    def global_minimum(self) -> float:
        if self.dimension < 2:
            return float("inf")
        return float(self._masked().min())

    @property
    def global_location(self) -> tuple[float, int, int] | None:
        """``(s, i, j)`` where the global minimum is attained."""
        vals = self._masked()
        if not np.isfinite(vals).any():
            return None
        g, i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
        return float(self.grid[g]), int(i), int(j)

    @property
    def degenerate_pair_count(self) -> int:
        n = self.dimension
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        return int((self.degenerate & upper[None]).sum())

    @property
    def gaps(self) -> np.ndarray:
        if self.dimension < 2:
            return np.full(len(self.grid), np.inf)
        return self.energies[:, 1] - self.energies[:, 0]

    @property
    def min_gap(self) -> float:
        return float(self.gaps.min())

    def violations(self) -> list[tuple[float, int, int, float]]:
        """Usable elements below ``1e-10 * ||HP - HI||_F``."""
        vals = self._masked()
        hits = np.argwhere(vals < self.violation_tolerance)
        return [
            (float(self.grid[g]), int(i), int(j), float(vals[g, i, j]))
            for g, i, j in hits
        ]

    def summary(self) -> dict:
        loc = self.global_location
        return {
            "grid_points": len(self.grid),
            "global_minimum": self.global_minimum,
            "global_location": None if loc is None else {"s": loc[0], "pair_i": loc[1], "pair_j": loc[2]},
            "commutator_norm": self.commutator_norm,
            "endpoints_commute": self.endpoints_commute,
            "violation_tolerance": self.violation_tolerance,
            "violations": len(self.violations()),
            "degenerate_pairs": self.degenerate_pair_count,
            "min_gap": self.min_gap,
        }


def condition_scan(HI, HP, grid_points: int, workers: int | None = None) -> ConditionScanReport:
    """Scan ``|<e|HP - HI|f>|`` over interior ``s`` for all eigenpair pairs.

    Grid points are independent and are farmed out to ``workers`` threads
    (default from ``$ADIA_THREADS``); the report does not depend on the count.
    """
    a, b = as_matrix(HI), as_matrix(HP)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = b - a
    grid = scan_grid(grid_points)

    def one(s):
        H = interpolate(HI, HP, float(s))
        system = eigendecompose(H)
        v = system.vectors
        elems = np.abs(v.conj().T @ diff @ v)
        de = np.abs(system.energies[:, None] - system.energies[None, :])
        degen = de < DEGENERACY_RTOL * H.frobenius_norm()
        np.fill_diagonal(degen, False)
        return system.energies, elems, degen

    results = ordered_map(one, grid, workers)
    comm = float(np.linalg.norm(a @ b - b @ a))
    return ConditionScanReport(
        grid=grid,
        energies=np.array([r[0] for r in results]),
        abs_elements=np.array([r[1] for r in results]),
        degenerate=np.array([r[2] for r in results]),
        commutator_norm=comm,
        difference_norm=float(np.linalg.norm(diff)),
        endpoint_scale=float(np.linalg.norm(a) * np.linalg.norm(b)),
    )


def _require_single_mode(space: FockSpace):
    if space.num_modes != 1:
        raise ValueError("the three-term recurrence is defined for a single mode only")


def recurrence_residual(
    system: EigenSystem,
    which: int,
    s: float,
    params: CoherentParams,
    poly: DiophantinePolynomial,
    space: FockSpace,
) -> np.ndarray:
    """Componentwise defect of the single-mode three-term recurrence.

    For eigenvector ``f`` with energy ``E`` of ``H(s)`` this returns, for each
    occupation ``k``,

        | -(1-s)(alpha sqrt(k) f[k-1] + conj(alpha) sqrt(k+1) f[k+1])
          - (E - s D(k)^2 - (1-s)(k + |alpha|^2)) f[k] |

    evaluated term by term from the components of ``f`` rather than through
    the matrix. Out-of-range neighbours are dropped under abrupt truncation;
    wrapped schemes replace them with the wrap amplitudes, and the vacuum
    occupation term becomes ``|c|^2``.
    """
    _require_single_mode(space)
    if not 0.0 <= s < 1.0:
        raise ValueError("the recurrence requires 0 <= s < 1")
    if poly.num_vars != 1:
        raise ValueError("polynomial must have one variable")
    if len(params.alphas) != 1:
        raise ValueError("need exactly one alpha")
    alpha = params.alphas[0]
    f = np.asarray(system.vectors[:, which])
    E = float(system.energies[which])
    N = space.cutoff
    k = np.arange(N + 1)

    below = np.zeros(N + 1, dtype=complex)  # (a^dag f)_k
    above = np.zeros(N + 1, dtype=complex)  # (a f)_k
    below[1:] = np.sqrt(k[1:]) * f[:-1]
    above[:-1] = np.sqrt(k[:-1] + 1) * f[1:]
    occupation = k.astype(float)
    bc = space.bc
    if bc.is_wrapped:
        c = bc.signed_coefficient
        below[0] += c * f[N]
        above[N] += np.conj(c) * f[0]
        occupation[0] += abs(c) ** 2
    d2 = np.array([float(evaluate(poly, (int(n),)) ** 2) for n in k])
    lhs = -(1.0 - s) * (alpha * below + np.conj(alpha) * above)
    rhs = (E - s * d2 - (1.0 - s) * (occupation + abs(alpha) ** 2)) * f
    return np.abs(lhs - rhs)


def partial_sum_probe(
    system: EigenSystem,
    pair: tuple[int, int],
    poly: DiophantinePolynomial,
    upto: int,
) -> tuple[complex, complex, int]:
    """Truncated orthogonality sums and the variation sum of ``D(n)^2``.

    Returns ``(sum conj(e_n) f_n, sum D(n)^2 conj(e_n) f_n, sum |D(n)^2 - D(n+1)^2|)``
    with every sum over ``0 <= n < upto``. The first two stop at the space
    dimension; the third is exact integer arithmetic and keeps growing for
    any non-constant ``D``.
    """
    if poly.num_vars != 1:
        raise ValueError("partial_sum_probe is defined for a single mode only")
    if upto < 0:
        raise ValueError("upto must be non-negative")
    i, j = pair
    e = np.asarray(system.vectors[:, i])
    f = np.asarray(system.vectors[:, j])
    n_vec = min(upto, system.dimension)
    weights = np.array([float(evaluate(poly, (n,)) ** 2) for n in range(n_vec)])
    prod = np.conj(e[:n_vec]) * f[:n_vec]
    overlap = complex(prod.sum())
    weighted = complex((weights * prod).sum())
    squares = [evaluate(poly, (n,)) ** 2 for n in range(upto + 1)]
    variation = sum(abs(squares[n] - squares[n + 1]) for n in range(upto))
    return overlap, weighted, variation
