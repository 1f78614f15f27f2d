import math

import numpy as np
import pytest

from dioph_adiabatic import (
    BoundaryCondition,
    CoherentParams,
    FockSpace,
    Schedule,
    StateVector,
    build_HI,
    build_HP,
    coherent_amplitudes,
    coherent_state,
    eigendecompose,
    evolve,
    measure_probabilities,
    parse,
)
from dioph_adiabatic.errors import TailMassError
from oracles import rk4_evolve


def test_coherent_amplitude_closed_form():
    amps = coherent_amplitudes(FockSpace(1, 12), CoherentParams((1.0,)))
    assert amps[0] == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert amps[0] == pytest.approx(0.60653, abs=1e-5)
    assert amps[2] / amps[1] == pytest.approx(1 / math.sqrt(2), rel=1e-15)


def test_coherent_amplitudes_complex_alpha_closed_form():
    alpha = 0.6 - 1.1j
    amps = coherent_amplitudes(FockSpace(1, 6), CoherentParams((alpha,)))
    for n in range(7):
        expected = math.exp(-abs(alpha) ** 2 / 2) * alpha**n / math.sqrt(math.factorial(n))
        assert amps[n] == pytest.approx(expected, rel=1e-13)


def test_coherent_state_vacuum_probability():
    state = coherent_state(FockSpace(1, 12), CoherentParams((1.0,)))
    assert state.tail_mass < 1e-9
    p = measure_probabilities(state)
    assert p[0] == pytest.approx(math.exp(-1), abs=1e-9)
    assert p[0] == pytest.approx(0.3679, abs=1e-4)


def test_tail_mass_matches_poisson_tail():
    state = coherent_state(FockSpace(1, 4), CoherentParams((1.0,)), max_tail=None)
    tail = 1 - sum(math.exp(-1) / math.factorial(n) for n in range(5))
    assert state.tail_mass == pytest.approx(tail, rel=1e-10)


def test_tail_guard():
    with pytest.raises(TailMassError):
        coherent_state(FockSpace(1, 4), CoherentParams((1.0,)))


def test_two_mode_coherent_state_is_product():
    space = FockSpace(2, 14)
    state = coherent_state(space, CoherentParams((0.8, 0.5j)))
    a = coherent_state(FockSpace(1, 14), CoherentParams((0.8,)), max_tail=None)
    b = coherent_state(FockSpace(1, 14), CoherentParams((0.5j,)), max_tail=None)
    np.testing.assert_allclose(state.amplitudes, np.kron(a.amplitudes, b.amplitudes), atol=1e-15)


def test_coherent_state_is_HI_ground_state():
    space = FockSpace(1, 40)
    params = CoherentParams((1.0,))
    state = coherent_state(space, params)
    ground = eigendecompose(build_HI(space, params)).vector(0)
    assert abs(state.overlap(ground)) ** 2 >= 1 - 1e-8


def test_measure_probabilities_examples():
    space = FockSpace(1, 5)
    np.testing.assert_array_equal(measure_probabilities(StateVector.basis(space, (3,))), [0, 0, 0, 1, 0, 0])
    v = np.zeros(6, dtype=complex)
    v[1] = v[4] = 1 / np.sqrt(2)
    p = measure_probabilities(StateVector(v, space))
    assert p[1] == pytest.approx(0.5) and p[4] == pytest.approx(0.5)


def test_state_vector_requires_normalization():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]))


def _small_problem(cutoff=5, bc=None):
    space = FockSpace(1, cutoff, bc or BoundaryCondition.antiperiodic())
    params = CoherentParams((1.0,))
    HI, HP = build_HI(space, params), build_HP(space, parse("x1 - 2"))
    psi0 = coherent_state(space, params, max_tail=None)
    return space, HI, HP, psi0


def test_evolve_constant_hamiltonian():
    space, HI, _, psi0 = _small_problem()
    traj = evolve(space, HI, HI, Schedule(3.0, 300), psi0, sample_s=[0.5])
    system = eigendecompose(HI)
    exact = system.vectors @ (np.exp(-3j * system.energies) * (system.vectors.conj().T @ psi0.amplitudes))
    np.testing.assert_allclose(traj.final.amplitudes, exact, atol=1e-12)
    w0 = np.abs(system.vectors.conj().T @ psi0.amplitudes) ** 2
    for _, state in traj.samples:
        w = np.abs(system.vectors.conj().T @ state.amplitudes) ** 2
        np.testing.assert_allclose(w, w0, atol=1e-12)


def test_evolve_samples_and_initial_snapshot():
    space, HI, HP, psi0 = _small_problem()
    traj = evolve(space, HI, HP, Schedule(2.0, 200), psi0, sample_s=[0.25, 0.5])
    assert [s for s, _ in traj.samples] == [0.0, 0.25, 0.5, 1.0]
    assert traj.at(0.0) is psi0
    assert traj.norm_drift <= 1e-9
    for _, state in traj.samples:
        assert measure_probabilities(state).sum() == pytest.approx(1.0, abs=1e-9)


def test_evolve_rejects_too_few_steps():
    space, HI, HP, psi0 = _small_problem()
    with pytest.raises(ValueError):
        evolve(space, HI, HP, Schedule(1.0, 99), psi0)


def test_evolve_is_deterministic():
    space, HI, HP, psi0 = _small_problem()
    a = evolve(space, HI, HP, Schedule(4.0, 800), psi0).final.amplitudes
    b = evolve(space, HI, HP, Schedule(4.0, 800), psi0).final.amplitudes
    np.testing.assert_array_equal(a, b)


def test_step_halving_converges():
    space, HI, HP, psi0 = _small_problem()
    p1 = measure_probabilities(evolve(space, HI, HP, Schedule(5.0, 10_000), psi0).final)
    p2 = measure_probabilities(evolve(space, HI, HP, Schedule(5.0, 20_000), psi0).final)
    assert np.abs(p1 - p2).max() < 1e-6


@pytest.mark.parametrize("bc", [BoundaryCondition.abrupt(), BoundaryCondition.periodic(0.5j)])
def test_agrees_with_rk4_reference(bc):
    space, HI, HP, psi0 = _small_problem(cutoff=4, bc=bc)
    ours = evolve(space, HI, HP, Schedule(4.0, 10_000), psi0).final.amplitudes
    ref = rk4_evolve(HI.matrix, HP.matrix, 4.0, 20_000, psi0.amplitudes)
    assert np.linalg.norm(ours - ref) < 1e-6


def test_large_T_reaches_ground_label():
    space = FockSpace(1, 12, BoundaryCondition.antiperiodic())
    params = CoherentParams((1.0,))
    HI, HP = build_HI(space, params), build_HP(space, parse("x1 - 2"))
    psi0 = coherent_state(space, params)
    p = measure_probabilities(evolve(space, HI, HP, Schedule(64.0, 6400), psi0).final)
    assert p[2] > 0.9
