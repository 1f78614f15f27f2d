"""The truncated coherent state against the numerical ground state of H_I."""

import numpy as np

from dioph_adiabatic import CoherentParams, FockSpace, build_HI, coherent_state, eigendecompose
from dioph_adiabatic.errors import TailMassError

alpha = 1.0
for cutoff in (4, 8, 16, 40):
    space = FockSpace(1, cutoff)
    params = CoherentParams((alpha,))
    try:
        state = coherent_state(space, params)
    except TailMassError as exc:
        print(f"N={cutoff:3d}: refused ({exc})")
        state = coherent_state(space, params, max_tail=None)
    system = eigendecompose(build_HI(space, params))
    fidelity = abs(state.overlap(system.vector(0))) ** 2
    print(f"N={cutoff:3d}: tail {state.tail_mass:.2e}  E0 {system.energies[0]: .2e}  1-fidelity {1 - fidelity:.2e}")

# vacuum probability of |alpha=1> is exp(-1)
print("p(0) =", abs(coherent_state(FockSpace(1, 20), CoherentParams((1.0,))).amplitudes[0]) ** 2, "vs", np.exp(-1))
