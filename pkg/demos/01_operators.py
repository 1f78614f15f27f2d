"""Ladder operators on a truncated Fock space and the three wrap schemes.

Run with ``python3 demos/01_operators.py``.
"""

import numpy as np

from dioph_adiabatic import (
    BoundaryCondition,
    CoherentParams,
    FockSpace,
    annihilation,
    build_HI,
    build_HP,
    commutator_norm,
    creation,
    parse,
)

np.set_printoptions(precision=3, suppress=True, linewidth=120)

for bc in (BoundaryCondition.abrupt(), BoundaryCondition.periodic(), BoundaryCondition.antiperiodic()):
    space = FockSpace(1, 3, bc)
    a = annihilation(space, 1)
    print(f"--- {bc.scheme.value}: a on N=3")
    print(a.real)
    # the canonical commutator only survives away from the cutoff edge
    comm = a @ creation(space, 1) - creation(space, 1) @ a
    print("diag [a, a+] =", np.diag(comm).real)

# two modes: labels run row-major, mode 1 slowest
space = FockSpace(2, 2)
print("labels:", list(space.labels()))

poly = parse("x1*x2 - 2")
HP = build_HP(space, poly)
print("H_P diagonal:", np.diag(HP.matrix).real)

HI = build_HI(space, CoherentParams((1.0, 0.5j)))
print("||[H_I, H_P]||_F =", round(commutator_norm(HI, HP), 6))
