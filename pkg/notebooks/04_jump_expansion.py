"""The bath-register picture of the repair.

Each cooling step writes a fresh register; tracing them out reproduces the
Lindblad state, with second-order accuracy in the step under a symmetric
split. Sending the two codewords' excitations into different registers
erases their coherence completely, while a shared register keeps it.
"""

import numpy as np

from aqec import jump_sim, liouville, models
from aqec.core_ops import HilbertSpace, basis_ket, projector, single_site_op

model = models.toy_model_flip(1, 1, 1)
start = basis_ket(model.space, "0,0")
exact = liouville.propagate(model.generator(), projector(start), [2.0])[0]
for n in (2, 4, 8, 16):
    js = jump_sim.jump_expand(model, [(1.0, start, "e")], 2.0 / n, n)
    print(f"steps {n:2d}: max |rho_jump - rho_lindblad| = {np.abs(jump_sim.reduce_to_system(js) - exact).max():.2e}")

sp = HilbertSpace.qubits(1, 2)
pair = (np.zeros((8, 8)), [(1.0, single_site_op(sp, 1, "minus")), (1.0, single_site_op(sp, 2, "minus"))])
a = 1 / np.sqrt(2)
cw0, cw1 = basis_ket(sp, "0,00"), basis_ket(sp, "1,00")
for title, second in [("shared ancilla", "1,10"), ("separate ancillas", "1,01")]:
    js = jump_sim.jump_expand(pair, [(a, basis_ket(sp, "0,10"), 0), (a, basis_ket(sp, second), 0)], 0.5, 8)
    rho = jump_sim.reduce_to_system(js)
    print(f"{title:18s} |<cw0|rho|cw1>| = {abs(np.vdot(cw0, rho @ cw1)):.4f}")

print(jump_sim.phase_matching_report(1.0, 0.2, 0.5, 0.1, gamma=0.3))
