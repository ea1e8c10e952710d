"""A single protected qubit and one cooled ancilla.

The system qubit S should stay in |1>. A flip error sends it to |0>; the
Hamiltonian hands the excitation to the ancilla A, and cooling A removes it.
We look at the generator spectrum, then at how fast the entropy of a flipped
start decays for a few parameter choices.
"""

import numpy as np

from aqec import liouville, metrics, models
from aqec.core_ops import basis_ket, projector

model = models.toy_model_flip(d=1, r=1, c=1)
dec = liouville.spectral_decompose(model.generator())
print("Re(lambda):", np.round(np.sort(dec.eigenvalues.real), 4))
(lam, vec), = liouville.stable_states(dec)
print("stable state population on |1,0>:", abs(liouville.unvec(vec)[1 * 2, 2] / np.trace(liouville.unvec(vec))))

# repair from the flipped state |0,0>
rho0 = projector(basis_ket(model.space, "0,0"))
for label, m in [
    ("flip model d=r=c=1", model),
    ("flip model c=2", models.toy_model_flip(1, 1, 2)),
    ("flip model c=0.5", models.toy_model_flip(1, 1, 0.5)),
    ("direct coupling mu=1", models.toy_model_direct(0, 0, 0, 0, mu=1.0, c=1.0)),
]:
    t = liouville.settling_time(m.generator(), rho0, metrics.linear_entropy, 0.01)
    print(f"{label:24s} entropy < 0.01 after t = {t:8.2f}")

# stronger cooling slows the repair: the ancilla is pinned to |0> (a Zeno effect)
gen = model.generator()
times = np.linspace(0, 150, 7)
for t, rho in zip(times, liouville.propagate(gen, rho0, times)):
    print(f"t={t:6.1f}  S_lin={metrics.linear_entropy(rho):.4f}")
