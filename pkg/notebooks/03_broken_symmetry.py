"""What goes wrong when the two funnels are not mirror images.

Changing a single coupling in the second funnel makes the bath record of the
repair depend on which codeword was hit. Populations are still repaired but
part of the coherence is lost for good. The symmetry check flags both models.
"""

import numpy as np

from aqec import conditions, liouville, metrics, models

for name in ("setA_asym", "setC_fastmix"):
    model = models.load_model(name)
    rep = conditions.check_symmetry(model)
    print(f"{name}: SYMMETRY {rep.verdict}, worst witness {rep.witnesses[0].where} ({rep.witnesses[0].magnitude:.3f})")
    gen = model.generator()
    t = liouville.repair_horizon(gen)
    psi = models.default_psi(model)
    for k in (1, 2, 3):
        phi = model.error_set[k] @ psi
        rho = liouville.propagate(gen, np.outer(phi, phi.conj()), [t])[0]
        pops = metrics.codeword_populations(rho, model.codewords)
        print(f"  flip {k}: pops {np.round(pops, 4)}  |coh| {abs(metrics.codeword_coherence(rho, model.codewords)):.4f}")
