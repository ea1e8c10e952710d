"""Three coupled electron spins in a rectangular resonator.

The x-polarized lines from each funnel level to its codeword must be cooled
and the funnel-funnel lines must not. Exchange between spins 2 and 3 is what
lights up the middle funnel level; the resonator then picks out the right
lines, and the nearest stray mode sets the quality factor needed.
"""

import numpy as np

from aqec import spin_cavity as sc

system = sc.SpinSystem.default(J23=0.2)
H = sc.spin_hamiltonian(system)
for ln in sc.unique_lines(sc.dipole_spectrum(H, "x")):
    tag = "*" if ln.starred else " "
    print(f"{tag} {ln.freq:.4f}  {ln.from_level}->{ln.to_level}  strength {ln.strength:.4f}")

no_exchange = sc.funnel_codeword_elements(sc.spin_hamiltonian(sc.SpinSystem.default(0.0)), "x")
print("J=0 funnel->codeword strengths:", {k: round(abs(v) ** 2, 4) for k, v in no_exchange.items() if k in "ABC"})
print("starred/unstarred crossings for 0 < J23 <= 0.5:", sc.line_crossings(0.0, 0.5, 501))

modes = sc.cavity_modes(*sc.DEFAULT_BOX, 2.5)
rep = sc.design_report(modes, sc.dipole_spectrum(H, "x"))
for m in rep.matched:
    print(f"{m['transition']}: {m['mode']} at {m['mode_freq']:.4f} ({m['center_field']})")
print(f"binding stray mode {rep.binding['mode']} offset {rep.binding['offset']:.4f} -> Q >> {rep.required_q:.1f}")
print("mode counts:", rep.alternative_counts)
print(f"bath must be far below {sc.bath_temperature_scale(0.1):.3f} K for zeta = 0.1 cm^-1")
