"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import time

import numpy as np

from aqec import conditions, jump_sim, liouville, metrics, models, spin_cavity
from aqec.core_ops import HilbertSpace, basis_ket, projector, single_site_op

PSI_PHASE = np.pi / 3


def _flip_state(model, k, psi=None):
    psi = models.default_psi(model) if psi is None else psi
    return projector(model.error_set[k] @ psi)


def _endpoint(model, rho0):
    gen = model.generator()
    t = liouville.repair_horizon(gen)
    rho = liouville.propagate(gen, rho0, [t])[0]
    pops = metrics.codeword_populations(rho, model.codewords)
    coh10 = metrics.codeword_coherence(rho, model.codewords, 1, 0)
    return pops, coh10


def _angle_diff(a, b):
    return abs((a - b + np.pi) % (2 * np.pi) - np.pi)


def test_criterion_01_single_stable_state(verdict):
    t0 = time.perf_counter()
    model = models.toy_model_flip(1, 1, 1)
    dec = liouville.spectral_decompose(model.generator())
    stable = liouville.stable_states(dec, tol=1e-9)
    target = liouville.vec(projector(basis_ket(model.space, "1,0")))
    err = np.inf
    if len(stable) == 1:
        v = stable[0][1]
        v = v * np.vdot(v, target) / abs(np.vdot(v, target)) / np.linalg.norm(v) * np.linalg.norm(target)
        err = float(np.max(np.abs(v - target)))
    dt = time.perf_counter() - t0
    verdict(
        1,
        "single stable state",
        {
            "16 eigenvalues": (dec.eigenvalues.size == 16, f"{dec.eigenvalues.size}"),
            "one stable": (len(stable) == 1, f"{len(stable)}"),
            "eigvec = |1,0><1,0|": (err < 1e-8, f"{err:.2e}"),
            "runtime < 1 s": (dt < 1, f"{dt:.3f} s"),
        },
    )


def test_criterion_02_entropy_repair(verdict):
    t0 = time.perf_counter()
    flip = models.toy_model_flip(1, 1, 1)
    gen = flip.generator()
    rho0 = projector(basis_ket(flip.space, "0,0"))
    times = np.linspace(0, liouville.repair_horizon(gen), 401)
    s = np.array([metrics.linear_entropy(r) for r in liouville.propagate(gen, rho0, times)])
    rises = s.max() > 0.1 and s[0] < 1e-12
    t_flip = liouville.settling_time(gen, rho0, metrics.linear_entropy, 0.01)

    direct = models.toy_model_direct(0, 0, 0, 0, mu=1.0, c=1.0)
    t_direct = liouville.settling_time(direct.generator(), rho0, metrics.linear_entropy, 0.01)
    slow = models.toy_model_flip(1, 1, 2).generator()
    t_slow = liouville.settling_time(slow, rho0, metrics.linear_entropy, 0.01, t_max=4 * t_flip)
    dt = time.perf_counter() - t0
    verdict(
        2,
        "entropy repair",
        {
            "rises then < 1e-3": (bool(rises and s[-1] < 1e-3), f"max {s.max():.3f}, final {s[-1]:.1e}"),
            "direct sooner": (t_direct < t_flip, f"{t_direct:.2f} < {t_flip:.2f}"),
            "2c slower": (t_slow > t_flip, f"{t_slow:.2f} > {t_flip:.2f}"),
            "runtime < 5 s": (dt < 5, f"{dt:.2f} s"),
        },
    )


def test_criterion_03_full_two_codeword_repair(verdict):
    clauses = {}
    worst_pop = worst_abs = worst_arg = 0.0
    slowest = 0.0
    ov = models.load_overlaps("overlaps_eq9")
    for name in ("setA", "setB", "setC"):
        model = models.load_model(name)
        assert model.generator().matrix.shape == (196, 196)
        psi = models.default_psi(model)
        starts = [_flip_state(model, k, psi) for k in (1, 2, 3)]
        starts.append(models.corrupted_state(psi, model.error_set, ov))
        for rho0 in starts:
            t0 = time.perf_counter()
            pops, coh = _endpoint(model, rho0)
            slowest = max(slowest, time.perf_counter() - t0)
            worst_pop = max(worst_pop, float(np.max(np.abs(pops - 0.5))))
            worst_abs = max(worst_abs, abs(abs(coh) - 0.5))
            worst_arg = max(worst_arg, _angle_diff(np.angle(coh), PSI_PHASE))
    clauses["pops 0.5"] = (worst_pop <= 1e-3, f"max dev {worst_pop:.1e}")
    clauses["|coh| 0.5"] = (worst_abs <= 1e-3, f"max dev {worst_abs:.1e}")
    clauses["phase pi/3"] = (worst_arg <= 1e-3, f"max dev {worst_arg:.1e} rad")
    clauses["runtime < 30 s/run"] = (slowest < 30, f"slowest {slowest:.2f} s")
    verdict(3, "full two-codeword repair (A, B, C x flips 1-3 and overlap fixture)", clauses)


def test_criterion_04_symmetric_trajectories(verdict):
    worst = 0.0
    for name in ("setA", "setB", "setC"):
        model = models.load_model(name)
        gen = model.generator()
        times = np.linspace(0, liouville.repair_horizon(gen), 120)
        for k in (1, 2, 3):
            rhos = liouville.propagate(gen, _flip_state(model, k), times)
            pops = np.array([metrics.codeword_populations(r, model.codewords) for r in rhos])
            worst = max(worst, float(np.max(np.abs(pops[:, 0] - pops[:, 1]))))
    verdict(4, "symmetric trajectories", {"pop0(t) == pop1(t)": (worst <= 1e-8, f"max dev {worst:.1e}")})


def test_criterion_05_broken_symmetry_endpoint(verdict):
    model = models.load_model("setA_asym")
    worst_pop = worst_abs = worst_arg = 0.0
    absvals = []
    for k in (1, 2, 3):
        pops, coh = _endpoint(model, _flip_state(model, k))
        worst_pop = max(worst_pop, float(np.max(np.abs(pops - 0.5))))
        worst_abs = max(worst_abs, abs(abs(coh) - 0.3530))
        worst_arg = max(worst_arg, _angle_diff(np.angle(coh), PSI_PHASE))
        absvals.append(abs(coh))
    verdict(
        5,
        "broken-symmetry endpoint",
        {
            "pops 0.5": (worst_pop <= 1e-3, f"max dev {worst_pop:.1e}"),
            "|coh| 0.3530": (worst_abs <= 5e-3, ", ".join(f"{a:.5f}" for a in absvals)),
            "phase pi/3": (worst_arg <= 1e-2, f"max dev {worst_arg:.1e} rad"),
        },
    )


def test_criterion_06_broken_dynamics(verdict):
    model = models.load_model("setC_fastmix")
    pops, coh = _endpoint(model, _flip_state(model, 1))
    dev = float(np.max(np.abs(pops - 0.5)))
    verdict(
        6,
        "broken dynamics (flip on spin 1)",
        {
            "pops 0.5": (dev <= 1e-3, f"max dev {dev:.1e}"),
            "|coh| < 0.49": (abs(coh) < 0.5 - 1e-2, f"{abs(coh):.4f}"),
        },
    )


def _flips(n):
    sp = HilbertSpace.qubits(n)
    errs = [np.eye(sp.total_dim, dtype=complex)] + [2 * single_site_op(sp, k, "x") for k in range(n)]
    return sp, errs


def test_criterion_07_checker_soundness(verdict):
    sp2, e2 = _flips(2)
    kl2 = conditions.check_kl([basis_ket(sp2, "00"), basis_ket(sp2, "11")], e2)
    sp3, e3 = _flips(3)
    kl3 = conditions.check_kl([basis_ket(sp3, "000"), basis_ket(sp3, "111")], e3)
    sym = {n: conditions.check_symmetry(models.load_model(n)).passed for n in ("setA", "setB", "setC", "setA_asym", "setC_fastmix")}
    drain = {n: conditions.check_drainage(models.load_model(n)).passed for n in ("setA", "setB", "setC")}
    verdict(
        7,
        "condition-checker soundness",
        {
            "KL fails 2-qubit": (not kl2.passed, kl2.verdict),
            "KL passes 3-qubit": (kl3.passed, kl3.verdict),
            "SYMMETRY A/B/C pass": (all(sym[n] for n in ("setA", "setB", "setC")), str(sym)),
            "SYMMETRY broken fail": (not sym["setA_asym"] and not sym["setC_fastmix"], ""),
            "DRAINAGE A/B/C pass": (all(drain.values()), str(drain)),
        },
    )


def _orthogonal_ancilla_model():
    """Two codewords |0,00>, |1,00>; codeword 0 is repaired through ancilla 1,
    codeword 1 through ancilla 2 (site 0 system, sites 1 and 2 ancillas)."""
    sp = HilbertSpace.qubits(1, 2)
    H = np.zeros((8, 8), dtype=complex)
    terms = [(1.0, single_site_op(sp, 1, "minus")), (1.0, single_site_op(sp, 2, "minus"))]
    return sp, H, terms


def test_criterion_08_jump_oracle(verdict):
    t0 = time.perf_counter()
    model = models.toy_model_flip(1, 1, 1)
    rho0 = projector(basis_ket(model.space, "0,0"))
    t = 2.0
    exact = liouville.propagate(model.generator(), rho0, [t])[0]
    branches = [(1.0, basis_ket(model.space, "0,0"), "e")]
    errs, dts = [], []
    for n in (2, 4, 8, 16):
        js = jump_sim.jump_expand(model, branches, t / n, n)
        errs.append(float(np.max(np.abs(jump_sim.reduce_to_system(js) - exact))))
        dts.append(t / n)
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    C = max(e / d for e, d in zip(errs, dts))
    bounded = all(e <= C * d for e, d in zip(errs, dts))

    sp, H, terms = _orthogonal_ancilla_model()
    a0, a1 = 1 / np.sqrt(2), np.exp(1j * PSI_PHASE) / np.sqrt(2)
    start = [(a0, basis_ket(sp, "0,10"), "e"), (a1, basis_ket(sp, "1,01"), "e")]
    js = jump_sim.jump_expand((H, terms), start, 0.5, 8)
    rho = jump_sim.reduce_to_system(js)
    cw0, cw1 = basis_ket(sp, "0,00"), basis_ket(sp, "1,00")
    coh = abs(np.vdot(cw0, rho @ cw1))
    pops = (np.vdot(cw0, rho @ cw0).real, np.vdot(cw1, rho @ cw1).real)
    dt = time.perf_counter() - t0
    verdict(
        8,
        "jump oracle",
        {
            "order >= 1": (bool(np.all(orders >= 1)), ", ".join(f"{o:.2f}" for o in orders)),
            "err <= C dt": (bounded, f"errors {', '.join(f'{e:.1e}' for e in errs)}"),
            "orthogonal ancilla |coh| < 1e-12": (coh < 1e-12, f"{coh:.1e} (pops {pops[0]:.3f}, {pops[1]:.3f})"),
            "runtime < 60 s": (dt < 60, f"{dt:.2f} s"),
        },
    )


def test_criterion_09_phase_matching(verdict):
    worst = 0.0
    for w0, w1, w2, w3, g in [(1.0, 0.3, 0.2, 0.5, 0.7), (2.0, 1.0, 0.5, 0.1, 0.05), (0.4, 0.4, 3.0, 1.0, 2.5)]:
        delta = w0 - w1 - w2 + w3
        f = jump_sim.phase_matching_factor(w0, w1, w2, w3, g, T=1.3)
        q = jump_sim.phase_matching_quadrature(w0, w1, w2, w3, g, T=1.3)
        worst = max(worst, abs(abs(f) - g / np.hypot(g, delta)), abs(abs(f) - abs(q)))
    unit = abs(jump_sim.phase_matching_factor(1.0, 0.4, 0.2, -0.4, 0.3))
    verdict(
        9,
        "phase matching",
        {
            "|factor| vs quadrature": (worst <= 1e-10, f"max dev {worst:.1e}"),
            "delta=0 -> 1": (abs(unit - 1) < 1e-12, f"{unit:.15f}"),
        },
    )


def test_criterion_10_spin_spectrum(verdict):
    H = spin_cavity.spin_hamiltonian(spin_cavity.SpinSystem.default(0.2))
    lines = spin_cavity.unique_lines(spin_cavity.dipole_spectrum(H, "x"))
    starred = sorted(ln.freq for ln in lines if ln.starred)
    unstarred = sorted(ln.freq for ln in lines if not ln.starred)

    def near(found, want):
        return len(found) == len(want) and all(abs(f - w) <= 0.01 for f, w in zip(found, want))

    H0 = spin_cavity.spin_hamiltonian(spin_cavity.SpinSystem.default(0.0))
    elems = spin_cavity.funnel_codeword_elements(H0, "x")
    zero_strengths = {k: abs(v) ** 2 for k, v in elems.items() if k in "ABC"}
    sweep = spin_cavity.feasibility_sweep(np.linspace(0.01, 0.5, 50))
    crossings = spin_cavity.line_crossings(0.0, 0.5, 501)
    verdict(
        10,
        "spin spectrum",
        {
            "starred 0.64/1.03/2.39": (near(starred, [0.64, 1.03, 2.39]), ", ".join(f"{f:.4f}" for f in starred)),
            "unstarred 0.39/1.36/1.75": (near(unstarred, [0.39, 1.36, 1.75]), ", ".join(f"{f:.4f}" for f in unstarred)),
            "J=0 starred strengths < 1e-12": (
                max(zero_strengths.values()) < 1e-12,
                ", ".join(f"{k} {v:.3g}" for k, v in zero_strengths.items()),
            ),
            "feasible 0 < J23 <= 0.5": (
                all(r.passed for r in sweep),
                f"{sum(r.passed for r in sweep)}/{len(sweep)} sampled; isolated line crossing (not separable) at J23 = "
                + ", ".join(f"{j:.6f}" for j in crossings),
            ),
        },
    )


def test_criterion_11_cavity_design(verdict):
    t0 = time.perf_counter()
    modes = spin_cavity.cavity_modes(*spin_cavity.DEFAULT_BOX, 2.5)
    H = spin_cavity.spin_hamiltonian(spin_cavity.SpinSystem.default(0.2))
    rep = spin_cavity.design_report(modes, spin_cavity.dipole_spectrum(H, "x"))
    dt = time.perf_counter() - t0
    names = [m["mode"] for m in rep.matched]
    fields = [m["center_field"] for m in rep.matched]
    freqs = [m["mode_freq"] for m in rep.matched]
    bind = rep.binding
    verdict(
        11,
        "cavity design",
        {
            "TE102/TE104/TE122": (names == ["TE102", "TE104", "TE122"], ", ".join(map(str, names))),
            "freqs 0.636/1.029/2.385": (
                all(f is not None and abs(f - w) <= 0.001 for f, w in zip(freqs, [0.636, 1.029, 2.385])),
                ", ".join(f"{f:.4f}" for f in freqs),
            ),
            "B_x at center": (fields == ["B_x"] * 3, ", ".join(map(str, fields))),
            "29 +- 2 extra modes": (
                abs(rep.extra_mode_count - 29) <= 2,
                f"{rep.extra_mode_count} distinct (family,m,n,p); alternatives {rep.alternative_counts}",
            ),
            "TE302 offset 0.018": (bind["mode"] == "TE302" and abs(bind["offset"] - 0.018) <= 0.002, f"{bind['mode']} {bind['offset']:.4f}"),
            "Q 76 +- 3": (abs(rep.required_q - 76) <= 3, f"{rep.required_q:.2f}"),
            "runtime < 1 s": (dt < 1, f"{dt:.3f} s"),
        },
    )
