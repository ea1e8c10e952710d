import numpy as np
import pytest

from aqec import jump_sim, liouville, models
from aqec.core_ops import HilbertSpace, basis_ket, projector, single_site_op
from aqec.models import OverlapMatrix


def _errors(model, rho0, t, steps, splitting):
    exact = liouville.propagate(model.generator(), rho0, [t])[0]
    w, V = np.linalg.eigh(rho0)
    branches = [(np.sqrt(p), V[:, k], k) for k, p in enumerate(w) if p > 1e-14]
    out = []
    for n in steps:
        js = jump_sim.jump_expand(model, branches, t / n, n, splitting=splitting)
        out.append(np.max(np.abs(jump_sim.reduce_to_system(js) - exact)))
    return np.array(out)


@pytest.mark.parametrize("splitting, lo", [("strang", 1.9), ("lie", 0.9)])
def test_convergence_order(splitting, lo):
    m = models.toy_model_flip(1, 1, 1)
    rho0 = projector(basis_ket(m.space, "0,0"))
    err = _errors(m, rho0, 2.0, [2, 4, 8, 16], splitting)
    orders = np.log2(err[:-1] / err[1:])
    assert np.all(orders > lo), orders


def test_two_codeword_mixture_converges():
    m = models.load_model("setA")
    psi = models.default_psi(m)
    rho0 = models.corrupted_state(psi, m.error_set, OverlapMatrix.orthogonal([0.1, 0.3, 0.3, 0.3]))
    err = _errors(m, rho0, 1.0, [2, 4, 8], "strang")
    assert err[-1] < err[0] / 8


def test_nonorthogonal_environment_reproduces_corrupted_state():
    m = models.load_model("setA")
    psi = models.default_psi(m)
    ov = OverlapMatrix(np.array([0.4, 0.3, 0.3, 0.0]), np.array(
        [[1, 0.5, 0.2j, 0], [0.5, 1, 0.1, 0], [-0.2j, 0.1, 1, 0], [0, 0, 0, 1]], dtype=complex))
    branches = [(np.sqrt(p), E @ psi, n) for n, (p, E) in enumerate(zip(ov.weights, m.error_set))]
    js = jump_sim.jump_expand(m, branches, 0.1, 0, env_overlaps=ov.g)
    np.testing.assert_allclose(jump_sim.reduce_to_system(js), models.corrupted_state(psi, m.error_set, ov), atol=1e-12)


def test_environment_frame():
    G = np.array([[1, 0.3j], [-0.3j, 1]])
    labels, F = jump_sim.environment_frame(["a", "b", "a"], {("a", "b"): 0.3j})
    assert labels == ["a", "b"]
    np.testing.assert_allclose(F.conj().T @ F, G, atol=1e-14)
    with pytest.raises(ValueError):
        jump_sim.environment_frame(["a", "b"], np.array([[1, 2], [2, 1]]))


def _two_ancilla():
    sp = HilbertSpace.qubits(1, 2)
    terms = [(1.0, single_site_op(sp, 1, "minus")), (1.0, single_site_op(sp, 2, "minus"))]
    return sp, (np.zeros((8, 8), complex), terms)


def test_shared_ancilla_keeps_coherence_orthogonal_loses_it():
    sp, model = _two_ancilla()
    a, b = 1 / np.sqrt(2), np.exp(1j * np.pi / 3) / np.sqrt(2)
    cw0, cw1 = basis_ket(sp, "0,00"), basis_ket(sp, "1,00")
    shared = jump_sim.jump_expand(model, [(a, basis_ket(sp, "0,10"), 0), (b, basis_ket(sp, "1,10"), 0)], 0.5, 8)
    split = jump_sim.jump_expand(model, [(a, basis_ket(sp, "0,10"), 0), (b, basis_ket(sp, "1,01"), 0)], 0.5, 8)
    rs, ro = jump_sim.reduce_to_system(shared), jump_sim.reduce_to_system(split)
    # all but exp(-8) of the excitation has drained
    assert abs(np.vdot(cw0, rs @ cw1)) == pytest.approx(0.5 * (1 - np.exp(-8.0)), rel=1e-12)
    assert abs(np.vdot(cw0, ro @ cw1)) < 1e-15
    assert abs(jump_sim.bath_overlap(shared, cw0, cw1)) == pytest.approx(1.0)
    assert abs(jump_sim.bath_overlap(split, cw0, cw1)) < 1e-15


def test_register_bookkeeping():
    sp, model = _two_ancilla()
    js = jump_sim.jump_expand(model, [(1.0, basis_ket(sp, "0,11"), 0)], 0.3, 3)
    assert js.registers == [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]
    assert js.amplitudes.shape == (8, 2**6)
    assert js.register_pattern(0b000101) == (1, 0, 1, 0, 0, 0)
    assert np.allclose(js.norm_history, 1.0, atol=1e-12)


def test_guards():
    sp, model = _two_ancilla()
    start = [(1.0, basis_ket(sp, "0,10"), 0)]
    with pytest.raises(ValueError, match="budget"):
        jump_sim.jump_expand(model, start, 0.1, 9)
    with pytest.raises(ValueError, match="normalized"):
        jump_sim.jump_expand(model, [(0.5, basis_ket(sp, "0,10"), 0)], 0.1, 1)
    with pytest.raises(ValueError, match="lowering"):
        jump_sim.jump_expand((np.zeros((8, 8)), [(1.0, np.eye(8) * 0.5)]), start, 0.1, 1)
    with pytest.raises(ValueError, match="splitting"):
        jump_sim.jump_expand(model, start, 0.1, 1, splitting="yoshida")


def test_phase_matching_forms():
    args = (1.1, 0.2, 0.6, 0.3, 0.4)
    rep = jump_sim.phase_matching_report(*args, T=0.7)
    assert rep["modulus_error"] < 1e-12
    assert rep["sign_discrepancy"]
    assert rep["integrand_form"] == pytest.approx(rep["quadrature"], abs=1e-12)
    assert rep["closed_form"] == pytest.approx(np.conj(rep["integrand_form"]) * np.exp(2j * (1.1 - 0.2) * 0.7))
    same = jump_sim.phase_matching_report(1.0, 0.5, 0.3, -0.2, 0.4)
    assert same["detuning"] == 0 and not same["sign_discrepancy"]
    with pytest.raises(ValueError):
        jump_sim.phase_matching_factor(1, 0, 0, 0, 0.0)


def test_amplitude_damping_steps():
    sp = HilbertSpace.qubits(0, 1)
    model = (np.zeros((2, 2)), [(1.0, single_site_op(sp, 0, "minus"))])
    dt = 0.1
    js = jump_sim.jump_expand(model, [(1.0, basis_ket(sp, "1"), 0)], dt, 7)
    assert jump_sim.reduce_to_system(js)[1, 1].real == pytest.approx(np.exp(-2 * 7 * dt), abs=1e-12)


def test_zero_steps_and_product_states():
    sp, model = _two_ancilla()
    a, b = np.sqrt(0.3), np.sqrt(0.7)
    js = jump_sim.jump_expand(model, [(a, basis_ket(sp, "0,10"), "x"), (b, basis_ket(sp, "1,01"), "y")], 0.1, 0)
    ref = 0.3 * projector(basis_ket(sp, "0,10")) + 0.7 * projector(basis_ket(sp, "1,01"))
    np.testing.assert_allclose(jump_sim.reduce_to_system(js), ref, atol=1e-15)
    js = jump_sim.jump_expand(model, [(1.0, basis_ket(sp, "0,00"), 0)], 0.1, 2)
    rho = jump_sim.reduce_to_system(js)
    assert np.trace(rho @ rho).real == pytest.approx(1.0)


@pytest.mark.parametrize("name", ["setA", "setB", "setC", "setA_asym", "setC_fastmix"])
def test_oracle_on_bundled_models(name):
    m = models.load_model(name)
    psi = models.default_psi(m)
    rho0 = projector(m.error_set[1] @ psi)
    err = _errors(m, rho0, 1.0, [2, 4, 8], "strang")
    assert np.all(np.log2(err[:-1] / err[1:]) >= 1)


def test_phase_matching_unit_detuning():
    assert abs(jump_sim.phase_matching_factor(1.0, 0.0, 0.0, 0.0, 1.0)) == pytest.approx(1 / np.sqrt(2))
    q = jump_sim.phase_matching_quadrature(1.0, 0.0, 0.0, 0.0, 1.0)
    assert q == pytest.approx(jump_sim.phase_matching_integrand_form(1.0, 0.0, 0.0, 0.0, 1.0), abs=1e-12)
