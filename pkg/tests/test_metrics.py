import numpy as np
import pytest

from aqec import metrics, models
from aqec.core_ops import projector


def test_linear_entropy():
    assert metrics.linear_entropy(projector(np.array([1, 1j]) / np.sqrt(2))) == pytest.approx(0, abs=1e-15)
    assert metrics.linear_entropy(np.eye(4) / 4) == pytest.approx(0.75)


def test_coherence_sign_convention():
    m = models.load_model("setA")
    rho = projector(models.default_psi(m))
    c01 = metrics.codeword_coherence(rho, m.codewords)
    assert c01 == pytest.approx(0.5 * np.exp(-1j * np.pi / 3))
    assert metrics.codeword_coherence(rho, m.codewords, 1, 0) == pytest.approx(np.conj(c01))
    with pytest.raises(IndexError):
        metrics.codeword_coherence(rho, m.codewords, 0, 2)


def test_trajectory_columns():
    m = models.load_model("setA")
    rho = projector(models.default_psi(m))
    cols = metrics.trajectory_columns([rho, rho], m.codewords)
    assert set(cols) == {"S_lin", "pop_cw0", "pop_cw1", "re_coh", "im_coh", "abs_coh", "arg_coh"}
    np.testing.assert_allclose(cols["pop_cw0"], 0.5)
    np.testing.assert_allclose(cols["arg_coh"], -np.pi / 3)
    assert metrics.fidelity_pure(rho, models.default_psi(m)) == pytest.approx(1.0)


def test_spec_values():
    assert metrics.linear_entropy(np.eye(2) / 2) == pytest.approx(0.5)
    phi = np.array([1, 0, 0], complex)
    sigma = np.diag([0, 0.5, 0.5])
    assert metrics.fidelity_pure(0.3 * projector(phi) + 0.7 * sigma, phi) == pytest.approx(0.3)
    assert metrics.fidelity_pure(projector(np.array([0, 1, 0])), phi) == 0
