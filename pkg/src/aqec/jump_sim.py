"""Deterministic quantum-jump expansion with explicit bath registers.

Every cooled collapse channel gets a fresh two-level bath register at every
time step. The full pure state of system + environment + registers is kept
as a ``(dim, n_columns)`` amplitude table: rows are system basis states,
columns enumerate (environment frame vector, register pattern). Tracing
out everything but the system is then ``amp @ amp.conj().T``.

Also home to the closed-form phase-matching factor and its quadrature check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np
import scipy.integrate as si
import scipy.linalg as sla

from .models import AqecModel

log = logging.getLogger(__name__)

REGISTER_BUDGET = 16
NORM_TOL = 1e-10


@dataclass
class JumpState:
    """Amplitude table after ``step_count`` steps of size ``dt``.

    ``registers[k] = (step, channel)`` records which step and collapse
    channel wrote register k; register k is bit k of the column index
    above the environment block (column = env + n_env * pattern).
    """

    amplitudes: np.ndarray
    n_env: int
    dt: float
    step_count: int
    registers: list[tuple[int, int]] = field(default_factory=list)
    norm_history: list[float] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def register_pattern(self, column: int) -> tuple[int, ...]:
        pattern = column // self.n_env
        return tuple((pattern >> k) & 1 for k in range(len(self.registers)))


def environment_frame(labels: Sequence[Hashable], overlaps: Mapping | np.ndarray | None = None) -> tuple[list, np.ndarray]:
    """Express (possibly non-orthogonal) environment tags in an orthonormal frame.

    Returns the distinct labels and a matrix F with F[:, k] the coordinates
    of tag k, so that F^dag F reproduces the declared overlap matrix.
    ``overlaps`` is either an (n, n) Gram matrix over the distinct labels in
    first-seen order, or a mapping ``{(label_a, label_b): <e_a|e_b>}``.
    """
    uniq = list(dict.fromkeys(labels))
    n = len(uniq)
    G = np.eye(n, dtype=complex)
    if isinstance(overlaps, Mapping):
        pos = {lab: k for k, lab in enumerate(uniq)}
        for (a, b), v in overlaps.items():
            G[pos[a], pos[b]] = v
            G[pos[b], pos[a]] = np.conj(v)
    elif overlaps is not None:
        G = np.asarray(overlaps, dtype=complex)
    w, V = np.linalg.eigh(G)
    if w.min() < -1e-10:
        raise ValueError("environment overlaps are not a valid Gram matrix")
    keep = w > 1e-12
    F = np.sqrt(w[keep])[:, None] * V[:, keep].conj().T
    return uniq, F


def _channels(model_or_terms) -> tuple[np.ndarray, list[tuple[float, np.ndarray]]]:
    if isinstance(model_or_terms, AqecModel):
        H, terms = model_or_terms.hamiltonian, model_or_terms.collapse_terms
    else:
        H, terms = model_or_terms
    cooled = [(float(c), np.asarray(L, dtype=complex)) for c, L in terms if c > 0]
    for c, L in cooled:
        P = L.conj().T @ L
        if np.max(np.abs(P @ P - P)) > 1e-12 or np.max(np.abs(L @ L)) > 1e-12:
            raise ValueError("jump channels must be lowering operators (L^dag L a projector, L^2 = 0)")
    return np.asarray(H, dtype=complex), cooled


def jump_expand(
    model,
    branches: Sequence[tuple[complex, np.ndarray, Hashable]],
    dt: float,
    n_steps: int,
    env_overlaps=None,
    splitting: str = "strang",
) -> JumpState:
    """Expand the dissipative dynamics into explicit bath-register branches.

    ``model`` is an :class:`AqecModel` or a ``(H, collapse_terms)`` pair.
    Each branch is ``(amplitude, system_state, environment_label)``; branches
    sharing a label share an environment state, distinct labels are
    orthogonal unless ``env_overlaps`` says otherwise.

    Each step applies free evolution and then, for every cooled channel
    (rate c, lowering L), moves a fraction sqrt(1 - exp(-2 c dt)) of the
    excited amplitude into a new bath register. ``splitting="strang"``
    splits the free evolution symmetrically around the jump (second order
    in dt); ``"lie"`` applies a full free step before each jump.
    """
    H, cooled = _channels(model)
    if n_steps * len(cooled) > REGISTER_BUDGET:
        raise ValueError(
            f"{n_steps} steps x {len(cooled)} channels exceeds the register budget of {REGISTER_BUDGET}"
        )
    if splitting not in ("strang", "lie"):
        raise ValueError(f"unknown splitting {splitting!r}")
    labels, F = environment_frame([b[2] for b in branches], env_overlaps)
    pos = {lab: k for k, lab in enumerate(labels)}
    amp = np.zeros((H.shape[0], F.shape[0]), dtype=complex)
    for a, state, lab in branches:
        amp += a * np.outer(np.asarray(state, dtype=complex).ravel(), F[:, pos[lab]])
    norm = np.linalg.norm(amp)
    if abs(norm - 1) > NORM_TOL:
        raise ValueError(f"branch amplitudes are not normalized (norm {norm:.12g})")

    js = JumpState(amp, F.shape[0], dt, 0, [], [float(norm)])
    if n_steps == 0:
        return js

    if splitting == "strang":
        U_first = U_last = sla.expm(-0.5j * dt * H)
        U_mid = U_first @ U_first
    else:
        U_first, U_mid, U_last = sla.expm(-1j * dt * H), sla.expm(-1j * dt * H), None
    kraus = []
    for c, L in cooled:
        keep = np.eye(H.shape[0]) - (1 - np.exp(-c * dt)) * (L.conj().T @ L)
        kraus.append((keep, np.sqrt(-np.expm1(-2 * c * dt)) * L))

    for step in range(n_steps):
        amp = (U_first if step == 0 else U_mid) @ amp
        for ch, (K0, K1) in enumerate(kraus):
            amp = np.concatenate([K0 @ amp, K1 @ amp], axis=1)
            js.registers.append((step, ch))
        if U_last is not None and step == n_steps - 1:
            amp = U_last @ amp
        norm = float(np.linalg.norm(amp))
        js.norm_history.append(norm)
        if abs(norm - 1) > NORM_TOL:
            raise FloatingPointError(f"norm drift {norm - 1:.3g} at step {step}")
    js.amplitudes = amp
    js.step_count = n_steps
    return js


def reduce_to_system(js: JumpState) -> np.ndarray:
    """Partial trace over environment tags and every bath register."""
    a = js.amplitudes
    rho = a @ a.conj().T
    return (rho + rho.conj().T) / 2


def bath_record(js: JumpState, psi: np.ndarray) -> np.ndarray:
    """Amplitude of ``psi`` conditioned on every (environment, register) column."""
    return np.asarray(psi, dtype=complex).conj() @ js.amplitudes


def bath_overlap(js: JumpState, psi_i: np.ndarray, psi_j: np.ndarray) -> complex:
    """Normalized inner product of the bath records of two codewords.

    Its magnitude is the fraction of the codeword coherence that survives:
    1 when the bath cannot tell the codewords apart, 0 when their
    excitation patterns are orthogonal.
    """
    vi, vj = bath_record(js, psi_i), bath_record(js, psi_j)
    ni, nj = np.linalg.norm(vi), np.linalg.norm(vj)
    if ni == 0 or nj == 0:
        return 0j
    return complex(np.vdot(vj, vi) / (ni * nj))


# --- phase matching ----------------------------------------------------------


def phase_matching_factor(w0: float, w1: float, w2: float, w3: float, gamma: float, T: float = 0.0) -> complex:
    """Closed form exp(i(w0-w1)T) gamma / (gamma - i(w0 - w1 - w2 + w3)) as printed."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    delta = w0 - w1 - w2 + w3
    return complex(np.exp(1j * (w0 - w1) * T) * gamma / (gamma - 1j * delta))


def phase_matching_integrand_form(w0: float, w1: float, w2: float, w3: float, gamma: float, T: float = 0.0) -> complex:
    """Analytic value of the integral of conj(c0) c1 over [0, inf).

    Differs from :func:`phase_matching_factor` only by the sign of the
    detuning in the denominator; the moduli agree.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    delta = w0 - w1 - w2 + w3
    return complex(np.exp(1j * (w0 - w1) * T) * gamma / (gamma + 1j * delta))


def phase_matching_quadrature(w0: float, w1: float, w2: float, w3: float, gamma: float, T: float = 0.0) -> complex:
    """Adaptive quadrature of conj(c0(t)) c1(t) over [0, inf) with

    c0(t) = sqrt(gamma) exp(-i(w2 t + w0 (T - t)) - gamma t / 2)
    c1(t) = sqrt(gamma) exp(-i(w3 t + w1 (T - t)) - gamma t / 2)
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    # conj(c0) c1 = gamma exp(i (w0 - w1) T) exp(i nu t - gamma t), nu = w2 - w0 - w3 + w1
    nu = w2 - w0 - w3 + w1
    decay = lambda t: gamma * np.exp(-gamma * t)
    # finite-interval oscillatory rule; the dropped tail is below exp(-40)
    end = 40.0 / gamma
    kw = dict(epsabs=1e-15, epsrel=1e-13, limit=400)
    if nu == 0:
        re, im = si.quad(decay, 0, end, **kw)[0], 0.0
    else:
        re = si.quad(decay, 0, end, weight="cos", wvar=nu, **kw)[0]
        im = si.quad(decay, 0, end, weight="sin", wvar=nu, **kw)[0]
    return complex(np.exp(1j * (w0 - w1) * T) * (re + 1j * im))


def phase_matching_report(w0, w1, w2, w3, gamma, T=0.0) -> dict:
    printed = phase_matching_factor(w0, w1, w2, w3, gamma, T)
    quad = phase_matching_quadrature(w0, w1, w2, w3, gamma, T)
    return {
        "detuning": w0 - w1 - w2 + w3,
        "closed_form": printed,
        "integrand_form": phase_matching_integrand_form(w0, w1, w2, w3, gamma, T),
        "quadrature": quad,
        "modulus_error": abs(abs(printed) - abs(quad)),
        "sign_discrepancy": abs(printed - quad) > 1e-8,
    }
