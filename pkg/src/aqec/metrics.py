"""Observables on density matrices: purity loss, codeword populations and coherences."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def linear_entropy(rho: np.ndarray) -> float:
    """tr(rho) - tr(rho^2); zero exactly for pure states."""
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho) - np.einsum("ij,ji->", rho, rho)))


def codeword_populations(rho: np.ndarray, codewords: Sequence[np.ndarray]) -> np.ndarray:
    return np.array([np.real(np.vdot(psi, rho @ psi)) for psi in codewords])


def codeword_coherence(rho: np.ndarray, codewords: Sequence[np.ndarray], i: int = 0, j: int = 1) -> complex:
    """<psi_i| rho |psi_j>.

    For rho = |Psi><Psi| with Psi = a psi_0 + b psi_1 this is a * conj(b), so
    a relative phase exp(i phi) on psi_1 shows up here as exp(-i phi).
    """
    n = len(codewords)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"codeword index out of range for {n} codewords")
    return complex(np.vdot(codewords[i], rho @ codewords[j]))


def fidelity_pure(rho: np.ndarray, phi: np.ndarray) -> float:
    phi = np.asarray(phi).ravel()
    return float(np.real(np.vdot(phi, rho @ phi)))


def trajectory_columns(rhos: Sequence[np.ndarray], codewords: Sequence[np.ndarray]) -> dict[str, np.ndarray]:
    """The standard per-time metric columns used in repair CSVs."""
    s_lin = np.array([linear_entropy(r) for r in rhos])
    pops = np.array([codeword_populations(r, codewords) for r in rhos])
    cols = {"S_lin": s_lin}
    for k in range(pops.shape[1]):
        cols[f"pop_cw{k}"] = pops[:, k]
    if len(codewords) >= 2:
        coh = np.array([codeword_coherence(r, codewords, 0, 1) for r in rhos])
        cols.update(
            re_coh=coh.real,
            im_coh=coh.imag,
            abs_coh=np.abs(coh),
            arg_coh=np.angle(coh),
        )
    return cols
