"""Liouville-space generators, their spectra, and density-matrix propagation.

Vectorization is column stacking: ``vec(rho)[i + j*D] == rho[i, j]``, so
``vec(A X B) == kron(B.T, A) @ vec(X)``.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .core_ops import is_hermitian, validate_density_matrix

log = logging.getLogger(__name__)

ZERO_EIG_TOL = 1e-9
CLUSTER_TOL = 1e-8


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape(dim, dim, order="F")


@dataclass(frozen=True)
class Generator:
    matrix: np.ndarray
    hamiltonian: np.ndarray
    collapse_terms: tuple[tuple[float, np.ndarray], ...] = ()

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def build_generator(hamiltonian: np.ndarray, collapse: Sequence[tuple[float, np.ndarray]] = ()) -> Generator:
    """Superoperator for d(rho)/dt = -i[H, rho] - sum c (L'L rho + rho L'L - 2 L rho L').

    Each collapse term is ``(rate, L)``; ``L'L`` is formed here, so ``L`` is
    the lowering operator itself (``I_{n,-}`` for a cooled ancilla).
    """
    H = np.asarray(hamiltonian, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got {H.shape}")
    if not is_hermitian(H):
        raise ValueError("Hamiltonian is not Hermitian")
    D = H.shape[0]
    eye = np.eye(D)
    G = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    terms = []
    for rate, L in collapse:
        L = np.asarray(L, dtype=complex)
        if L.shape != H.shape:
            raise ValueError(f"collapse operator shape {L.shape} != Hamiltonian shape {H.shape}")
        if rate < 0:
            raise ValueError(f"negative rate {rate}")
        LdL = L.conj().T @ L
        G = G - rate * (np.kron(eye, LdL) + np.kron(LdL.T, eye) - 2 * np.kron(L.conj(), L))
        terms.append((float(rate), L))
    return Generator(G, H, tuple(terms))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues with right vectors (columns of ``right``) and left
    vectors (rows of ``left``) normalized so that ``left @ right == I``."""

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    well_conditioned: bool
    biorthogonality_error: float
    reconstruction_error: float
    min_gap: float

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))


class DegradedDecompositionError(RuntimeError):
    pass


def spectral_decompose(gen: Generator | np.ndarray) -> SpectralDecomposition:
    G = gen.matrix if isinstance(gen, Generator) else np.asarray(gen, dtype=complex)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError(f"generator must be square, got {G.shape}")
    try:
        lam, vl, vr = sla.eig(G, left=True, right=True)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed: {exc}") from exc
    order = np.lexsort((lam.imag, -lam.real))
    lam, vl, vr = lam[order], vl[:, order], vr[:, order]
    vr = vr / np.linalg.norm(vr, axis=0)
    left = vl.conj().T
    pair = np.einsum("ij,ji->i", left, vr)
    tiny = np.abs(pair) < 1e-300
    left = left / np.where(tiny, 1.0, pair)[:, None]

    n = len(lam)
    gaps = np.abs(lam[:, None] - lam[None, :]) + np.diag(np.full(n, np.inf))
    min_gap = float(gaps.min()) if n > 1 else np.inf
    scale = max(1.0, float(np.max(np.abs(lam))))
    bi_err = float(np.max(np.abs(left @ vr - np.eye(n))))
    norm = max(np.linalg.norm(G), 1e-300)
    recon = float(np.linalg.norm(G - (vr * lam) @ left) / norm)
    good = bool(min_gap > CLUSTER_TOL * scale and bi_err < 1e-8 and recon < 1e-8 and not tiny.any())
    return SpectralDecomposition(lam, vr, left, good, bi_err, recon, min_gap)


def _finish(rho_vec: np.ndarray, dim: int, t: float) -> np.ndarray:
    rho = unvec(rho_vec, dim)
    herm_dev = np.max(np.abs(rho - rho.conj().T))
    if herm_dev > 1e-9:
        raise FloatingPointError(f"propagated state lost Hermiticity at t={t}: {herm_dev:.3g}")
    tr = np.trace(rho)
    if abs(tr - 1) > 1e-9:
        raise FloatingPointError(f"propagated state lost trace at t={t}: {tr}")
    return (rho + rho.conj().T) / 2


def propagate(gen: Generator, rho0: np.ndarray, times: Sequence[float]) -> list[np.ndarray]:
    """rho(t) = exp(G t) rho0 for every t, each via a fresh matrix exponential."""
    rho0 = validate_density_matrix(rho0, gen.dim)
    v0 = vec(rho0)
    out = []
    for t in times:
        if t == 0:
            out.append(rho0.copy())
            continue
        out.append(_finish(sla.expm(gen.matrix * t) @ v0, gen.dim, t))
    return out


def propagator(gen: Generator, t: float) -> np.ndarray:
    return sla.expm(gen.matrix * t)


def evolve_via_spectrum(decomp: SpectralDecomposition, rho0: np.ndarray, t: float) -> np.ndarray:
    """sum_n r_n (l_n . rho0) exp(lambda_n t)."""
    if not decomp.well_conditioned:
        raise DegradedDecompositionError(
            f"eigenvalues cluster (min gap {decomp.min_gap:.2g}); use propagate() instead"
        )
    dim = int(round(np.sqrt(len(decomp.eigenvalues))))
    rho0 = validate_density_matrix(rho0, dim)
    if t == 0:
        return rho0.copy()
    coeff = (decomp.left @ vec(rho0)) * np.exp(decomp.eigenvalues * t)
    return _finish(decomp.right @ coeff, dim, t)


def stable_states(decomp: SpectralDecomposition, tol: float = ZERO_EIG_TOL) -> list[tuple[complex, np.ndarray]]:
    """Eigenpairs with |Re lambda| < tol * spectral radius."""
    cut = tol * decomp.spectral_radius
    return [
        (complex(lam), decomp.right[:, k])
        for k, lam in enumerate(decomp.eigenvalues)
        if abs(lam.real) < cut
    ]


def slowest_decay(decomp: SpectralDecomposition, tol: float = ZERO_EIG_TOL) -> float:
    """Least negative nonzero real part; this sets the asymptotic repair rate."""
    re = decomp.eigenvalues.real
    nz = re[np.abs(re) >= tol * decomp.spectral_radius]
    if nz.size == 0:
        return 0.0
    return float(nz.max())


def repair_horizon(gen: Generator, e_folds: float = 20.0) -> float:
    """Time after which the slowest decaying mode has shrunk by exp(-e_folds)."""
    rate = slowest_decay(spectral_decompose(gen))
    if rate == 0:
        raise ValueError("generator has no decaying modes")
    return e_folds / abs(rate)


def settling_time(
    gen: Generator,
    rho0: np.ndarray,
    observable: Callable[[np.ndarray], float],
    threshold: float,
    t_max: float | None = None,
    n_grid: int = 400,
    rtol: float = 1e-6,
) -> float:
    """Last time ``observable(rho(t))`` crosses down through ``threshold``.

    The trajectory is scanned on a uniform grid up to ``t_max`` (default: the
    20 e-fold repair horizon) and the final crossing refined by bisection.
    Returns ``inf`` if the observable is still above threshold at ``t_max``.
    """
    t_max = repair_horizon(gen) if t_max is None else t_max
    dt = t_max / n_grid
    step = sla.expm(gen.matrix * dt)
    v = vec(validate_density_matrix(rho0, gen.dim))
    values = []
    for _ in range(n_grid + 1):
        values.append(observable(unvec(v, gen.dim)))
        v = step @ v
    values = np.asarray(values)
    above = np.nonzero(values >= threshold)[0]
    if above.size == 0:
        return 0.0
    k = above[-1]
    if k == n_grid:
        return np.inf
    lo, hi = k * dt, (k + 1) * dt
    v0 = vec(rho0)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        val = observable(unvec(sla.expm(gen.matrix * mid) @ v0, gen.dim))
        if val >= threshold:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass
class Trajectory:
    """Time grid plus named observable columns, exportable as CSV."""

    times: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, name: str, values) -> None:
        values = np.asarray(values)
        if np.iscomplexobj(values):
            self.columns[f"re_{name}"] = values.real
            self.columns[f"im_{name}"] = values.imag
        else:
            self.columns[name] = values

    def write_csv(self, fh, metadata: Sequence[str] = ()) -> None:
        for line in metadata:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        names = list(self.columns)
        writer.writerow(["t", *names])
        for i, t in enumerate(self.times):
            writer.writerow([_fmt(t), *(_fmt(self.columns[n][i]) for n in names)])


def _fmt(x) -> str:
    return format(float(x), ".12g")
