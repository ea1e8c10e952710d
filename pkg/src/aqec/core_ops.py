"""Labeled tensor-product Hilbert spaces and the spin-1/2 operator algebra.

Operators are plain dense ``numpy`` arrays. Basis ordering: site 0 is the most
significant digit of the computational-basis index, so the bit string
``"10"`` is index 2. A basis label groups consecutive sites that share a role
tag and separates groups with commas, e.g. ``"000,10"`` for three system
spins followed by two ancillas.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
DENSITY_EIG_TOL = 1e-10
TRACE_TOL = 1e-10

# 2x2 generators in the {|0>, |1>} basis; |1> is alpha (spin up)
_ALPHA = np.array([[0, 0], [0, 1]], dtype=complex)
_BETA = np.array([[1, 0], [0, 0]], dtype=complex)
_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)

SITE_OPS = {
    "alpha": _ALPHA,
    "beta": _BETA,
    "plus": _PLUS,
    "minus": _MINUS,
    "x": (_PLUS + _MINUS) / 2,
    "y": (_PLUS - _MINUS) / 2j,
    "z": (_ALPHA - _BETA) / 2,
    "id": np.eye(2, dtype=complex),
}


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered tensor product of sites.

    ``site_labels`` carries a role tag per site (``"S"`` for system,
    ``"A"`` for ancilla); it controls how basis labels are grouped.
    """

    site_dims: tuple[int, ...]
    site_labels: tuple[str, ...] = ()

    def __post_init__(self):
        dims = tuple(int(d) for d in self.site_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid site dimensions {self.site_dims!r}")
        object.__setattr__(self, "site_dims", dims)
        labels = tuple(self.site_labels) or ("S",) * len(dims)
        if len(labels) != len(dims):
            raise ValueError("site_labels and site_dims differ in length")
        object.__setattr__(self, "site_labels", labels)

    @classmethod
    def qubits(cls, n_system: int, n_ancilla: int = 0) -> "HilbertSpace":
        return cls((2,) * (n_system + n_ancilla), ("S",) * n_system + ("A",) * n_ancilla)

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.site_dims))

    def bits(self, label: str) -> str:
        bits = label.replace(",", "").replace(" ", "")
        if len(bits) != self.n_sites or any(b not in "01" for b in bits):
            raise ValueError(f"label {label!r} does not match a {self.n_sites}-site qubit space")
        return bits

    def index(self, label: str) -> int:
        return int(self.bits(label), 2)

    def label(self, index: int) -> str:
        if not 0 <= index < self.total_dim:
            raise IndexError(index)
        bits = format(index, f"0{self.n_sites}b")
        out = []
        for k, b in enumerate(bits):
            if k > 0 and self.site_labels[k] != self.site_labels[k - 1]:
                out.append(",")
            out.append(b)
        return "".join(out)

    def labels(self) -> list[str]:
        return [self.label(i) for i in range(self.total_dim)]


def _check_qubit_site(space: HilbertSpace, site: int) -> None:
    if not 0 <= site < space.n_sites:
        raise IndexError(f"site {site} out of range for {space.n_sites} sites")
    if space.site_dims[site] != 2:
        raise ValueError(f"site {site} has dimension {space.site_dims[site]}, expected a qubit")


def single_site_op(space: HilbertSpace, site: int, kind: str) -> np.ndarray:
    """Embed the 2x2 generator ``kind`` at ``site``, identity elsewhere."""
    _check_qubit_site(space, site)
    try:
        op = SITE_OPS[kind]
    except KeyError:
        raise ValueError(f"unknown operator kind {kind!r}") from None
    factors = [np.eye(d, dtype=complex) for d in space.site_dims]
    factors[site] = op
    return reduce(np.kron, factors)


def embed_product(space: HilbertSpace, factors: Iterable[tuple[int, str]]) -> np.ndarray:
    """Product of single-site operators on distinct sites."""
    factors = list(factors)
    sites = [s for s, _ in factors]
    if len(set(sites)) != len(sites):
        raise ValueError(f"repeated site in {factors!r}")
    out = np.eye(space.total_dim, dtype=complex)
    for site, kind in factors:
        out = out @ single_site_op(space, site, kind)
    return out


def basis_ket(space: HilbertSpace, label: str) -> np.ndarray:
    ket = np.zeros(space.total_dim, dtype=complex)
    ket[space.index(label)] = 1.0
    return ket


def projector(ket: np.ndarray) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex).ravel()
    return np.outer(ket, ket.conj())


def restrict(op: np.ndarray, space: HilbertSpace, labels: Sequence[str]) -> np.ndarray:
    """Matrix elements of ``op`` between the listed basis states only."""
    idx = [space.index(lab) for lab in labels]
    return np.asarray(op)[np.ix_(idx, idx)]


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def is_hermitian(op: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    op = np.asarray(op)
    return op.ndim == 2 and op.shape[0] == op.shape[1] and np.max(np.abs(op - op.conj().T)) <= tol


def validate_density_matrix(rho: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, PSD and unit trace."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise ValueError(f"density matrix has dimension {rho.shape[0]}, expected {dim}")
    herm_dev = np.max(np.abs(rho - rho.conj().T))
    if herm_dev > 1e-10:
        raise ValueError(f"density matrix not Hermitian (deviation {herm_dev:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise ValueError(f"density matrix trace {tr} != 1")
    lo = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if lo < -DENSITY_EIG_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")
    return rho
