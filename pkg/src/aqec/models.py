"""Concrete error-correcting systems: single-codeword toy models, the
two-codeword spin-flip code on a 14-state basis, and corrupted initial states."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as sla

from .core_ops import HilbertSpace, embed_product, is_hermitian, restrict, single_site_op
from .liouville import Generator, build_generator

log = logging.getLogger(__name__)

CODEWORD_FUNNEL_LABELS = ("000,00", "001,00", "010,00", "100,00", "000,01", "000,10", "000,11")
PSD_REPORT_TOL = 1e-12


def mirror_label(label: str) -> str:
    """Flip every system bit of an ``"sss,aa"`` label, leaving ancillas alone."""
    s, a = label.split(",")
    return "".join("1" if b == "0" else "0" for b in s) + "," + a


@dataclass(frozen=True)
class AqecModel:
    """Hamiltonian, cooled collapse operators, codewords, errors and funnels.

    All matrices are expressed in the basis ``labels`` (a subset of the full
    tensor-product basis of ``space``, in the listed order).
    ``orthogonal_bath_modes`` records the modeling assumption that cooled
    degenerate transitions couple to orthogonal bath modes; it is declared,
    not derived.
    """

    space: HilbertSpace
    labels: tuple[str, ...]
    hamiltonian: np.ndarray
    collapse_terms: tuple[tuple[float, np.ndarray], ...]
    codewords: tuple[np.ndarray, ...]
    error_set: tuple[np.ndarray, ...]
    funnel_of: Mapping[int, tuple[str, ...]]
    name: str = ""
    orthogonal_bath_modes: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        bits = self.space.bits(label)
        for k, lab in enumerate(self.labels):
            if self.space.bits(lab) == bits:
                return k
        raise KeyError(label)

    def ket(self, label: str) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(label)] = 1
        return v

    def generator(self) -> Generator:
        return build_generator(self.hamiltonian, self.collapse_terms)

    def validate(self) -> "AqecModel":
        """Check codeword orthonormality, H-eigenstate property, funnel disjointness."""
        C = np.array(self.codewords).T
        gram_dev = np.max(np.abs(C.conj().T @ C - np.eye(C.shape[1])))
        if gram_dev > 1e-12:
            raise ValueError(f"codewords not orthonormal (deviation {gram_dev:.3g})")
        H = self.hamiltonian
        for n, psi in enumerate(self.codewords):
            e = np.vdot(psi, H @ psi)
            res = np.linalg.norm(H @ psi - e * psi)
            if res > 1e-10:
                raise ValueError(f"codeword {n} is not an eigenstate of H (residual {res:.3g})")
        seen: set[str] = set()
        for labs in self.funnel_of.values():
            bits = {self.space.bits(lab) for lab in labs}
            if bits & seen:
                raise ValueError("funnels overlap")
            seen |= bits
        return self


def spin_flip(space: HilbertSpace, site: int) -> np.ndarray:
    """Unitary bit flip (Pauli X, i.e. 2 I_x) at ``site``."""
    return 2 * single_site_op(space, site, "x")


def _check_rates(**rates):
    for name, value in rates.items():
        if value < 0:
            raise ValueError(f"rate {name}={value} is negative")


def toy_model_flip(d: float, r: float, c: float) -> AqecModel:
    """One system qubit S kept in |1>, one cooled ancilla A.

    H = r (I_{A,beta} + I_{A,alpha} I_{S,x}) + d (I_{S,alpha} + I_{S,beta} I_{A,x}).
    Site 0 is S, site 1 is A.
    """
    _check_rates(d=d, r=r, c=c)
    sp = HilbertSpace.qubits(1, 1)
    H = r * (single_site_op(sp, 1, "beta") + embed_product(sp, [(1, "alpha"), (0, "x")])) + d * (
        single_site_op(sp, 0, "alpha") + embed_product(sp, [(0, "beta"), (1, "x")])
    )
    return _single_codeword(sp, H, c, name=f"toy_flip(d={d}, r={r}, c={c})")


def toy_model_direct(
    omega00: float, omega01: float, omega10: float, omega11: float, mu: complex, c: float
) -> AqecModel:
    """Diagonal energies plus a single coupling mu between |0_S 0_A> and |1_S 1_A>."""
    _check_rates(c=c)
    sp = HilbertSpace.qubits(1, 1)
    H = np.diag([omega00, omega01, omega10, omega11]).astype(complex)
    H[0, 3] = mu
    H[3, 0] = np.conj(mu)
    return _single_codeword(sp, H, c, name=f"toy_direct(mu={mu}, c={c})")


def _single_codeword(sp: HilbertSpace, H: np.ndarray, c: float, name: str) -> AqecModel:
    codeword = np.zeros(4, dtype=complex)
    codeword[sp.index("1,0")] = 1
    return AqecModel(
        space=sp,
        labels=tuple(sp.labels()),
        hamiltonian=H,
        collapse_terms=((float(c), single_site_op(sp, 1, "minus")),),
        codewords=(codeword,),
        error_set=(np.eye(4, dtype=complex), spin_flip(sp, 0)),
        funnel_of={0: ("0,0", "0,1", "1,1")},
        name=name,
    ).validate()


def two_codeword_labels() -> tuple[str, ...]:
    return CODEWORD_FUNNEL_LABELS + tuple(mirror_label(lab) for lab in CODEWORD_FUNNEL_LABELS)


def two_codeword_model(
    block: np.ndarray,
    delta_omega: float = 0.0,
    c1: float = 1.0,
    c2: float = 1.0,
    second_block: np.ndarray | None = None,
    name: str = "two_codeword",
) -> AqecModel:
    """Codewords |000,00> and |111,00> protected against single spin flips.

    ``block`` is the 7x7 Hamiltonian on (codeword, three flip states, three
    excited-ancilla states) in the order of ``CODEWORD_FUNNEL_LABELS``. The
    mirrored block for |111,..> is ``block + delta_omega * I`` unless
    ``second_block`` overrides it (used for the broken-symmetry variants).
    """
    _check_rates(c1=c1, c2=c2)
    b1 = _check_block(block)
    b2 = b1 + delta_omega * np.eye(7) if second_block is None else _check_block(second_block)
    sp = HilbertSpace.qubits(3, 2)
    labels = two_codeword_labels()
    H = sla.block_diag(b1, b2)
    lower = [restrict(single_site_op(sp, site, "minus"), sp, labels) for site in (3, 4)]
    errors = [np.eye(14, dtype=complex)] + [restrict(spin_flip(sp, k), sp, labels) for k in range(3)]
    e = np.eye(14, dtype=complex)
    return AqecModel(
        space=sp,
        labels=labels,
        hamiltonian=H,
        collapse_terms=((float(c1), lower[0]), (float(c2), lower[1])),
        codewords=(e[0], e[7]),
        error_set=tuple(errors),
        funnel_of={0: labels[1:7], 1: labels[8:14]},
        name=name,
        meta={"delta_omega": delta_omega, "block": b1, "second_block": b2},
    ).validate()


def _check_block(block) -> np.ndarray:
    b = np.asarray(block, dtype=complex)
    if b.shape != (7, 7):
        raise ValueError(f"block must be 7x7, got {b.shape}")
    if not is_hermitian(b):
        raise ValueError("block is not Hermitian")
    if np.any(np.abs(b[0, 1:]) > 0):
        raise ValueError("codeword row of the block must be decoupled from the funnel")
    return b


@dataclass(frozen=True)
class OverlapMatrix:
    """Branch weights p_n and normalized environment overlaps g_nm = <e_n|e_m>.

    The branch Gram matrix is G[n, m] = sqrt(p_n p_m) g_nm.
    """

    weights: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        g = np.asarray(self.g, dtype=complex)
        if w.ndim != 1 or g.shape != (w.size, w.size):
            raise ValueError("weights and overlap matrix sizes disagree")
        if np.any(w < 0):
            raise ValueError("negative branch weight")
        if w.sum() == 0:
            raise ValueError("all branch weights are zero")
        if abs(w.sum() - 1) > 1e-10:
            raise ValueError(f"branch weights sum to {w.sum()}, expected 1")
        if not is_hermitian(g, 1e-12) or np.max(np.abs(np.diag(g) - 1)) > 1e-12:
            raise ValueError("overlap matrix must be Hermitian with unit diagonal")
        if np.max(np.abs(g)) > 1 + 1e-12:
            raise ValueError("normalized overlaps must satisfy |g_nm| <= 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "g", g)

    @classmethod
    def orthogonal(cls, weights: Sequence[float]) -> "OverlapMatrix":
        return cls(np.asarray(weights, float), np.eye(len(weights), dtype=complex))

    @classmethod
    def from_dict(cls, d: Mapping) -> "OverlapMatrix":
        return cls(np.asarray(d["weights"], float), _complex_matrix(d["g"]))

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "g": _pairs(self.g)}

    def gram(self) -> np.ndarray:
        s = np.sqrt(self.weights)
        return np.outer(s, s) * self.g

    def psd_gram(self) -> tuple[np.ndarray, float]:
        """Nearest PSD unit-trace Gram matrix and the Frobenius distance moved."""
        G = self.gram()
        w, V = np.linalg.eigh(G)
        if w.min() >= 0:
            return G, 0.0
        Gp = (V * np.clip(w, 0, None)) @ V.conj().T
        Gp /= np.real(np.trace(Gp))
        return Gp, float(np.linalg.norm(Gp - G))


def corrupted_state(psi: np.ndarray, errors: Sequence[np.ndarray], overlaps: OverlapMatrix) -> np.ndarray:
    """Reduced state of sum_n E_n|psi>|e_n> after tracing out the environment.

    rho = sum_{n,m} <e_m|e_n> E_n|psi><psi|E_m^dag, using the PSD-projected
    Gram matrix and renormalized to unit trace.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    if len(errors) != overlaps.weights.size:
        raise ValueError(f"{len(errors)} errors but {overlaps.weights.size} overlap branches")
    G, dist = overlaps.psd_gram()
    if dist > PSD_REPORT_TOL:
        log.warning("overlap Gram matrix projected onto PSD cone (distance %.3g)", dist)
    Phi = np.column_stack([np.asarray(E) @ psi for E in errors])
    rho = Phi @ G.T @ Phi.conj().T
    rho = (rho + rho.conj().T) / 2
    tr = np.real(np.trace(rho))
    if tr <= 0:
        raise ValueError("corrupted state has zero norm")
    return rho / tr


def default_psi(model: AqecModel, amplitudes=None) -> np.ndarray:
    if amplitudes is None:
        amplitudes = [1 / np.sqrt(2), np.exp(1j * np.pi / 3) / np.sqrt(2)]
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.size != len(model.codewords):
        raise ValueError("one amplitude per codeword required")
    psi = sum(a * cw for a, cw in zip(amps, model.codewords))
    return psi / np.linalg.norm(psi)


# --- configs -----------------------------------------------------------------


def _complex_matrix(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)


def _complex_vector(vals) -> np.ndarray:
    arr = np.asarray(vals, dtype=float)
    if arr.ndim == 2 and arr.shape[-1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    return arr.astype(complex)


def _pairs(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return np.stack([m.real, m.imag], axis=-1).tolist()


FIXTURES = ("setA", "setB", "setC", "setA_asym", "setC_fastmix", "overlaps_eq9")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("aqec") / "data" / f"{name}.json"))


def load_config(source: str | Path | Mapping) -> dict:
    """Read a JSON config from a path, a bundled fixture name, or a mapping."""
    if isinstance(source, Mapping):
        return dict(source)
    src = str(source)
    path = Path(src)
    if not path.exists() and src in FIXTURES:
        path = fixture_path(src)
    with open(path) as fh:
        return json.load(fh)


def model_from_config(cfg: Mapping) -> AqecModel:
    kind = cfg.get("kind", "two_codeword")
    if kind == "toy_flip":
        return toy_model_flip(cfg.get("d", 1.0), cfg.get("r", 1.0), cfg.get("c", 1.0))
    if kind == "toy_direct":
        w = cfg.get("omega", [0, 0, 0, 0])
        mu = cfg.get("mu", 1.0)
        mu = complex(*mu) if isinstance(mu, list) else complex(mu)
        return toy_model_direct(*w, mu=mu, c=cfg.get("c", 1.0))
    if kind == "two_codeword":
        second = cfg.get("second_block")
        return two_codeword_model(
            _complex_matrix(cfg["block"]),
            delta_omega=cfg.get("delta_omega", 0.0),
            c1=cfg.get("c1", 1.0),
            c2=cfg.get("c2", 1.0),
            second_block=None if second is None else _complex_matrix(second),
            name=cfg.get("name", "two_codeword"),
        )
    raise ValueError(f"unknown model kind {kind!r}")


def psi_from_config(model: AqecModel, cfg: Mapping) -> np.ndarray:
    amps = cfg.get("psi", {}).get("amplitudes")
    return default_psi(model, None if amps is None else _complex_vector(amps))


def load_model(name: str, **overrides) -> AqecModel:
    cfg = load_config(name)
    cfg.update(overrides)
    return model_from_config(cfg)


def load_overlaps(source: str | Path | Mapping = "overlaps_eq9") -> OverlapMatrix:
    cfg = load_config(source)
    return OverlapMatrix.from_dict(cfg.get("overlaps", cfg))


def model_to_config(model: AqecModel, psi_amplitudes=None, overlaps: OverlapMatrix | None = None) -> dict:
    """Inverse of ``model_from_config`` for two-codeword models."""
    cfg = {
        "kind": "two_codeword",
        "name": model.name,
        "block": _pairs(model.meta["block"]),
        "delta_omega": model.meta.get("delta_omega", 0.0),
        "c1": model.collapse_terms[0][0],
        "c2": model.collapse_terms[1][0],
    }
    b1, b2 = model.meta["block"], model.meta["second_block"]
    if not np.allclose(b2 - b1, cfg["delta_omega"] * np.eye(7), atol=0, rtol=0):
        cfg["second_block"] = _pairs(b2)
    if psi_amplitudes is not None:
        cfg["psi"] = {"amplitudes": _pairs(np.asarray(psi_amplitudes, dtype=complex))}
    if overlaps is not None:
        cfg["overlaps"] = overlaps.to_dict()
    return cfg
