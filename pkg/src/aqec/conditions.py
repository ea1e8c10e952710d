"""Checks for the sufficient conditions of dissipative (automatic) error correction.

Each check returns a :class:`ConditionReport`. A failing report always
carries at least one witness whose magnitude exceeds the tolerance.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .models import AqecModel

CONDITION_IDS = ("LINDBLAD", "KL", "DFS", "FUNNEL_PARTITION", "DRAINAGE", "SYMMETRY")
DEFAULT_TOL = 1e-10
PERMUTATION_LIMIT = 4


@dataclass(frozen=True)
class Witness:
    where: str
    magnitude: float


@dataclass
class ConditionReport:
    condition_id: str
    passed: bool
    witnesses: list[Witness] = field(default_factory=list)
    tol: float = DEFAULT_TOL
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict
        out["details"] = _jsonable(self.details)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _report(cid: str, witnesses: list[Witness], tol: float, **details) -> ConditionReport:
    bad = [w for w in witnesses if w.magnitude > tol]
    return ConditionReport(cid, not bad, bad, tol, details)


def reports_to_json(reports: Iterable[ConditionReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)


# --- condition (1): declared -------------------------------------------------


def check_lindblad_declared(model: AqecModel, tol: float = DEFAULT_TOL) -> ConditionReport:
    """Markovian Lindblad form with orthogonal bath modes is an assumption; only its declaration is checked."""
    w = [] if model.orthogonal_bath_modes else [Witness("orthogonal_bath_modes not declared", 1.0)]
    return _report("LINDBLAD", w, tol, collapse_terms=len(model.collapse_terms))


# --- condition (2): Knill-Laflamme -------------------------------------------


def check_kl(codewords: Sequence[np.ndarray], error_set: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> ConditionReport:
    """<psi_i|E_a^dag E_b|psi_j> = C_ab delta_ij for every error pair."""
    psis = [np.asarray(p, dtype=complex).ravel() for p in codewords]
    imgs = np.array([[E @ p for p in psis] for E in error_set])  # (a, i, dim)
    M = np.einsum("aid,bjd->ijab", imgs.conj(), imgs)
    witnesses = []
    n = len(psis)
    for i, j in itertools.product(range(n), repeat=2):
        ref = M[0, 0]
        diff = M[i, j] if i != j else M[i, i] - ref
        a, b = np.unravel_index(np.argmax(np.abs(diff)), diff.shape)
        mag = float(np.abs(diff[a, b]))
        kind = "overlap" if i != j else "C mismatch"
        witnesses.append(Witness(f"{kind} <psi_{i}|E_{a}^dag E_{b}|psi_{j}>", mag))
    rep = _report("KL", witnesses, tol)
    if rep.passed:
        rep.details["C"] = M[0, 0]
    return rep


# --- condition (3): decoherence-free codewords -------------------------------


def check_dfs(model: AqecModel, tol: float = DEFAULT_TOL) -> ConditionReport:
    witnesses = []
    H = model.hamiltonian
    for n, psi in enumerate(model.codewords):
        for k, (rate, L) in enumerate(model.collapse_terms):
            if rate > 0:
                witnesses.append(Witness(f"|L_{k} psi_{n}|", float(np.linalg.norm(L @ psi))))
        e = np.vdot(psi, H @ psi)
        witnesses.append(Witness(f"|H psi_{n} - E psi_{n}|", float(np.linalg.norm(H @ psi - e * psi))))
    return _report("DFS", witnesses, tol)


# --- condition (4): funnels --------------------------------------------------


def _sectors(model: AqecModel, tol: float) -> list[np.ndarray]:
    out = []
    for n, psi in enumerate(model.codewords):
        idx = set(np.nonzero(np.abs(psi) > tol)[0].tolist())
        idx |= {model.index(lab) for lab in model.funnel_of.get(n, ())}
        out.append(np.array(sorted(idx)))
    return out


def _flow_graph(model: AqecModel, tol: float) -> np.ndarray:
    """adj[a, b] True if amplitude can move from basis state b to a."""
    H = model.hamiltonian
    adj = (np.abs(H) > tol) | (np.abs(H.T) > tol)
    for rate, L in model.collapse_terms:
        if rate > 0:
            adj |= np.abs(L) > tol
    np.fill_diagonal(adj, False)
    return adj


def _reachable(adj: np.ndarray, start: Iterable[int]) -> set[int]:
    seen = set(start)
    stack = list(seen)
    while stack:
        b = stack.pop()
        for a in np.nonzero(adj[:, b])[0]:
            if a not in seen:
                seen.add(int(a))
                stack.append(int(a))
    return seen


def derive_funnels(model: AqecModel, tol: float = DEFAULT_TOL) -> dict[int, list[str]]:
    """Closure of the error images of each codeword under the dynamics, minus the codeword."""
    adj = _flow_graph(model, tol)
    out = {}
    for n, psi in enumerate(model.codewords):
        start = set()
        for E in model.error_set:
            start |= set(np.nonzero(np.abs(E @ psi) > tol)[0].tolist())
        support = set(np.nonzero(np.abs(psi) > tol)[0].tolist())
        reach = _reachable(adj, start) - support
        out[n] = [model.labels[k] for k in sorted(reach)]
    return out


def check_funnel_partition(model: AqecModel, tol: float = DEFAULT_TOL) -> ConditionReport:
    """Errors stay in their own funnel, nothing couples different funnels, and
    every funnel state can drain into its own codeword."""
    sectors = _sectors(model, tol)
    owner = np.full(model.dim, -1)
    for n, idx in enumerate(sectors):
        owner[idx] = n
    labels = model.labels
    witnesses = []

    # (a) error images
    for n, psi in enumerate(model.codewords):
        outside = owner != n
        for a, E in enumerate(model.error_set):
            img = E @ psi
            leak = float(np.linalg.norm(img[outside]))
            where = f"E_{a} psi_{n} outside funnel {n}"
            if leak > tol:
                k = int(np.argmax(np.abs(img) * outside))
                where += f" (at {labels[k]})"
            witnesses.append(Witness(where, leak))

    # (b) couplings that cross sector boundaries
    H = model.hamiltonian
    for a, b in zip(*np.nonzero(np.abs(H) > tol)):
        if owner[b] >= 0 and owner[a] != owner[b]:
            witnesses.append(Witness(f"H couples {labels[b]} -> {labels[a]}", float(abs(H[a, b]))))
    for k, (rate, L) in enumerate(model.collapse_terms):
        if rate <= 0:
            continue
        for a, b in zip(*np.nonzero(np.abs(L) > tol)):
            if owner[b] >= 0 and owner[a] != owner[b]:
                witnesses.append(Witness(f"L_{k} moves {labels[b]} -> {labels[a]}", float(abs(L[a, b]))))

    # (c) drainage paths into the own codeword
    adj = _flow_graph(model, tol)
    for n, psi in enumerate(model.codewords):
        support = set(np.nonzero(np.abs(psi) > tol)[0].tolist())
        for lab in model.funnel_of.get(n, ()):
            if not _reachable(adj, [model.index(lab)]) & support:
                witnesses.append(Witness(f"{lab} cannot reach codeword {n}", 1.0))

    return _report("FUNNEL_PARTITION", witnesses, tol, funnels={n: list(f) for n, f in model.funnel_of.items()})


def _source_states(model: AqecModel, tol: float) -> np.ndarray:
    src = np.zeros(model.dim, dtype=bool)
    for rate, L in model.collapse_terms:
        if rate > 0:
            src |= np.linalg.norm(L, axis=0) > tol
    return src


def check_drainage(model: AqecModel, tol: float = DEFAULT_TOL) -> ConditionReport:
    """Every eigenvector of H restricted to a funnel must overlap the cooled states.

    Degenerate eigenvalues are handled per eigenspace: the smallest squared
    projection of any vector in the eigenspace is what is tested.
    """
    src = _source_states(model, 1e-12)
    H = model.hamiltonian
    witnesses = []
    min_proj = {}
    for n, labs in model.funnel_of.items():
        idx = np.array([model.index(lab) for lab in labs])
        e, V = np.linalg.eigh(H[np.ix_(idx, idx)])
        Q = np.diag(src[idx].astype(float))
        scale = max(1.0, float(np.max(np.abs(e))))
        groups = _cluster(e, 1e-9 * scale)
        worst = np.inf
        for g in groups:
            Vg = V[:, g]
            p = float(np.linalg.eigvalsh(Vg.conj().T @ Q @ Vg).min())
            worst = min(worst, p)
            if p <= tol:
                # magnitude reported as the shortfall so that a fail always exceeds tol
                witnesses.append(Witness(f"funnel {n} eigenspace E={e[g[0]]:.6g} trapped (projection {p:.3g})", 1.0 - p))
        min_proj[n] = worst
    rep = ConditionReport("DRAINAGE", not witnesses, witnesses, tol, {"min_projection": min_proj})
    return rep


def _cluster(e: np.ndarray, tol: float) -> list[list[int]]:
    groups = [[0]]
    for k in range(1, len(e)):
        if e[k] - e[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


# --- condition (5): identical funnel dynamics --------------------------------


def _frame(model: AqecModel, n: int, order: Sequence[str]) -> np.ndarray:
    cols = [model.codewords[n]] + [model.ket(lab) for lab in order]
    return np.column_stack(cols)


def _block_deviation(model: AqecModel, V0: np.ndarray, V1: np.ndarray) -> tuple[float, tuple[int, int], str, float]:
    H = model.hamiltonian
    D = V1.conj().T @ H @ V1 - V0.conj().T @ H @ V0
    offset = float(np.real(np.mean(np.diag(D))))
    D = D - offset * np.eye(D.shape[0])
    worst = (float(np.max(np.abs(D))), np.unravel_index(np.argmax(np.abs(D)), D.shape), "H")
    for k, (rate, L) in enumerate(model.collapse_terms):
        if rate <= 0:
            continue
        C = V1.conj().T @ L @ V1 - V0.conj().T @ L @ V0
        m = float(np.max(np.abs(C)))
        if m > worst[0]:
            worst = (m, np.unravel_index(np.argmax(np.abs(C)), C.shape), f"L_{k}")
    psi0, psi1 = V0[:, 0], V1[:, 0]
    for a, E in enumerate(model.error_set):
        c = V1.conj().T @ (E @ psi1) - V0.conj().T @ (E @ psi0)
        m = float(np.max(np.abs(c)))
        if m > worst[0]:
            worst = (m, (int(np.argmax(np.abs(c))), 0), f"E_{a} amplitude")
    return worst[0], tuple(int(i) for i in worst[1]), worst[2], offset


def check_symmetry(model: AqecModel, tol: float = DEFAULT_TOL) -> ConditionReport:
    """Codeword/funnel blocks must match up to a constant energy offset.

    Funnel k-th labels are paired in declared order; when that fails and the
    funnel has at most four states every relabeling is tried.
    """
    n_cw = len(model.codewords)
    if n_cw < 2:
        return ConditionReport("SYMMETRY", True, [], tol, {"note": "single codeword"})
    ref = list(model.funnel_of[0])
    V0 = _frame(model, 0, ref)
    witnesses = []
    details = {"offsets": {}, "permutations": {}}
    for q in range(1, n_cw):
        order = list(model.funnel_of[q])
        if len(order) != len(ref):
            witnesses.append(Witness(f"funnel {q} size {len(order)} != {len(ref)}", 1.0))
            continue
        dev, (r, c), what, offset = _block_deviation(model, V0, _frame(model, q, order))
        chosen = order
        if dev > tol and len(order) <= PERMUTATION_LIMIT:
            for perm in itertools.permutations(order):
                d2, rc2, w2, o2 = _block_deviation(model, V0, _frame(model, q, perm))
                if d2 < dev:
                    dev, (r, c), what, offset, chosen = d2, rc2, w2, o2, list(perm)
                if dev <= tol:
                    break
        names0 = ["cw0"] + ref
        names1 = [f"cw{q}"] + chosen
        witnesses.append(
            Witness(f"{what}[{names0[r]},{names0[c]}] vs [{names1[r]},{names1[c]}]", dev)
        )
        details["offsets"][q] = offset
        details["permutations"][q] = chosen
    return _report("SYMMETRY", witnesses, tol, **details)


CHECKS = {
    "LINDBLAD": check_lindblad_declared,
    "KL": lambda m, tol=DEFAULT_TOL: check_kl(m.codewords, m.error_set, tol),
    "DFS": check_dfs,
    "FUNNEL_PARTITION": check_funnel_partition,
    "DRAINAGE": check_drainage,
    "SYMMETRY": check_symmetry,
}


def run_checks(model: AqecModel, which: Sequence[str] | None = None, tol: float = DEFAULT_TOL) -> list[ConditionReport]:
    which = CONDITION_IDS if which is None else which
    unknown = set(which) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown condition(s): {sorted(unknown)}")
    return [CHECKS[c](model, tol=tol) for c in which]
