"""Three dipolar/exchange-coupled spins in zero field and the rectangular
resonator whose modes cool only the funnel-to-codeword transitions.

Energies are in units of the dipolar scale zeta (cm^-1); cavity lengths are
in units of 1/zeta. Spin basis: |0> is spin down (m = -1/2), so |000> has
m_z = -3/2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import constants
from scipy.optimize import minimize_scalar

from .conditions import ConditionReport, Witness
from .core_ops import HilbertSpace, embed_product, single_site_op

SPACE = HilbertSpace.qubits(3)
STRENGTH_TOL = 1e-12
MATCH_TOL = 0.01
SEPARATION_TOL = 1e-6
FUNNEL_LABELS = {-0.5: "ABC", 0.5: "DEF"}
CODEWORD_LABELS = {-1.5: "000", 1.5: "111"}


@dataclass(frozen=True)
class SpinSystem:
    """Symmetric 3x3 tables of dipolar (D) and exchange (J) couplings."""

    D: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        for name in ("D", "J"):
            m = np.asarray(getattr(self, name), dtype=float)
            if m.shape != (3, 3) or not np.allclose(m, m.T, atol=0):
                raise ValueError(f"{name} must be a symmetric 3x3 table")
            object.__setattr__(self, name, m)

    @classmethod
    def from_pairs(cls, D12=1.0, D23=1.0, D13=1 / 8, J12=0.0, J23=0.0, J13=0.0) -> "SpinSystem":
        D = np.array([[0, D12, D13], [D12, 0, D23], [D13, D23, 0]], float)
        J = np.array([[0, J12, J13], [J12, 0, J23], [J13, J23, 0]], float)
        return cls(D, J)

    @classmethod
    def default(cls, J23: float = 0.2) -> "SpinSystem":
        """Equally spaced spins on the z axis: D12 = D23 = 8 D13 = 1."""
        return cls.from_pairs(J23=J23)


def total_op(kind: str) -> np.ndarray:
    return sum(single_site_op(SPACE, k, kind) for k in range(3))


def spin_hamiltonian(sys: SpinSystem) -> np.ndarray:
    H = np.zeros((8, 8), dtype=complex)
    for n, m in itertools.combinations(range(3), 2):
        xy = embed_product(SPACE, [(n, "x"), (m, "x")]) + embed_product(SPACE, [(n, "y"), (m, "y")])
        zz = embed_product(SPACE, [(n, "z"), (m, "z")])
        H += sys.D[n, m] * (xy - 2 * zz) + sys.J[n, m] * (xy + zz)
    return H


@dataclass(frozen=True)
class Level:
    label: str
    m_z: float
    energy: float
    vector: np.ndarray


def level_diagram(H: np.ndarray) -> list[Level]:
    """Eigenlevels grouped by m_z (ascending), energies ascending within a block.

    Funnel levels are labeled A-C (m_z = -1/2) and D-F (m_z = +1/2) in order
    of increasing energy; codewords are labeled by their bit strings.
    """
    mz = np.real(np.diag(total_op("z")))
    levels = []
    for m in np.unique(np.round(mz * 2) / 2):
        idx = np.nonzero(np.isclose(mz, m))[0]
        e, V = np.linalg.eigh(H[np.ix_(idx, idx)])
        for k in range(len(e)):
            vec = np.zeros(8, dtype=complex)
            vec[idx] = V[:, k]
            if m in FUNNEL_LABELS:
                label = FUNNEL_LABELS[m][k]
            elif m in CODEWORD_LABELS:
                label = CODEWORD_LABELS[m]
            else:
                label = f"mz{m:+g}_{k}"
            levels.append(Level(label, float(m), float(e[k]), vec))
    return levels


def _funnel_of(level: Level) -> int | None:
    if level.m_z == -0.5:
        return 0
    if level.m_z == 0.5:
        return 1
    return None


def _codeword_of(level: Level) -> int | None:
    return {-1.5: 0, 1.5: 1}.get(level.m_z)


@dataclass(frozen=True)
class TransitionLine:
    freq: float
    strength: float
    polarization: str
    from_level: str
    to_level: str
    m_z_from: float
    m_z_to: float
    starred: bool


def dipole_spectrum(H: np.ndarray, polarization: str = "x") -> list[TransitionLine]:
    """Dipole-allowed lines with strength |<f| sum_n I_{n,pol} |i>|^2.

    ``from_level`` is the upper level. Lines between degenerate levels
    (zero frequency) are not emission lines and are dropped.
    """
    if polarization not in ("x", "y"):
        raise ValueError("polarization must be 'x' or 'y'")
    op = total_op(polarization)
    levels = level_diagram(H)
    lines = []
    for a, b in itertools.combinations(levels, 2):
        strength = float(abs(np.vdot(a.vector, op @ b.vector)) ** 2)
        freq = abs(a.energy - b.energy)
        if strength <= STRENGTH_TOL or freq <= 1e-9:
            continue
        hi, lo = (a, b) if a.energy > b.energy else (b, a)
        f = _funnel_of(hi) if _funnel_of(hi) is not None else _funnel_of(lo)
        cw = _codeword_of(lo) if _codeword_of(lo) is not None else _codeword_of(hi)
        starred = f is not None and cw is not None and f == cw
        lines.append(TransitionLine(freq, strength, polarization, hi.label, lo.label, hi.m_z, lo.m_z, starred))
    lines.sort(key=lambda ln: (ln.freq, ln.from_level, ln.to_level))
    return lines


def funnel_codeword_elements(H: np.ndarray, polarization: str) -> dict[str, complex]:
    """<codeword| sum_n I_{n,pol} |funnel level> for every funnel level."""
    op = total_op(polarization)
    levels = level_diagram(H)
    cws = {lv.m_z: lv for lv in levels if lv.m_z in CODEWORD_LABELS}
    out = {}
    for lv in levels:
        f = _funnel_of(lv)
        if f is None:
            continue
        cw = cws[-1.5 if f == 0 else 1.5]
        out[lv.label] = complex(np.vdot(cw.vector, op @ lv.vector))
    return out


def flip_parity(H: np.ndarray) -> dict[str, float]:
    """Deviation from "x symmetric, y antisymmetric" under the codeword swap.

    Each m_z=-1/2 level k is paired with the m_z=+1/2 level k (phase aligned
    to its global-flip image), and the funnel->codeword elements of the two
    funnels are compared: x elements should agree, y elements flip sign.
    """
    flip = np.eye(8)[::-1]
    levels = level_diagram(H)
    low = [lv for lv in levels if lv.m_z == -0.5]
    high = [lv for lv in levels if lv.m_z == 0.5]
    cw0 = next(lv for lv in levels if lv.m_z == -1.5).vector
    cw1 = next(lv for lv in levels if lv.m_z == 1.5).vector
    cw1 = cw1 * np.vdot(cw1, flip @ cw0)
    out = {}
    for pol, sign in (("x", 1), ("y", -1)):
        op = total_op(pol)
        dev = 0.0
        for lo, hi in zip(low, high):
            ov = np.vdot(hi.vector, flip @ lo.vector)
            if abs(abs(ov) - 1) > 1e-8:
                raise ValueError("mirror levels are not flip images (degenerate block?)")
            mirror = hi.vector * ov
            dev = max(dev, abs(np.vdot(cw1, op @ mirror) - sign * np.vdot(cw0, op @ lo.vector)))
        out[pol] = float(dev)
    return out


def unique_lines(lines: Sequence[TransitionLine], tol: float = 1e-9) -> list[TransitionLine]:
    """Collapse the mirror-image lines of the two funnels onto one entry per frequency."""
    out: list[TransitionLine] = []
    for ln in lines:
        if not any(abs(ln.freq - o.freq) < tol and ln.starred == o.starred for o in out):
            out.append(ln)
    return out


def aqec_feasibility(sys: SpinSystem, min_gap: float = SEPARATION_TOL) -> ConditionReport:
    """All three funnel levels must drain radiatively to their codeword on an
    x-polarized line, and those lines must be spectrally separable from the
    funnel-funnel lines (gap above ``min_gap``, i.e. not coincident).

    ``details["filter_q"]`` is the quality factor a filter needs to resolve
    the closest starred/unstarred pair.
    """
    H = spin_hamiltonian(sys)
    elems = funnel_codeword_elements(H, "x")
    lines = dipole_spectrum(H, "x")
    starred = [ln for ln in lines if ln.starred]
    unstarred = [ln for ln in lines if not ln.starred]
    witnesses = []
    strengths = {}
    for lab in "ABC":
        s = abs(elems[lab]) ** 2
        strengths[lab] = s
        if s <= STRENGTH_TOL:
            witnesses.append(Witness(f"level {lab} has no x-polarized line to its codeword", 1.0 - s))
    pairs = [(abs(a.freq - b.freq), a) for a in starred for b in unstarred]
    gap, closest = min(pairs, key=lambda p: p[0], default=(np.inf, None))
    filter_q = closest.freq / gap if closest is not None and gap > 0 else (np.inf if closest else 1.0)
    if gap <= min_gap:
        witnesses.append(Witness(f"starred/unstarred lines only {gap:.3g} apart", 1.0 - gap))
    return ConditionReport(
        "SPIN_FEASIBILITY",
        not witnesses,
        witnesses,
        STRENGTH_TOL,
        {"J23": float(sys.J[1, 2]), "starred_strengths": strengths, "min_gap": gap, "filter_q": filter_q},
    )


def line_gap(j23: float, base: SpinSystem | None = None) -> float:
    """Smallest starred/unstarred x-line separation at the given J23."""
    base = SpinSystem.default() if base is None else base
    J = base.J.copy()
    J[1, 2] = J[2, 1] = j23
    return float(aqec_feasibility(SpinSystem(base.D, J)).details["min_gap"])


def line_crossings(j_lo: float, j_hi: float, n: int = 2001, base: SpinSystem | None = None) -> list[float]:
    """J23 values in [j_lo, j_hi] where a starred line meets an unstarred one.

    Local minima of the gap on a fine grid are refined with a bounded scalar
    minimizer and kept when the refined gap is below SEPARATION_TOL.
    """
    js = np.linspace(j_lo, j_hi, n)
    g = np.array([line_gap(j, base) for j in js])
    out = []
    for k in range(1, n - 1):
        if g[k] <= g[k - 1] and g[k] <= g[k + 1]:
            res = minimize_scalar(lambda j: line_gap(j, base), bounds=(js[k - 1], js[k + 1]), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < SEPARATION_TOL:
                out.append(float(res.x))
    return out


def feasibility_sweep(j23_values: Sequence[float], base: SpinSystem | None = None) -> list[ConditionReport]:
    base = SpinSystem.default() if base is None else base
    out = []
    for j in j23_values:
        J = base.J.copy()
        J[1, 2] = J[2, 1] = j
        out.append(aqec_feasibility(SpinSystem(base.D, J)))
    return out


# --- resonator -----------------------------------------------------------------


@dataclass(frozen=True)
class CavityMode:
    family: str
    m: int
    n: int
    p: int
    freq: float
    center_field: str

    @property
    def name(self) -> str:
        return f"{self.family}{self.m}{self.n}{self.p}"

    @property
    def transverse_b(self) -> bool:
        return self.center_field in ("B_x", "B_y")


def mode_frequency(a: float, b: float, d: float, m: int, n: int, p: int, formula: str = "quoted") -> float:
    """sqrt((m/a)^2 + (n/b)^2 + (p/d)^2); ``formula="conventional"`` halves it (c / 2L)."""
    f = float(np.sqrt((m / a) ** 2 + (n / b) ** 2 + (p / d) ** 2))
    if formula == "conventional":
        return f / 2
    if formula != "quoted":
        raise ValueError(f"unknown formula {formula!r}")
    return f


def center_fields(family: str, m: int, n: int, p: int, a: float, b: float, d: float) -> dict[str, float]:
    """Field components of the standard rectangular-cavity mode at (a/2, b/2, d/2), up to normalization."""
    kx, ky, kz = m * np.pi / a, n * np.pi / b, p * np.pi / d
    x, y, z = a / 2, b / 2, d / 2
    cx, sx = np.cos(kx * x), np.sin(kx * x)
    cy, sy = np.cos(ky * y), np.sin(ky * y)
    cz, sz = np.cos(kz * z), np.sin(kz * z)
    if family == "TE":
        return {
            "E_x": ky * cx * sy * sz,
            "E_y": -kx * sx * cy * sz,
            "E_z": 0.0,
            "B_x": -kx * kz * sx * cy * cz,
            "B_y": -ky * kz * cx * sy * cz,
            "B_z": (kx**2 + ky**2) * cx * cy * sz,
        }
    if family == "TM":
        return {
            "E_x": -kx * kz * cx * sy * sz,
            "E_y": -ky * kz * sx * cy * sz,
            "E_z": (kx**2 + ky**2) * sx * sy * cz,
            "B_x": ky * sx * cy * cz,
            "B_y": -kx * cx * sy * cz,
            "B_z": 0.0,
        }
    raise ValueError(f"unknown mode family {family!r}")


def classify_center(fields: dict[str, float], tol: float = 1e-9) -> str:
    scale = max(1.0, max(abs(v) for v in fields.values()))
    b = [k for k in ("B_x", "B_y", "B_z") if abs(fields[k]) > tol * scale]
    if b:
        return max(b, key=lambda k: abs(fields[k]))
    if any(abs(fields[k]) > tol * scale for k in ("E_x", "E_y", "E_z")):
        return "E-only"
    return "null"


def cavity_modes(a: float, b: float, d: float, w_max: float, formula: str = "quoted") -> list[CavityMode]:
    """All TE (m+n > 0, p > 0) and TM (m, n > 0, p >= 0) modes below ``w_max``."""
    if min(a, b, d) <= 0:
        raise ValueError("cavity lengths must be positive")
    scale = 2.0 if formula == "conventional" else 1.0
    mmax, nmax, pmax = (int(np.ceil(w_max * scale * L)) + 1 for L in (a, b, d))
    modes = []
    for m, n, p in itertools.product(range(mmax + 1), range(nmax + 1), range(pmax + 1)):
        f = mode_frequency(a, b, d, m, n, p, formula)
        if f >= w_max:
            continue
        for family in ("TE", "TM"):
            if family == "TE" and not (m + n > 0 and p > 0):
                continue
            if family == "TM" and not (m > 0 and n > 0):
                continue
            field_char = classify_center(center_fields(family, m, n, p, a, b, d))
            modes.append(CavityMode(family, m, n, p, f, field_char))
    modes.sort(key=lambda md: (md.freq, md.family, md.m, md.n, md.p))
    return modes


@dataclass
class DesignReport:
    matched: list[dict] = field(default_factory=list)
    spurious: list[dict] = field(default_factory=list)
    binding: dict | None = None
    required_q: float = 1.0
    mode_count: int = 0
    extra_mode_count: int = 0
    alternative_counts: dict = field(default_factory=dict)
    assumptions: list[str] = field(default_factory=list)


def design_report(
    modes: Sequence[CavityMode],
    lines: Sequence[TransitionLine],
    match_tol: float = MATCH_TOL,
    quoted_extra_modes: int | None = 29,
) -> DesignReport:
    """Match starred lines to modes and find the most dangerous spurious resonance.

    For every starred line, the nearest mode with transverse B at the spins
    within ``match_tol`` is the cooling mode. For every unstarred line, the
    nearest transverse-B mode sets an offset; the smallest offset binds and
    the required quality factor is line frequency / offset.
    B_z modes are ignored: they cannot drive the Delta m_z = +-1 lines.
    """
    if not modes or not lines:
        raise ValueError("design_report needs modes and lines")
    rep = DesignReport(mode_count=len(modes))
    drivers = [md for md in modes if md.transverse_b]
    for ln in unique_lines([ln for ln in lines if ln.starred]):
        best = min(drivers, key=lambda md: abs(md.freq - ln.freq), default=None)
        ok = best is not None and abs(best.freq - ln.freq) <= match_tol
        rep.matched.append(
            {
                "line": ln.freq,
                "transition": f"{ln.from_level}-{ln.to_level}",
                "mode": best.name if ok else None,
                "mode_freq": best.freq if ok else None,
                "center_field": best.center_field if ok else None,
                "offset": abs(best.freq - ln.freq) if best is not None else None,
            }
        )
    matched_names = {m["mode"] for m in rep.matched if m["mode"]}
    rep.extra_mode_count = len(modes) - len(matched_names)
    rep.alternative_counts = alternative_mode_counts(modes, len(matched_names))
    for ln in unique_lines([ln for ln in lines if not ln.starred]):
        best = min(drivers, key=lambda md: abs(md.freq - ln.freq), default=None)
        if best is None:
            continue
        off = abs(best.freq - ln.freq)
        rep.spurious.append(
            {
                "line": ln.freq,
                "transition": f"{ln.from_level}-{ln.to_level}",
                "mode": best.name,
                "mode_freq": best.freq,
                "center_field": best.center_field,
                "offset": off,
                "q": ln.freq / off if off > 0 else np.inf,
            }
        )
    if rep.spurious:
        rep.binding = min(rep.spurious, key=lambda s: s["offset"])
        rep.required_q = rep.binding["q"]
    rep.assumptions = [
        "funnel levels labeled A-C (m_z=-1/2) and D-F (m_z=+1/2) by ascending energy",
        "only B_x/B_y modes at the cavity center drive Delta m_z = +-1 lines",
        f"modes counted as distinct (family, m, n, p) tuples: {rep.extra_mode_count} besides the matched ones",
    ]
    if quoted_extra_modes is not None and rep.extra_mode_count != quoted_extra_modes:
        rep.assumptions.append(
            f"count discrepancy: {rep.extra_mode_count} additional modes vs {quoted_extra_modes} quoted"
        )
    return rep


def alternative_mode_counts(modes: Sequence[CavityMode], n_matched: int = 3) -> dict[str, int]:
    """Mode counts under other plausible counting conventions, for the discrepancy report."""
    tuples = {(md.m, md.n, md.p) for md in modes}
    return {
        "distinct_family_tuples": len(modes) - n_matched,
        "distinct_index_tuples": len(tuples) - n_matched,
        "distinct_frequencies": len({round(md.freq, 9) for md in modes}) - n_matched,
        "with_B_at_center": sum(md.center_field.startswith("B") for md in modes) - n_matched,
        "TE_with_B_at_center": sum(md.family == "TE" and md.center_field.startswith("B") for md in modes) - n_matched,
        "with_transverse_B": sum(md.transverse_b for md in modes) - n_matched,
    }


def bath_temperature_scale(zeta_cm: float = 0.1) -> float:
    """(h c / k) zeta in kelvin; the cold bath must sit well below this."""
    return constants.h * constants.c * (zeta_cm * 100.0) / constants.k


DEFAULT_BOX = (2.32, 0.87, 4.28)
