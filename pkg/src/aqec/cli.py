"""Command line front end: every subcommand writes a CSV (or JSON for
``check``) with ``#`` metadata lines, so figure data can be regenerated and
diffed. Exit codes: 0 success, 1 a requested condition failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from . import conditions, jump_sim, liouville, metrics, models, spin_cavity
from .core_ops import basis_ket, projector

COHERENCE_NOTE = "coherence = <psi_0|rho|psi_1>; a phase exp(i phi) on psi_1 in Psi appears as exp(-i phi) here"
DEFAULT_GRID = ((1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (1.0, 2.0, 1.0), (1.0, 1.0, 2.0))


class InputError(Exception):
    pass


# --- helpers -----------------------------------------------------------------


def _load_cfg(source, default):
    try:
        return models.load_config(source if source is not None else default)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {source!r}: {exc}") from exc


def _digest(cfg) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _metadata(argv, cfg, units, extra=()):
    lines = [
        "invocation: aqec " + " ".join(argv),
        f"config_sha256: {_digest(cfg)}",
        f"units: {units}",
    ]
    return lines + list(extra)


def _write(out, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _rows_csv(header, rows, meta) -> str:
    buf = io.StringIO()
    for line in meta:
        buf.write(f"# {line}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def _times(args, gen) -> np.ndarray:
    t_max = args.tmax if args.tmax is not None else liouville.repair_horizon(gen)
    if t_max <= 0 or args.steps < 1:
        raise InputError("--tmax must be positive and --steps at least 1")
    return np.linspace(0.0, t_max, args.steps + 1)


def _initial_states(model, cfg, args) -> list[tuple[str, np.ndarray]]:
    """(tag, rho0) pairs for the requested error spec."""
    if len(model.codewords) == 1:
        # single-codeword toy models start from the flipped codeword
        return [("flip", projector(basis_ket(model.space, "0,0")))]
    psi = models.psi_from_config(model, cfg)
    spec = args.error
    if spec == "file":
        source = args.overlaps if args.overlaps is not None else cfg.get("overlaps_file", "overlaps_eq9")
        try:
            ov = models.load_overlaps(source)
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise InputError(f"cannot read overlaps {source!r}: {exc}") from exc
        return [("mixture", models.corrupted_state(psi, model.error_set, ov))]
    picks = [1, 2, 3] if spec == "all" else [int(spec)]
    return [(f"flip{k}", projector(model.error_set[k] @ psi)) for k in picks]


def _model(cfg):
    try:
        return models.model_from_config(cfg)
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad model config: {exc}") from exc


# --- subcommands -------------------------------------------------------------


def cmd_spectrum_gamma(args, argv) -> int:
    if args.d or args.r or args.c:
        grid = list(itertools.product(args.d or [1.0], args.r or [1.0], args.c or [1.0]))
    else:
        grid = list(DEFAULT_GRID)
    rows = []
    for d, r, c in grid:
        gen = models.toy_model_flip(d, r, c).generator()
        dec = liouville.spectral_decompose(gen)
        order = np.lexsort((dec.eigenvalues.imag, dec.eigenvalues.real))
        for k, idx in enumerate(order):
            lam = dec.eigenvalues[idx]
            rows.append((d, r, c, k, lam.real, lam.imag))
    cfg = {"kind": "toy_flip", "grid": grid}
    meta = _metadata(argv, cfg, "rates in the model's arbitrary unit")
    _write(args.out, _rows_csv(["d", "r", "c", "index", "re_lambda", "im_lambda"], rows, meta))
    return 0


def cmd_entropy(args, argv) -> int:
    cfg = _load_cfg(args.config, {"kind": "toy_flip", "d": 1.0, "r": 1.0, "c": 1.0})
    model = _model(cfg)
    gen = model.generator()
    times = _times(args, gen)
    (tag, rho0), *_ = _initial_states(model, cfg, args)
    rhos = liouville.propagate(gen, rho0, times)
    s = [metrics.linear_entropy(r) for r in rhos]
    t_settle = liouville.settling_time(gen, rho0, metrics.linear_entropy, 0.01, t_max=times[-1])
    meta = _metadata(argv, cfg, "time in inverse rate units", [f"initial: {tag}", f"t(S_lin<0.01): {_cell(t_settle)}"])
    _write(args.out, _rows_csv(["t", "S_lin"], zip(times, s), meta))
    return 0


def cmd_repair(args, argv) -> int:
    cfg = _load_cfg(args.config, "setA")
    model = _model(cfg)
    if len(model.codewords) < 2:
        raise InputError("repair needs a two-codeword model")
    gen = model.generator()
    times = _times(args, gen)
    rows, header = [], None
    for tag, rho0 in _initial_states(model, cfg, args):
        cols = metrics.trajectory_columns(liouville.propagate(gen, rho0, times), model.codewords)
        header = ["error", "t", *cols]
        rows += [(tag, t, *(cols[n][i] for n in cols)) for i, t in enumerate(times)]
    meta = _metadata(argv, cfg, "time in inverse rate units", [COHERENCE_NOTE])
    _write(args.out, _rows_csv(header, rows, meta))
    return 0


def cmd_funnel_populations(args, argv) -> int:
    cfg = _load_cfg(args.config, "setB")
    model = _model(cfg)
    gen = model.generator()
    times = _times(args, gen)
    rows = []
    for tag, rho0 in _initial_states(model, cfg, args):
        for t, rho in zip(times, liouville.propagate(gen, rho0, times)):
            rows.append((tag, t, *np.real(np.diag(rho))))
    header = ["error", "t", *(f"pop_{lab.replace(',', '_')}" for lab in model.labels)]
    meta = _metadata(argv, cfg, "time in inverse rate units")
    _write(args.out, _rows_csv(header, rows, meta))
    return 0


def cmd_check(args, argv) -> int:
    cfg = _load_cfg(args.config, "setA")
    model = _model(cfg)
    which = [w.upper() for w in args.which] if args.which else list(conditions.CONDITION_IDS)
    unknown = [w for w in which if w not in conditions.CONDITION_IDS]
    if unknown:
        raise InputError(f"unknown condition ids {unknown}; choose from {list(conditions.CONDITION_IDS)}")
    reports = conditions.run_checks(model, which, tol=args.tol)
    _write(args.out, conditions.reports_to_json(reports) + "\n")
    return 0 if all(r.passed for r in reports) else 1


def _spin_system(args) -> spin_cavity.SpinSystem:
    return spin_cavity.SpinSystem.from_pairs(
        D12=args.D12, D23=args.D23, D13=args.D13, J12=args.J12, J23=args.J23, J13=args.J13
    )


def cmd_spins(args, argv) -> int:
    sysm = _spin_system(args)
    H = spin_cavity.spin_hamiltonian(sysm)
    pols = ["x", "y"] if args.pol == "both" else [args.pol]
    rows = [
        (ln.freq, ln.strength, ln.polarization, ln.from_level, ln.to_level, ln.starred)
        for pol in pols
        for ln in spin_cavity.dipole_spectrum(H, pol)
    ]
    feas = spin_cavity.aqec_feasibility(sysm)
    cfg = {"D": sysm.D.tolist(), "J": sysm.J.tolist(), "pol": args.pol}
    meta = _metadata(
        argv, cfg, "frequencies in units of zeta", [f"feasible: {feas.verdict}", f"min_gap_zeta: {_cell(feas.details['min_gap'])}"]
    )
    _write(args.out, _rows_csv(["freq_zeta", "strength", "polarization", "from", "to", "starred"], rows, meta))
    return 0


def cmd_cavity(args, argv) -> int:
    if min(args.a, args.b, args.d) <= 0 or args.wmax <= 0:
        raise InputError("cavity lengths and --wmax must be positive")
    modes = spin_cavity.cavity_modes(args.a, args.b, args.d, args.wmax, formula=args.formula)
    lines = spin_cavity.dipole_spectrum(spin_cavity.spin_hamiltonian(_spin_system(args)), "x")
    rep = spin_cavity.design_report(modes, lines)
    cfg = {"box": [args.a, args.b, args.d], "wmax": args.wmax, "formula": args.formula}
    extra = [f"required_Q: {_cell(rep.required_q)}", f"extra_modes: {rep.extra_mode_count}"]
    extra += [f"alt_count {k}: {v}" for k, v in rep.alternative_counts.items()]
    extra += [f"assumption: {a}" for a in rep.assumptions]
    meta = _metadata(argv, cfg, "frequencies in units of zeta, lengths in 1/zeta", extra)
    if args.table == "modes":
        rows = [(m.family, m.m, m.n, m.p, m.freq, m.center_field) for m in modes]
        text = _rows_csv(["family", "m", "n", "p", "freq_zeta", "center_field"], rows, meta)
    else:
        rows = [("starred", m["transition"], m["line"], m["mode"] or "", m["mode_freq"] or "", m["offset"], "") for m in rep.matched]
        rows += [("unstarred", s["transition"], s["line"], s["mode"], s["mode_freq"], s["offset"], s["q"]) for s in rep.spurious]
        text = _rows_csv(["kind", "transition", "line_zeta", "mode", "mode_freq_zeta", "offset_zeta", "q"], rows, meta)
    _write(args.out, text)
    return 0


def cmd_jump_oracle(args, argv) -> int:
    cfg = _load_cfg(args.config, {"kind": "toy_flip", "d": 1.0, "r": 1.0, "c": 1.0})
    model = _model(cfg)
    t = args.tmax if args.tmax is not None else 2.0
    steps = args.step_counts or [2, 4, 8, 16]
    tag, rho0 = _initial_states(model, cfg, args)[0]
    w, V = np.linalg.eigh(rho0)
    branches = [(np.sqrt(max(p, 0)), V[:, k], k) for k, p in enumerate(w) if p > 1e-14]
    exact = liouville.propagate(model.generator(), rho0, [t])[0]
    rows, prev = [], None
    for n in steps:
        js = jump_sim.jump_expand(model, branches, t / n, n, splitting=args.splitting)
        err = float(np.max(np.abs(jump_sim.reduce_to_system(js) - exact)))
        order = np.log2(prev / err) if prev is not None and err > 0 else np.nan
        rows.append((n, t / n, err, order))
        prev = err
    meta = _metadata(argv, cfg, "time in inverse rate units", [f"initial: {tag}", f"splitting: {args.splitting}"])
    _write(args.out, _rows_csv(["steps", "dt", "max_abs_error", "order"], rows, meta))
    return 0


# --- parser ------------------------------------------------------------------


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="model config JSON path or bundled fixture name")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--tmax", type=float, help="final time (default: 20 e-folds of the slowest mode)")
    common.add_argument("--steps", type=int, default=200, help="number of time steps")
    common.add_argument("--error", default="1", choices=["1", "2", "3", "all", "file"], help="flip error or overlap mixture")
    common.add_argument("--overlaps", help="overlap JSON used with --error file")
    common.add_argument("--tol", type=float, default=conditions.DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized fixtures (none are used yet)")

    spins = argparse.ArgumentParser(add_help=False)
    for name, val in (("D12", 1.0), ("D23", 1.0), ("D13", 0.125), ("J12", 0.0), ("J23", 0.2), ("J13", 0.0)):
        spins.add_argument(f"--{name}", type=float, default=val)

    p = argparse.ArgumentParser(prog="aqec", description="Automatic quantum error correction simulations.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum-gamma", parents=[common], help="Re(lambda) of the toy generator over a grid")
    sp.add_argument("--d", type=_floats, help="comma separated d values")
    sp.add_argument("--r", type=_floats)
    sp.add_argument("--c", type=_floats)
    sp.set_defaults(func=cmd_spectrum_gamma)

    sub.add_parser("entropy", parents=[common], help="linear entropy vs t").set_defaults(func=cmd_entropy)
    sub.add_parser("repair", parents=[common], help="codeword populations and coherence vs t").set_defaults(func=cmd_repair)
    sub.add_parser("funnel-populations", parents=[common], help="all basis populations vs t").set_defaults(
        func=cmd_funnel_populations
    )

    ck = sub.add_parser("check", parents=[common], help="JSON report of the sufficiency conditions")
    ck.add_argument("--which", nargs="+", help=f"subset of {', '.join(conditions.CONDITION_IDS)}")
    ck.set_defaults(func=cmd_check)

    s = sub.add_parser("spins", parents=[common, spins], help="dipole line list of the three-spin system")
    s.add_argument("--pol", choices=["x", "y", "both"], default="x")
    s.set_defaults(func=cmd_spins)

    cv = sub.add_parser("cavity", parents=[common, spins], help="cavity modes or design report")
    cv.add_argument("--a", type=float, default=spin_cavity.DEFAULT_BOX[0])
    cv.add_argument("--b", type=float, default=spin_cavity.DEFAULT_BOX[1])
    cv.add_argument("--d", type=float, default=spin_cavity.DEFAULT_BOX[2])
    cv.add_argument("--wmax", type=float, default=2.5)
    cv.add_argument("--formula", choices=["quoted", "conventional"], default="quoted")
    cv.add_argument("--table", choices=["modes", "design"], default="modes")
    cv.set_defaults(func=cmd_cavity)

    jo = sub.add_parser("jump-oracle", parents=[common], help="jump expansion vs Lindblad under dt halving")
    jo.add_argument("--step-counts", type=lambda s: [int(x) for x in s.split(",")], help="e.g. 2,4,8,16")
    jo.add_argument("--splitting", choices=["strang", "lie"], default="strang")
    jo.set_defaults(func=cmd_jump_oracle)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except (InputError, ValueError, IndexError) as exc:
        print(f"aqec: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
