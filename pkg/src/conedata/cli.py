"""Command line front end.

Subcommands: seed, kernels verify, constraints, solve, diagnose decay,
diagnose sharpness, verify all.  Every run loads the flat key = value
configuration (all keys optional), writes its artifacts plus the
resolved `effective-config` into --out, and maps failures to exit
codes: 2 config or format error, 3 check failure, 4 solver failure.
Artifacts are deterministic: identical configs give bit-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, emit_config, load_config
from .constraints import HPiData, apply_Phi, constraints_grid, reconstruct_gk
from .diagnostics import (BNormSpec, b_norm, decay_fit, seed_ray_samples,
                          sharpness_scan)
from .errors import (CheckFailure, ConedataError, ConfigError, FormatError,
                     PositivityError, SolverError)
from .fields import (ConeSpec, GridSpec, ScalarField, SymTensorField,
                     VectorField, read_cidf, sample_scalar, sample_trilinear,
                     sample_vector, write_cidf)
from .kernels import (KernelProfile, RayConfig, apply_S, bump_source, eval_K,
                      eval_Lker, gaussian_test_jet, outgoing_check,
                      ps_identity_defect, solve_moment_coeffs,
                      weak_delta_defect)
from .seed import (SeedEvaluator, SeedSpec, seed_to_grid,
                   seed_to_grid_discrete, verify_linearized)
from .solver import SolveState, hp_add, solve
from .weights import WeightFunction

# ---- artifact helpers --------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_field_pair(out: Path, names_first: tuple, names_fallback: tuple):
    """Load (h, pi) dumps from the run directory, preferring solver output."""
    for ha, pa in (names_first, names_fallback):
        hp, pp = out / ha, out / pa
        if hp.exists() and pp.exists():
            h = read_cidf(hp)
            pi = read_cidf(pp)
            return h, pi, ha, pa
    raise ConfigError(
        f"no field dumps found in {out} (looked for {names_first[0]}/{names_first[1]} "
        f"and {names_fallback[0]}/{names_fallback[1]}); run `seed` or `solve` first")


class _CheckList:
    """Accumulates (check, value, threshold, passed) rows and pass/fail lines."""

    def __init__(self):
        self.rows = []

    def add(self, name: str, value: float, threshold: float, passed: bool, note: str = ""):
        self.rows.append((name, float(value), float(threshold), bool(passed)))
        word = "pass" if passed else "FAIL"
        extra = f"  ({note})" if note else ""
        print(f"[{word}] {name}: value={_fmt(float(value))} threshold={_fmt(float(threshold))}{extra}")

    @property
    def ok(self) -> bool:
        return all(r[3] for r in self.rows)

    def write(self, path: Path):
        _write_csv(path, ("check", "value", "threshold", "passed"), self.rows)


# ---- subcommand bodies -------------------------------------------------------


def run_seed(cfg: RunConfig, out: Path) -> None:
    spec = cfg.seed_spec()
    grid = cfg.grid()
    h0, pi0 = seed_to_grid_discrete(spec, grid, order=cfg.fd_order())
    write_cidf(out / "h0.cidf", h0)
    write_cidf(out / "pi0.cidf", pi0)
    radii = np.logspace(1.0, 6.0, 51)
    tab = seed_ray_samples(spec, spec.cone.axis_array, radii)
    _write_csv(out / "seed_decay.csv", ("r", "h0", "dh0", "pi0", "L"),
               zip(tab["r"], tab["h0"], tab["dh0"], tab["pi0"], tab["L"]))
    print(f"seed: wrote h0.cidf, pi0.cidf, seed_decay.csv to {out}")


def _kernel_checks(cfg: RunConfig, checks: _CheckList) -> None:
    profile = cfg.kernel_profile()
    coeffs = solve_moment_coeffs(profile)
    cone = profile.cone

    # distributional delta identities under radial-rule refinement
    jet = gaussian_test_jet()
    prev_k = prev_l = math.inf
    mono_k = mono_l = True
    for n_radial in (40, 80, 160):
        err_k, err_l = weak_delta_defect(profile, coeffs, jet, n_radial=n_radial)
        checks.add(f"delta_K_n{n_radial}", err_k, 1e-3, err_k <= 1e-3)
        checks.add(f"delta_L_n{n_radial}", err_l, 1e-3, err_l <= 1e-3)
        mono_k &= err_k <= prev_k
        mono_l &= err_l <= prev_l
        prev_k, prev_l = err_k, err_l
    checks.add("delta_K_monotone", float(mono_k), 1.0, mono_k)
    checks.add("delta_L_monotone", float(mono_l), 1.0, mono_l)

    # exact degree -1 / -2 homogeneity at a power-of-two scale
    rng = np.random.default_rng(20240915)
    ys = rng.normal(size=(64, 3)) * 2.0
    dk = np.max(np.abs(2.0 * eval_K(profile, 2.0 * ys) - eval_K(profile, ys)))
    dl = max(np.max(np.abs(4.0 * eval_Lker(profile, coeffs, k, 2.0 * ys)
                           - eval_Lker(profile, coeffs, k, ys))) for k in (1, 2, 3))
    checks.add("homogeneity_K", dk, 0.0, dk == 0.0, "bitwise at lambda=2")
    checks.add("homogeneity_L", dl, 0.0, dl == 0.0, "bitwise at lambda=2")

    # outgoing support: |y| >= sec(theta)|x| forces the kernel argument
    # outside the cone, so K(x - y) vanishes identically
    axis = cone.axis_array
    u1 = cone.frame()[1]
    xs = 2.0 * (math.cos(0.3 * cone.theta) * axis + math.sin(0.3 * cone.theta) * u1)
    worst = 0.0
    margin_ok = True
    sec = 1.0 / math.cos(cone.theta)
    for t in np.linspace(0.0, cone.theta, 9):
        ydir = math.cos(t) * axis + math.sin(t) * u1
        # scale 1.0 sits exactly on |y| = sec(theta)|x|, where the boolean
        # margin test is one ulp from either verdict; only strictly larger
        # scales must certify it, but the kernel must vanish at all three
        for scale in (1.0, 1.5, 4.0):
            y = scale * sec * np.linalg.norm(xs) * ydir
            if scale > 1.0:
                margin_ok &= bool(outgoing_check(cone, xs, y))
            worst = max(worst, float(np.max(np.abs(eval_K(profile, xs - y)))))
    checks.add("outgoing_zero", worst, 0.0, worst == 0.0 and margin_ok)

    # negative control: with |y| just above |x| but well under the
    # sec(theta) margin, x - y re-enters the cone and the kernel is
    # genuinely nonzero, so the margin is sharp, not slack
    tilt = 0.75 * cone.theta
    y_in = 1.05 * (math.cos(tilt) * axis + math.sin(tilt) * u1)
    arg = axis - y_in
    inside = bool(cone.contains(arg[None, :])[0])
    kval = float(np.max(np.abs(eval_K(profile, arg))))
    ctrl = inside and not outgoing_check(cone, axis, y_in) and kval > 0.0
    checks.add("outgoing_negative_control", kval, 0.0, ctrl,
               "kernel nonzero inside the margin")


def run_kernels_verify(cfg: RunConfig, out: Path) -> None:
    checks = _CheckList()
    _kernel_checks(cfg, checks)
    checks.write(out / "kernels_verify.csv")
    print(f"kernels verify: wrote kernels_verify.csv to {out}")
    if not checks.ok:
        raise CheckFailure("kernel verification failed; see kernels_verify.csv")


def run_constraints(cfg: RunConfig, out: Path) -> None:
    h, pi, hname, pname = _read_field_pair(out, ("h.cidf", "pi.cidf"),
                                           ("h0.cidf", "pi0.cidf"))
    try:
        hp = HPiData(h, pi)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"dumps {hname}/{pname} do not form a field pair: {exc}") from None
    md = reconstruct_gk(hp)
    H, M = constraints_grid(md, order=cfg.fd_order())
    _write_csv(out / "residual.csv", ("norm_H", "norm_M", "grid_n"),
               [(H.l2(), M.l2(), h.grid.n)])
    print(f"constraints on {hname}/{pname}: |H|={H.l2():.6e} |M|={M.l2():.6e}; "
          f"wrote residual.csv to {out}")


def _residual_row(hp: HPiData, order: int):
    H, M = constraints_grid(reconstruct_gk(hp), order=order)
    return H.l2(), M.l2(), hp.grid.n


def run_solve(cfg: RunConfig, out: Path) -> None:
    spec = cfg.seed_spec()
    grid = cfg.grid()
    order = cfg.fd_order()
    profile = cfg.kernel_profile()
    coeffs = solve_moment_coeffs(profile)
    ray = cfg.ray_config()
    h0, pi0 = seed_to_grid_discrete(spec, grid, order=order)
    seed_hp = HPiData(h0, pi0)

    def S(f, F):
        return apply_S(profile, coeffs, f, F, grid, ray)

    def Phi(hp):
        return apply_Phi(hp, order=order)

    try:
        state: SolveState = solve(seed_hp, S, Phi, cfg.solve_config())
    except SolverError as exc:
        partial = getattr(exc, "state", None)
        if partial is not None:
            _write_csv(out / "iterations.csv",
                       ("iter", "update_norm", "phi_norm", "ratio"),
                       partial.history_columns())
        raise
    _write_csv(out / "iterations.csv",
               ("iter", "update_norm", "phi_norm", "ratio"),
               state.history_columns())

    total = hp_add(seed_hp, state.iterate)
    write_cidf(out / "h1.cidf", state.iterate.h)
    write_cidf(out / "pi1.cidf", state.iterate.pi)
    write_cidf(out / "h.cidf", total.h)
    write_cidf(out / "pi.cidf", total.pi)
    md = reconstruct_gk(total)
    write_cidf(out / "g.cidf", md.g)
    write_cidf(out / "k.cidf", md.k)
    _write_csv(out / "residual.csv", ("norm_H", "norm_M", "grid_n"),
               [_residual_row(total, order)])
    _write_csv(out / "seed_residual.csv", ("norm_H", "norm_M", "grid_n"),
               [_residual_row(seed_hp, order)])

    s, q = spec.s, cfg.get("run", "q")
    for name, fld, k_top, delta in (("h1", state.iterate.h, q + 1, (s - 4.0) / 2.0),
                                    ("pi1", state.iterate.pi, q, (s - 2.0) / 2.0)):
        rows = [(k, delta, b_norm(fld, BNormSpec(k=k, delta=delta, order=4)))
                for k in range(k_top + 1)]
        _write_csv(out / f"norms_{name}.csv", ("k", "delta", "value"), rows)

    n_it = len(state.history)
    print(f"solve: converged={state.converged} after {n_it} iterations; wrote "
          f"iterations.csv, h/pi/g/k dumps, residual.csv, seed_residual.csv, norms to {out}")
    if not state.converged:
        raise SolverError(
            f"fixed point not converged after {n_it} iterations; artifacts kept; "
            "raise solver.max_iter or loosen solver.tol")


_GRID_FIT_LO = 0.75  # radii window for slope fits on gridded fields


def _grid_ray_fit(fld: SymTensorField, direction, n_pts: int = 12) -> float:
    """Log-log slope of the Frobenius magnitude along a ray inside the box."""
    grid = fld.grid
    mag = np.sqrt(fld.frobenius_sq())
    radii = np.geomspace(_GRID_FIT_LO, 0.9 * grid.half_width, n_pts)

    def fn(pts):
        return sample_trilinear(grid, mag, pts)

    return decay_fit(fn, direction, radii)


def run_diagnose_decay(cfg: RunConfig, out: Path) -> None:
    spec = cfg.seed_spec()
    axis = spec.cone.axis_array
    radii = np.logspace(2.0, 6.0, 25)
    tab = seed_ray_samples(spec, axis, radii)
    _write_csv(out / "decay_h0.csv", ("r", "value", "L"),
               zip(tab["r"], tab["h0"], tab["L"]))
    _write_csv(out / "decay_pi0.csv", ("r", "value", "L"),
               zip(tab["r"], tab["pi0"], tab["L"]))

    ev = SeedEvaluator(spec)

    def mag(which):
        def fn(pts):
            h0, pi0 = ev.seed(pts)
            f = h0 if which == "h0" else pi0
            return np.sqrt(np.sum(f**2, axis=(1, 2)))
        return fn

    checks = _CheckList()
    rows = []
    slope_h0 = decay_fit(mag("h0"), axis, radii, divide_by_L=True, weight=spec.weight)
    target_h = -(spec.s - 1.0) / 2.0
    rows.append(("h0", slope_h0, target_h, abs(slope_h0 - target_h) <= 0.05))
    checks.add("decay_slope_h0", slope_h0, target_h, rows[-1][3], "after dividing by L")
    slope_pi0 = decay_fit(mag("pi0"), axis, radii, divide_by_L=True, weight=spec.weight)
    target_p = -(spec.s + 1.0) / 2.0
    rows.append(("pi0", slope_pi0, target_p, abs(slope_pi0 - target_p) <= 0.05))
    checks.add("decay_slope_pi0", slope_pi0, target_p, rows[-1][3], "after dividing by L")

    # with solver output present, compare the correction's slope against the
    # seed's over the same in-box radii: the correction must fall faster
    h1_path = out / "h1.cidf"
    h0_path = out / "h0.cidf"
    if h1_path.exists():
        h1 = read_cidf(h1_path)
        grid = h1.grid
        if h0_path.exists():
            h0g = read_cidf(h0_path)
        else:
            h0g, _ = seed_to_grid_discrete(spec, grid, order=cfg.fd_order())
        grid_radii = np.geomspace(_GRID_FIT_LO, 0.9 * grid.half_width, 12)
        mag1 = np.sqrt(h1.frobenius_sq())
        _write_csv(out / "decay_h1.csv", ("r", "value", "L"),
                   zip(grid_radii,
                       sample_trilinear(grid, mag1, grid_radii[:, None] * axis[None, :]),
                       spec.weight(grid_radii)))
        try:
            slope_h1 = _grid_ray_fit(h1, axis)
            slope_h0_grid = _grid_ray_fit(h0g, axis)
        except ConedataError as exc:
            print(f"note: correction slope skipped ({exc})")
        else:
            gap_ok = slope_h1 <= slope_h0_grid - 0.3
            rows.append(("h1", slope_h1, slope_h0_grid - 0.3, gap_ok))
            checks.add("decay_slope_h1", slope_h1, slope_h0_grid - 0.3, gap_ok,
                       f"seed slope {slope_h0_grid:.3f} on the same radii")

    _write_csv(out / "decay_fits.csv", ("field", "slope", "reference", "passed"), rows)
    print(f"diagnose decay: wrote decay_h0.csv, decay_pi0.csv, decay_fits.csv to {out}")
    if not checks.ok:
        raise CheckFailure("decay slope outside tolerance; see decay_fits.csv")


def _sharpness_pair(cfg: RunConfig):
    """Dichotomy scans: converging weight at s' = s, diverging at s' = s + 1."""
    spec = cfg.seed_spec()
    w = spec.weight
    scans = []
    for beta1, ds in ((2.0, 0.0), (1.0, 1.0)):
        # the dichotomy is a property of the iterated-log family, so the
        # scans always use it even when the run weight is constant
        wf = WeightFunction(m=1, beta=(beta1,), R_star=w.R_star, R1=w.R1)
        sp = dataclasses.replace(spec, weight=wf, eta_transition=spec.eta_interval)
        scans.append(sharpness_scan(sp, sp.s + ds))
    return scans


def run_diagnose_sharpness(cfg: RunConfig, out: Path) -> None:
    scan_conv, scan_div = _sharpness_pair(cfg)
    for name, scan in (("sharpness_s.csv", scan_conv),
                       ("sharpness_s_plus_1.csv", scan_div)):
        _write_csv(out / name, ("R_lo", "R_hi", "increment"),
                   zip(scan.radii[:-1], scan.radii[1:], scan.increments))
    if np.all(scan_conv.increments == 0.0):
        print("diagnose sharpness: zero seed, dichotomy not applicable; CSVs written")
        return
    checks = _CheckList()
    dec = bool(np.all(np.diff(scan_conv.increments) < 0.0))
    checks.add("sharpness_decreasing_at_s", float(dec), 1.0, dec, "beta1=2")
    ratio = float(scan_div.increments[-1] / scan_div.increments[0])
    checks.add("sharpness_growth_at_s_plus_1", ratio, 10.0, ratio >= 10.0, "beta1=1")
    print(f"diagnose sharpness: wrote sharpness_s.csv, sharpness_s_plus_1.csv to {out}")
    if not checks.ok:
        raise CheckFailure("sharpness dichotomy violated; see the sharpness CSVs")


def run_verify_all(cfg: RunConfig, out: Path) -> None:
    spec = cfg.seed_spec()
    grid = cfg.grid()
    checks = _CheckList()

    # linearized identity: the double divergence of h0 vanishes in the
    # continuum, so its normalized residual must drop by 2^4 under one
    # refinement of the 4th-order sampled-seed route (30% slack)
    res = {}
    for n in (32, 64):
        gs = dataclasses.replace(grid, n=n)
        h0s, pi0s = seed_to_grid(spec, gs)
        res[n], _ = verify_linearized(h0s, pi0s, order=4)
    ratio = res[32] / res[64]
    checks.add("linearized_refinement", ratio, 16.0,
               abs(ratio - 16.0) <= 0.3 * 16.0, "n=32 vs 64, order 4")

    _kernel_checks(cfg, checks)

    # right inverse on a smooth cone-supported source; like the
    # linearized check above this is a self-test at a pinned reference
    # resolution (n=48 over half-width 4, order 4) where the 5e-2 gate
    # is calibrated -- the run grid enters the other checks
    profile = cfg.kernel_profile()
    coeffs = solve_moment_coeffs(profile)
    ref_grid = GridSpec(n=48, half_width=4.0)
    fb, Fb = bump_source(spec.cone, r_center=3.0, r_width=0.9, r_inner=(1.0, 1.8))
    defect = ps_identity_defect(profile, coeffs, sample_scalar(ref_grid, fb),
                                sample_vector(ref_grid, Fb), cfg.ray_config(),
                                order=4)
    checks.add("ps_identity_defect", defect, 5e-2, defect <= 5e-2,
               "reference grid n=48")

    # far-field decay of the seed pair
    axis = spec.cone.axis_array
    radii = np.logspace(2.0, 6.0, 25)
    ev = SeedEvaluator(spec)

    def mag(which):
        def fn(pts):
            h0, pi0 = ev.seed(pts)
            f = h0 if which == "h0" else pi0
            return np.sqrt(np.sum(f**2, axis=(1, 2)))
        return fn

    slope_h0 = decay_fit(mag("h0"), axis, radii, divide_by_L=True, weight=spec.weight)
    checks.add("decay_slope_h0", slope_h0, -(spec.s - 1.0) / 2.0,
               abs(slope_h0 + (spec.s - 1.0) / 2.0) <= 0.05)
    slope_pi0 = decay_fit(mag("pi0"), axis, radii, divide_by_L=True, weight=spec.weight)
    checks.add("decay_slope_pi0", slope_pi0, -(spec.s + 1.0) / 2.0,
               abs(slope_pi0 + (spec.s + 1.0) / 2.0) <= 0.05)

    # sharpness dichotomy
    scan_conv, scan_div = _sharpness_pair(cfg)
    for name, scan in (("sharpness_s.csv", scan_conv),
                       ("sharpness_s_plus_1.csv", scan_div)):
        _write_csv(out / name, ("R_lo", "R_hi", "increment"),
                   zip(scan.radii[:-1], scan.radii[1:], scan.increments))
    dec = bool(np.all(np.diff(scan_conv.increments) < 0.0))
    checks.add("sharpness_decreasing_at_s", float(dec), 1.0, dec, "beta1=2")
    ratio = float(scan_div.increments[-1] / scan_div.increments[0])
    checks.add("sharpness_growth_at_s_plus_1", ratio, 10.0, ratio >= 10.0, "beta1=1")

    # quadratic smallness: the constraint images of seeds at eps0 and
    # eps0/2 must sit in ratio ~4; scan four amplitudes for the record
    order = cfg.fd_order()
    eps0 = cfg.get("run", "eps0")
    qrows = []
    for fac in (1.0, 0.5, 0.25, 0.125):
        sp = dataclasses.replace(spec, eps0=eps0 * fac)
        hd, pd = seed_to_grid_discrete(sp, grid, order=order)
        f, F = apply_Phi(HPiData(hd, pd), order=order)
        qrows.append((eps0 * fac, math.hypot(f.l2(), F.l2())))
    _write_csv(out / "qsmall.csv", ("eps0", "phi_norm"), qrows)
    qratio = qrows[0][1] / qrows[1][1]
    checks.add("quadratic_smallness", qratio, 4.0, 3.4 <= qratio <= 4.6,
               "|Phi| ratio for eps0 vs eps0/2")

    checks.write(out / "verify.csv")
    lines = [f"label: {cfg.get('run', 'label')}", "deterministic battery, no RNG draws", ""]
    lines += [f"[{'pass' if r[3] else 'FAIL'}] {r[0]}: value={_fmt(r[1])} threshold={_fmt(r[2])}"
              for r in checks.rows]
    (out / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"verify all: wrote verify.csv, report.txt, sharpness and qsmall CSVs to {out}")
    if not checks.ok:
        raise CheckFailure("verification failed; report retained in report.txt")


# ---- argument parsing --------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=None,
                        help="run configuration file (flat key = value with sections)")
    common.add_argument("--out", metavar="DIR", default="out",
                        help="artifact directory (created if missing)")
    common.add_argument("--threads", metavar="N", type=int, default=None,
                        help="override run.threads")

    parser = argparse.ArgumentParser(
        prog="conedata",
        description="Cone-supported vacuum initial data: seeds, kernels, solver, diagnostics.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("seed", parents=[common],
                       help="build the seed pair, dump fields and decay samples")
    p.set_defaults(handler=run_seed)

    k = sub.add_parser("kernels", help="kernel family checks")
    ksub = k.add_subparsers(dest="subcommand")
    p = ksub.add_parser("verify", parents=[common],
                        help="delta identities, homogeneity, outgoing support")
    p.set_defaults(handler=run_kernels_verify)

    p = sub.add_parser("constraints", parents=[common],
                       help="constraint residual of dumped fields")
    p.set_defaults(handler=run_constraints)

    p = sub.add_parser("solve", parents=[common],
                       help="run the fixed-point solver and dump the solution")
    p.set_defaults(handler=run_solve)

    d = sub.add_parser("diagnose", help="decay and sharpness diagnostics")
    dsub = d.add_subparsers(dest="subcommand")
    p = dsub.add_parser("decay", parents=[common],
                        help="ray decay tables and slope fits")
    p.set_defaults(handler=run_diagnose_decay)
    p = dsub.add_parser("sharpness", parents=[common],
                        help="far-field shell increments for s' in {s, s+1}")
    p.set_defaults(handler=run_diagnose_sharpness)

    v = sub.add_parser("verify", help="aggregated verification")
    vsub = v.add_subparsers(dest="subcommand")
    p = vsub.add_parser("all", parents=[common],
                        help="full check battery with pass/fail report")
    p.set_defaults(handler=run_verify_all)

    return parser


def _prepare(args) -> tuple:
    cfg = load_config(args.config)
    if args.threads is not None:
        values = {sec: dict(kv) for sec, kv in cfg.values.items()}
        values["run"]["threads"] = args.threads
        cfg = RunConfig(values).validate()
    threads = cfg.get("run", "threads")
    if threads > 1:
        try:
            import numba
            numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
        except (ImportError, ValueError):
            pass
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "effective-config").write_text(emit_config(cfg), encoding="utf-8")
    return cfg, out


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_help()
        return 2
    try:
        cfg, out = _prepare(args)
        handler(cfg, out)
    except (ConfigError, FormatError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return 3
    except (SolverError, PositivityError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
