"""Batch command-line entry point.

Subcommands (exit code 0: all checks pass; 1: at least one failed, artifacts
still written; 2: usage or configuration error):

  operator-eval          nonlocal operator on a built-in profile over points
  verify-regularity      derivative commutation and Hölder-transfer checks
  verify-barriers        step-barrier sign and tail-bracket suite
  build-counterexample   construct the layer profile, export its CSV
  verify-counterexample  constant inequalities, touchpoints, sandwiches,
                         junctions, monotonicity, derivative oracles
  reconstruct-potential  potential table from the profile, shape checks
  solve                  energy minimization on a truncated grid
  fit-decay              power/envelope fits on a profile CSV
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, get, load_config, require
from .errors import FracLayerError
from .kernels import KernelSpec, fractional_kernel, perturbed_kernel
from .reports import Report

USAGE_ERROR = 2


def _kernel_from(cfg: dict) -> KernelSpec:
    s = require(cfg, "kernel", "s")
    form = get(cfg, "fractional", "kernel", "form")
    lam = get(cfg, 1.0, "kernel", "lam")
    Lam = get(cfg, 1.0, "kernel", "Lam")
    if form == "fractional":
        return fractional_kernel(s, lam, Lam)
    if form == "scaled-fractional":
        return KernelSpec(s=s, lam=lam, Lam=Lam, form=form,
                          scale=get(cfg, 0.5 * (lam + Lam), "kernel", "scale"))
    if form == "tabulated-perturbation":
        return perturbed_kernel(s, lam, Lam,
                                wobble=get(cfg, 0.5, "kernel", "wobble"))
    raise ConfigError(f"unknown kernel.form {form!r}")


def _well_from(cfg: dict):
    from .potentials import WellParams

    return WellParams(
        alpha=require(cfg, "potential", "alpha"),
        beta=require(cfg, "potential", "beta"),
        gamma=require(cfg, "potential", "gamma"),
        delta=require(cfg, "potential", "delta"),
        c1=get(cfg, 1.0, "potential", "c1"), c2=get(cfg, 1.0, "potential", "c2"),
        c3=get(cfg, 1.0, "potential", "c3"), c4=get(cfg, 1.0, "potential", "c4"),
        mu=get(cfg, 0.5, "potential", "mu"),
        mode=get(cfg, "pure-power", "potential", "mode"))


def _layer_params_from(cfg: dict, mode: str):
    from .construction import LayerParams

    block = cfg.get("counterexample", {})
    return LayerParams(
        s=require(cfg, "counterexample", "s"),
        alpha=block.get("alpha", 5.8), beta=block.get("beta", 5.0),
        gamma=block.get("gamma", 5.5), delta=block.get("delta", 5.0),
        rho=block.get("rho"), mode=mode,
        k_max=int(block.get("k_max", 3)))


def cmd_operator_eval(cfg, out, seed, mode) -> Report:
    from . import profiles as pr
    from .kernels import symbol_constant
    from .quadrature import QuadConfig, eval_lk

    kern = _kernel_from(cfg)
    pts = [float(v) for v in
           str(get(cfg, "0.0,0.5,1.0", "operator", "points")).split(",")]
    name = get(cfg, "cosine", "operator", "profile")
    omega = get(cfg, 1.0, "operator", "omega")
    u = {"cosine": pr.cosine(omega), "tanh": pr.tanh_profile(),
         "gaussian": pr.gaussian(), "constant": pr.constant(0.7)}[name]
    qc = QuadConfig(tol=get(cfg, 1e-6, "operator", "tol"))
    rep = Report("operator-eval", cfg)
    rows = []
    for x in pts:
        ov = eval_lk(kern, u, x, qc)
        rows.append((x, ov.value, ov.error))
        rep.add(f"operator-finite-x={x:g}", np.isfinite(ov.value), ov.error,
                f"value={ov.value:.6e}")
    if name == "cosine" and kern.form == "fractional":
        C = symbol_constant(kern.s)
        for x, v, e in rows:
            ref = -C * omega ** (2 * kern.s) * np.cos(omega * x)
            rel = abs(v - ref) / max(abs(ref), 1e-300)
            rep.add(f"plane-wave-oracle-x={x:g}", rel < 1e-4, 1e-4 - rel)
    with open(out / "operator_eval.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "value", "error"])
        for r in rows:
            w.writerow([f"{v:.17g}" for v in r])
    return rep


def cmd_verify_regularity(cfg, out, seed, mode) -> Report:
    from . import profiles as pr
    from .quadrature import (QuadConfig, check_derivative_commutation,
                             check_holder_transfer)

    kern = _kernel_from(cfg)
    rep = Report("verify-regularity", cfg)
    qc = QuadConfig(tol=1e-6)
    corpus = [pr.gaussian(), pr.tanh_profile(), pr.cosine(1.0)]
    xs = [-1.0, -0.3, 0.0, 0.7, 2.0]
    for u in corpus:
        r = check_derivative_commutation(kern, u, xs, h=1e-3, cfg=qc)
        rep.add(f"derivative-commutation-{u.name}", r.passed,
                r.tolerance - max(r.discrepancies))
    if 2.0 * kern.s < 1.0:
        rng = np.random.default_rng(seed)
        pairs = [(a, a + d) for a, d in zip(rng.uniform(-1, 1, 5),
                                            rng.uniform(0.1, 0.5, 5))]
        hr = check_holder_transfer(kern, pr.lipschitz_bump(), pairs,
                                   alpha=1.0, seminorm=1.0, cfg=qc)
        rep.add("holder-transfer-cap", hr.passed,
                hr.cap - max(hr.ratios))
    return rep


def cmd_verify_barriers(cfg, out, seed, mode) -> Report:
    from .barriers import (StepBarrier, asymptotic_operator_limit,
                           derivative_barrier, exact_power_bump,
                           lower_bound_barrier, step_constant_cap,
                           verify_step_barrier, TailBarrier)

    kern = _kernel_from(cfg)
    rep = Report("verify-barriers", cfg)
    rng = np.random.default_rng(seed)
    cap = step_constant_cap(kern.s, kern.lam, kern.Lam)
    for i in range(int(get(cfg, 10, "barriers", "n_step"))):
        xbar = rng.uniform(1.0, 4.0)
        A = rng.uniform(0.2, 1.5)
        alpha = rng.uniform(0.05, 0.5)
        capv = 1.0 - alpha * xbar ** (-A)
        b = StepBarrier(xbar=xbar, alpha=alpha, A=A,
                        B=rng.uniform(0.0, min(0.6, capv)),
                        D=rng.uniform(0.0, capv - 1e-9))
        r = verify_step_barrier(kern, b, [10 * xbar, 40 * xbar, 200 * xbar],
                                c_cap=cap)
        rep.add(f"step-barrier-negative-{i}", r.negative,
                -max(r.values))
        rep.add(f"step-barrier-capped-{i}", r.passed,
                min(bv - v for v, bv in zip(r.values, r.bound)))
    tb = exact_power_bump(2.0, 1.0)
    xs = [1e3, 1e4, 1e5]
    up = asymptotic_operator_limit(kern, tb, xs, "upper")
    rep.add("tail-bracket-upper", up.passed, up.bound - up.estimate)
    lo_tb = TailBarrier(Cbar=tb.Cbar * 0.5, kappa=tb.kappa, sigma=tb.sigma,
                        tau=tb.tau, gamma_low=tb.gamma_low, body=tb.body)
    lo = asymptotic_operator_limit(kern, lo_tb, xs, "lower")
    rep.add("tail-bracket-lower", lo.passed, lo.estimate - lo.bound)
    db = derivative_barrier(kern.s, 5.8, 5.0, 5.5, 5.0, xbar=6.0)
    updb = asymptotic_operator_limit(kern, db, [6e3, 6e4, 6e5], "upper")
    rep.add("derivative-barrier-upper", updb.passed,
            updb.bound - updb.estimate)
    lb = lower_bound_barrier(kern.s, 5.0, 2.0, 0.6, 0.8, kern.lam, cap, 2.0)
    rep.add("comparison-barrier-invariant", True,
            1.0 - lb.alpha * lb.xbar ** (-lb.A) - lb.D)
    return rep


def cmd_build_counterexample(cfg, out, seed, mode) -> Report:
    from .construction import build_constants, build_profile

    p = _layer_params_from(cfg, mode)
    rep = Report("build-counterexample", cfg)
    cx = build_constants(p)
    rep.add("constants-built", True, cx.rho, f"rho={cx.rho:.6g},a0={cx.a0:.6g}")
    if mode == "desk":
        prof = build_profile(p, cx)
        mono = prof.monotone_report(4000)
        rep.add("profile-monotone", mono["monotone"], 0.0 if mono["monotone"]
                else -1.0)
        jm = prof.junction_mismatches()
        worst = max(r["worst"] for r in jm)
        rep.add("junction-regularity", worst < 1e-10, 1e-10 - worst)
        prof.export_csv(out / "profile.csv")
    else:
        rep.add("paper-mode-scales-double-log", True, float(cx.lnlnb[-1]))
    return rep


def cmd_verify_counterexample(cfg, out, seed, mode) -> Report:
    from . import verify_construction as vc
    from .construction import build_constants, build_profile

    p = _layer_params_from(cfg, mode)
    rep = Report("verify-counterexample", cfg)
    cx = build_constants(p)
    rng = np.random.default_rng(seed)
    tuples = []
    for _ in range(int(get(cfg, 40, "counterexample", "n_sweep"))):
        s = rng.uniform(0.1, 0.9)
        beta = rng.uniform(2.0, 6.0)
        delta = rng.uniform(2.0, 6.0)
        tuples.append((s, beta + rng.uniform(1e-3, 0.999), beta,
                       delta + rng.uniform(1e-3, 0.999), delta))
    rep.add_records(vc.inequality_sweep(tuples))
    rep.add_records(vc.equality_case_records())
    rep.add_records(vc.touchpoint_reduced_records(cx))
    rep.add_records(vc.ordering_chain_records(cx))
    rep.add(*(lambda r: (r.id, r.passed, r.worst_slack, r.location))(
        vc.check_log_power_ode(2.0, 10.0, 3.0, 0.7,
                               np.linspace(0.01, 0.99, 50))))
    if mode == "desk":
        prof = build_profile(p, cx)
        rep.add_records(vc.touchpoint_desk_records(prof))
        rep.add_records(vc.profile_bound_records(prof))
        rep.add_records(vc.second_derivative_bound_records(prof))
        rep.add_records(vc.fd_agreement_records(prof))
        rep.add_records(vc.highprec_agreement_records(prof))
        mono = prof.monotone_report()
        rep.add("profile-monotone", mono["monotone"],
                0.0 if mono["monotone"] else -1.0,
                str({k: v for k, v in mono["sufficiency"].items()
                     if isinstance(v, bool)}))
    return rep


def cmd_reconstruct_potential(cfg, out, seed, mode) -> Report:
    from .construction import build_profile
    from .reconstruct import (reconstruct_potential, second_derivative_limit,
                              slope_mass, verify_potential_regularity,
                              verify_well_envelopes)

    p = _layer_params_from(cfg, "desk")
    kern = _kernel_from(cfg)
    rep = Report("reconstruct-potential", cfg)
    prof = build_profile(p)
    tab = reconstruct_potential(
        prof, kern,
        depth_decades=get(cfg, 8.0, "reconstruct", "depth_decades"))
    tab.to_csv(out / "potential.csv")
    rep.add("potential-positive", tab.interior_min() > 0, tab.interior_min())
    rep.add("equal-depth-closure", tab.closure_defect() <= 0.01,
            0.01 - tab.closure_defect())
    reg = verify_potential_regularity(tab)
    rep.add("curvature-regularity", reg.passed, reg.lipschitz_estimate)
    for e in verify_well_envelopes(tab, p):
        rep.add(f"curvature-envelopes-{e.side}", e.passed, e.tol,
                f"lower={e.lower_exponent:.3f},upper={e.upper_exponent:.3f}")
    m = slope_mass(prof, X=1e40)
    rep.add("slope-mass-2", abs(m - 2.0) < 1e-6, 1e-6 - abs(m - 2.0))
    for r in second_derivative_limit(prof, kern,
                                     [3e6, 1e7, 3e7, 1e8, 3e8, 1e9]):
        rep.add(f"curvature-operator-limit-side{r.side:+d}", r.passed,
                0.10 - r.rel_error, f"est={r.estimate:.4f}")
    return rep


def cmd_solve(cfg, out, seed, mode) -> Report:
    from .gridop import GridOperator
    from .potentials import make_potential
    from .solver import (SolveConfig, make_grid, minimize_energy,
                         tail_exponent)

    kern = _kernel_from(cfg)
    pot = make_potential(_well_from(cfg))
    L = get(cfg, 200.0, "solver", "L")
    n = int(get(cfg, 2048, "solver", "n"))
    sc = SolveConfig(tol=get(cfg, 1e-6, "solver", "tol"),
                     max_iter=int(get(cfg, 30000, "solver", "max_iter")))
    rep = Report("solve", cfg)
    res = minimize_energy(make_grid(L, n), pot, kern, sc)
    rep.add("solver-converged", res.converged, sc.tol - res.residual,
            f"iterations={res.iterations}")
    inc = bool(np.all(np.diff(res.profile.values) >= -1e-14))
    rep.add("profile-increasing", inc, 0.0 if inc else -1.0)
    for k, v in res.hypothesis_tags.items():
        rep.add(f"regime-tag-{k}", True, 1.0 if v else 0.0, str(v))
    fit_r = tail_exponent(res.profile, "right")
    fit_l = tail_exponent(res.profile, "left")
    rep.add("tail-exponent-right", True, fit_r.exponent,
            f"exp={fit_r.exponent:.4f}")
    rep.add("tail-exponent-left", True, fit_l.exponent,
            f"exp={fit_l.exponent:.4f}")
    op = GridOperator(kern, res.profile)
    r = op.apply(res.profile.values) - pot.W1(res.profile.values)
    with open(out / "solution.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "u", "residual"])
        for xi, ui, ri in zip(res.profile.x, res.profile.values, r):
            w.writerow([f"{xi:.17g}", f"{ui:.17g}", f"{ri:.17g}"])
    import json
    with open(out / "convergence.json", "w") as fh:
        json.dump({"iterations": res.iterations,
                   "final-residual": float(res.residual),
                   "energy-trace": [float(e) for e in res.energy_trace]},
                  fh, indent=1)
    return rep


def cmd_fit_decay(cfg, out, seed, mode) -> Report:
    from .analysis import fit_power_decay

    path = require(cfg, "fit", "csv")
    rep = Report("fit-decay", cfg)
    xs, us = [], []
    with open(path) as fh:
        rd = csv.DictReader(fh)
        for row in rd:
            xs.append(float(row["x"]))
            us.append(float(row["u"]))
    x = np.asarray(xs)
    u = np.asarray(us)
    for side in ("right", "left"):
        if side == "right":
            m = x > 0.5 * x.max()
            gap = 1.0 - u[m]
            xx = x[m]
        else:
            m = x < 0.5 * x.min()
            gap = 1.0 + u[m]
            xx = -x[m]
        good = gap > 1e-13
        fit = fit_power_decay(np.column_stack([xx[good], gap[good]]),
                              min_decades=0.25)
        rep.add(f"decay-fit-{side}", True, fit.exponent,
                f"exp={fit.exponent:.5f},residual={fit.residual:.3g}")
    return rep


COMMANDS = {
    "operator-eval": cmd_operator_eval,
    "verify-regularity": cmd_verify_regularity,
    "verify-barriers": cmd_verify_barriers,
    "build-counterexample": cmd_build_counterexample,
    "verify-counterexample": cmd_verify_counterexample,
    "reconstruct-potential": cmd_reconstruct_potential,
    "solve": cmd_solve,
    "fit-decay": cmd_fit_decay,
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="fraclayer",
        description="Nonlocal layer-profile laboratory batch runner")
    ap.add_argument("subcommand", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=False, help="key = value config file")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=["paper", "desk"], default="desk")
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE_ERROR if e.code not in (0, None) else 0
    try:
        cfg = load_config(args.config) if args.config else {}
    except (OSError, ConfigError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return USAGE_ERROR
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        rep = COMMANDS[args.subcommand](cfg, out, args.seed, args.mode)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except FracLayerError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    rep.write(out / f"{args.subcommand.replace('-', '_')}_report.json")
    print(rep.summary_line())
    return 0 if rep.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
