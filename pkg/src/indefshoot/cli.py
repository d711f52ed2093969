"""Command-line interface.

Subcommands: solve (multiplicity at one parameter pair), sweep
(bifurcation diagram data), continua (phase-plane curve exports),
thresholds (closed-form parameter bounds), verify (trapping and
prohibited-region suites), conjecture (multi-hump section scan).
All file output is plot-ready CSV/JSON with a provenance header; byte
output is deterministic for identical configuration and seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .bifurcation import (SWEEP_INTEGRATOR, SweepConfig, branches_to_csv,
                          conjecture_scan, sweep, sweep_summary)
from .errors import AdmissibilityError, NumericsError
from .integrator import DEFAULT_CONFIG, IntegratorConfig
from .model import (ParameterPair, delta_tilde, delta_tilde_backward,
                    load_problem, neumann_necessary_mu, omega_sigma_default,
                    threshold_lambda_star, threshold_lambda_star_star,
                    threshold_mu_star)
from .phaseplane import (SET_X01, SET_Y_GE0, SET_Y_LE0, InitialSet,
                         check_prohibited, check_trapping, shoot_set)
from .shooting import (BoundaryConditionType, solution_records,
                       solve_multiplicity)


def _add_common(sp, problem_required=True):
    sp.add_argument("--problem", required=problem_required,
                    help="problem definition JSON file")
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--rel-tol", type=float, default=None)
    sp.add_argument("--abs-tol", type=float, default=None)
    sp.add_argument("--max-step", type=float, default=None)
    sp.add_argument("--event-tol", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=None,
                    help="worker thread cap (default: machine parallelism; "
                         "env INDEFSHOOT_THREADS)")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="indefshoot",
        description="Shooting solver for sign-alternating-weight boundary "
                    "value problems")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="positive solutions at one (lambda, mu)")
    _add_common(sp)
    sp.add_argument("--bc", required=True,
                    choices=["dirichlet", "neumann", "mixed1", "mixed2"])
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--kappa", type=float, default=None)

    sp = sub.add_parser("sweep", help="mu sweep at fixed lambda")
    _add_common(sp)
    sp.add_argument("--bc", required=True,
                    choices=["dirichlet", "neumann", "mixed1", "mixed2"])
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--mu-min", type=float, required=True)
    sp.add_argument("--mu-max", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--kappa", type=float, default=None)

    sp = sub.add_parser("continua", help="continuum CSVs for the four "
                                         "initial sets")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--kappa", type=float, default=None)

    sp = sub.add_parser("thresholds", help="closed-form parameter bounds")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--nu0", type=float, default=None)
    sp.add_argument("--nu1", type=float, default=None)
    sp.add_argument("--t1", type=float, default=None)
    sp.add_argument("--nu-t", type=float, default=None)
    sp.add_argument("--t1-right", type=float, default=None)
    sp.add_argument("--nu2", type=float, default=None)
    sp.add_argument("--nu-sigma", type=float, default=None)
    sp.add_argument("--t2", type=float, default=None)
    sp.add_argument("--omega-sigma", type=float, default=None)

    sp = sub.add_parser("verify", help="trapping and prohibited-region "
                                       "Monte-Carlo suites")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--samples", type=int, default=1000)

    sp = sub.add_parser("conjecture", help="multi-hump section scan")
    _add_common(sp)
    sp.add_argument("--bc", required=True,
                    choices=["dirichlet", "neumann", "mixed1", "mixed2"])
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--kappas", default=None,
                    help="comma-separated section values")
    return ap


def _config(args, base: IntegratorConfig) -> IntegratorConfig:
    kw = {}
    for name, attr in (("rel_tol", "rel_tol"), ("abs_tol", "abs_tol"),
                       ("max_step", "max_step"), ("event_tol", "event_tol")):
        v = getattr(args, name, None)
        if v is not None:
            kw[attr] = v
    if not kw:
        return base
    return IntegratorConfig(**{**base.__dict__, **kw})


def _provenance(args, cfg: IntegratorConfig) -> str:
    blob = {k: v for k, v in sorted(vars(args).items()) if k != "out"}
    blob["version"] = __version__
    digest = hashlib.sha256(
        json.dumps(blob, sort_keys=True, default=str).encode()).hexdigest()
    return (f"indefshoot {__version__} config={digest[:12]} "
            f"rel_tol={cfg.rel_tol:g} abs_tol={cfg.abs_tol:g} "
            f"event_tol={cfg.event_tol:g} seed={getattr(args, 'seed', 0)}")


def _set_threads(args):
    n = args.threads
    if n is None:
        env = os.environ.get("INDEFSHOOT_THREADS")
        n = int(env) if env else None
    if n is not None:
        import numba
        numba.set_num_threads(max(1, n))


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _cmd_solve(args) -> int:
    w, gspec = load_problem(args.problem)
    cfg = _config(args, DEFAULT_CONFIG)
    prov = _provenance(args, cfg)
    bc = BoundaryConditionType.from_name(args.bc)
    p = ParameterPair(args.lam, args.mu)
    sols = solve_multiplicity(w, gspec, p, bc, args.kappa, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "solutions.json",
                {"provenance": prov, "solutions": solution_records(sols)})
    for i, sol in enumerate(sols):
        sol.trajectory.to_csv(out / f"sol_{i}.csv", provenance=prov)
    print(f"{len(sols)} solution(s) written to {out / 'solutions.json'}")
    return 0


def _cmd_sweep(args) -> int:
    w, gspec = load_problem(args.problem)
    cfg = _config(args, SWEEP_INTEGRATOR)
    prov = _provenance(args, cfg)
    sc = SweepConfig(lam=args.lam, mu_min=args.mu_min, mu_max=args.mu_max,
                     n_steps=args.steps,
                     bc=BoundaryConditionType.from_name(args.bc),
                     kappa=args.kappa)
    branches = sweep(w, gspec, sc, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    branches_to_csv(branches, out / "branches.csv", provenance=prov)
    summary = sweep_summary(branches, sc)
    summary["provenance"] = prov
    _write_json(out / "sweep_summary.json", summary)
    n_closed = sum(1 for b in branches if b.closed)
    print(f"{len(branches)} branch rows ({n_closed} closed) written to "
          f"{out / 'branches.csv'}")
    return 0


def _cmd_continua(args) -> int:
    w, gspec = load_problem(args.problem)
    cfg = _config(args, DEFAULT_CONFIG)
    prov = _provenance(args, cfg)
    p = ParameterPair(args.lam, args.mu)
    kappa = args.kappa if args.kappa is not None else w.default_section()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    specs = [
        ("x01_forward", InitialSet(SET_X01, 0.0)),
        ("yplus_forward", InitialSet(SET_Y_GE0, 0.0,
                                     y_cap=2 * delta_tilde(w, gspec, p.lam))),
        ("x01_backward", InitialSet(SET_X01, w.duration)),
        ("yminus_backward", InitialSet(
            SET_Y_LE0, w.duration,
            y_cap=2 * delta_tilde_backward(w, gspec, p.lam))),
    ]
    for name, iset in specs:
        c = shoot_set(w, gspec, p, iset, kappa, cfg)
        c.to_csv(out / f"continuum_{name}.csv", provenance=prov)
    print(f"4 continuum files written to {out}")
    return 0


def _cmd_thresholds(args) -> int:
    w, gspec = load_problem(args.problem)
    have = lambda *names: all(getattr(args, n) is not None for n in names)
    printed = False
    if have("nu0", "nu1", "t1"):
        v = threshold_lambda_star(w, gspec, args.nu0, args.nu1, args.t1)
        print(f"lambda_star(nu0={args.nu0}, nu1={args.nu1}, t1={args.t1}) = {v:.12g}")
        printed = True
        nu_t = args.nu_t if args.nu_t is not None else args.nu0
        t1r = args.t1_right if args.t1_right is not None \
            else w.duration - args.t1
        vv = threshold_lambda_star_star(w, gspec, args.nu1, nu_t, t1r)
        print(f"lambda_star_star(nu1={args.nu1}, nuT={nu_t}, t1={t1r}) = {vv:.12g}")
    if have("nu2", "nu_sigma", "t2"):
        om = args.omega_sigma
        if om is None:
            if args.lam is None:
                raise AdmissibilityError(
                    "--omega-sigma or --lambda needed for the mu threshold")
            om = omega_sigma_default(w, gspec, args.lam)
        v = threshold_mu_star(w, gspec, args.nu2, args.nu_sigma, args.t2, om)
        print(f"mu_star(nu2={args.nu2}, nu_sigma={args.nu_sigma}, "
              f"t2={args.t2}, omega_sigma={om:.12g}) = {v:.12g}")
        printed = True
    if args.lam is not None:
        print(f"delta_tilde(lambda={args.lam}) = "
              f"{delta_tilde(w, gspec, args.lam):.12g}")
        print(f"neumann_necessary_mu(lambda={args.lam}) = "
              f"{neumann_necessary_mu(w, args.lam):.12g}")
        printed = True
    if not printed:
        print("no thresholds requested: pass --nu0/--nu1/--t1, "
              "--nu2/--nu-sigma/--t2, or --lambda")
    return 0


def _cmd_verify(args) -> int:
    w, gspec = load_problem(args.problem)
    cfg = _config(args, DEFAULT_CONFIG)
    prov = _provenance(args, cfg)
    p = ParameterPair(args.lam, args.mu)
    trap = check_trapping(w, gspec, p, args.samples, seed=args.seed, cfg=cfg)
    proh = check_prohibited(w, gspec, p, args.samples, seed=args.seed, cfg=cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = {"provenance": prov, "trapping": trap, "prohibited": proh}
    _write_json(out / "verify_report.json", report)
    failed = 0
    for section in (trap, proh):
        for key, val in section.items():
            if isinstance(val, dict):
                print(f"{key}: {val['pass']}/{args.samples} pass")
                failed += val["fail"]
    print(f"report written to {out / 'verify_report.json'}")
    if failed:
        raise NumericsError(f"{failed} Monte-Carlo sample(s) failed")
    return 0


def _cmd_conjecture(args) -> int:
    w, gspec = load_problem(args.problem)
    cfg = _config(args, DEFAULT_CONFIG)
    prov = _provenance(args, cfg)
    p = ParameterPair(args.lam, args.mu)
    bc = BoundaryConditionType.from_name(args.bc)
    kappas = None
    if args.kappas:
        kappas = [float(v) for v in args.kappas.split(",")]
    report = conjecture_scan(w, gspec, p, bc, kappas, cfg)
    report["provenance"] = prov
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "conjecture_report.json", report)
    print(f"humps={report['humps']} count={report['count']} "
          f"(3^m-1 would be {report['expected_if_conjectured']}); "
          f"report written to {out / 'conjecture_report.json'}")
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "continua": _cmd_continua,
    "thresholds": _cmd_thresholds,
    "verify": _cmd_verify,
    "conjecture": _cmd_conjecture,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _set_threads(args)
        return _COMMANDS[args.command](args)
    except (AdmissibilityError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
