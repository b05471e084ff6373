"""``infofringe`` command line.

Exit codes: 0 success, 2 usage, 3 unreadable input, 4 non-identifiable
data, 5 failed check.  ``INFOFRINGE_SEED`` overrides the default seed.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .exceptions import DomainError, NonIdentifiableError, ParseError
from .fitting import fit_k
from .geometry import (
    Sign,
    TRANSFORMS,
    closed_form_fringe,
    constant_metric_ode_solve,
    infer_distribution,
    reparametrized_fringe,
)
from .io import RunManifest, format_report, read_count_data, write_csv
from .oracle import ScalePreparation, SetupConfig, SetupKind
from .trials import POLICIES, delayed_choice_run, empirical_distribution, run_trials

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_NONIDENTIFIABLE = 4
EXIT_CHECK = 5

SEED_ENV = "INFOFRINGE_SEED"
ODE_TOL = 1e-6


class UsageError(Exception):
    pass


def _default_seed() -> int:
    value = os.environ.get(SEED_ENV)
    if value is None:
        return 0
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {value!r}") from None


def _resolve(args):
    """Config, fringe wavenumber and sign from the physical flags.

    ``--p`` and ``--k`` must agree when both are given.  A preparation with
    no length scale (``--scale none``) fixes ``k = 0``.
    """
    k, p = args.k, args.p
    if k is not None and p is not None and not math.isclose(k, p, rel_tol=1e-12, abs_tol=0.0):
        raise UsageError(f"--k {k} and --p {p} disagree; k is identified with p")
    scale = ScalePreparation(args.scale)
    if scale is ScalePreparation.NONE:
        if k not in (None, 0.0):
            raise UsageError("--scale none fixes k = 0")
        k_eff = 0.0
    else:
        k_eff = k if k is not None else (p if p is not None else 0.0)
    p_eff = p if p is not None else (k if k is not None else 0.0)

    if getattr(args, "x", None) is not None:
        if args.r1 is not None or args.r2 is not None:
            raise UsageError("give either --x or --r1/--r2")
        r1, r2 = (args.x, 0.0) if args.x >= 0 else (0.0, -args.x)
    else:
        r1 = args.r1 if args.r1 is not None else 0.0
        r2 = args.r2 if args.r2 is not None else 0.0
    config = SetupConfig(
        kind=SetupKind(args.setup),
        r1=r1,
        r2=r2,
        p=p_eff,
        scale_prepared=scale,
        flip_detectors=args.flip_detectors,
    )
    sign = Sign.MINUS if args.flip_detectors else Sign.PLUS
    return config, k_eff, sign


def _manifest(args, command, outputs=()):
    params = {
        key: value
        for key, value in vars(args).items()
        if key not in ("func", "command", "seed") and value is not None
    }
    return RunManifest(command, params, getattr(args, "seed", None), __version__, list(outputs))


def _emit(text, out_path=None, header=()):
    lines = "".join(f"# {line}\n" for line in header) + text
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(lines)
    else:
        sys.stdout.write(lines)


def cmd_simulate(args) -> int:
    config, k, sign = _resolve(args)
    law = closed_form_fringe(k, sign) if config.scale_prepared is ScalePreparation.FREE_PARAMETER else None
    result = run_trials(config, args.n, args.seed, law=law, record=bool(args.clicks_out), workers=args.workers)
    theory = infer_distribution(config, k)
    emp = empirical_distribution(result.n1, result.n2)
    z1 = emp.z_score(theory.p1)
    report = {
        "setup": config.kind.value,
        "x": config.x,
        "k": k,
        "n": result.n,
        "n1": result.n1,
        "n2": result.n2,
        "p1_theory": theory.p1,
        "p2_theory": theory.p2,
        "p1_hat": emp.p1,
        "p2_hat": emp.p2,
        "stderr": emp.stderr,
        "z1": z1,
        "z2": -z1,
    }
    manifest = _manifest(args, "simulate", [args.clicks_out] if args.clicks_out else [])
    if args.clicks_out:
        result.clicks.to_csv(args.clicks_out, manifest.header_lines())
    _emit(format_report(report), header=manifest.header_lines())
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.points > 1 and not args.x_max > args.x_min:
        raise UsageError("--x-max must exceed --x-min")
    args.x = None
    base, k, sign = _resolve(args)
    law = closed_form_fringe(k, sign)
    xs = np.linspace(args.x_min, args.x_max, args.points)
    rows = []
    for j, x in enumerate(xs):
        config = SetupConfig.from_path_difference(
            float(x),
            kind=base.kind,
            p=base.p,
            scale_prepared=base.scale_prepared,
            flip_detectors=base.flip_detectors,
        )
        theory = infer_distribution(config, k)
        sim_law = law if base.scale_prepared is ScalePreparation.FREE_PARAMETER else None
        # point j uses trial ids [j n, (j + 1) n) of the shared seed
        res = run_trials(config, args.n, args.seed, law=sim_law, workers=args.workers, first_trial=j * args.n)
        emp = empirical_distribution(res.n1, res.n2)
        rows.append((float(x), theory.p1, theory.p2, emp.p1, emp.p2, emp.stderr, res.n1, res.n2))
    manifest = _manifest(args, "scan", [args.out] if args.out else [])
    columns = ["x", "P1_theory", "P2_theory", "p1_hat", "p2_hat", "stderr", "n1", "n2"]
    write_csv(args.out or sys.stdout, columns, rows, manifest.header_lines())
    return EXIT_OK


def _generated_counts(args):
    law = closed_form_fringe(args.k_true, Sign(args.sign))
    xs = np.linspace(args.x_min, args.x_max, args.points)
    rows = []
    for j, x in enumerate(xs):
        config = SetupConfig.from_path_difference(float(x), scale_prepared="free")
        res = run_trials(config, args.n, args.seed, law=law, first_trial=j * args.n)
        rows.append((float(x), res.n1, res.n2))
    return np.array(rows, dtype=float)


def cmd_fit(args) -> int:
    if (args.input is None) == (args.k_true is None):
        raise UsageError("give an input CSV or --k-true to generate data, not both")
    if args.input is not None:
        data = read_count_data(args.input)
    else:
        if args.points < 1 or args.n < 1:
            raise UsageError("--points and --n must be >= 1")
        data = _generated_counts(args)
    est = fit_k(data, Sign(args.sign), args.k_max, args.n_grid)
    manifest = _manifest(args, "fit", [args.out] if args.out else [])
    _emit(format_report(est.as_report()), args.out, manifest.header_lines())
    return EXIT_OK


def cmd_ode_check(args) -> int:
    if not args.k > 0:
        raise UsageError("--k must be > 0")
    if not args.step > 0:
        raise UsageError("--step must be > 0")
    x_max = args.x_max if args.x_max is not None else 2 * math.pi
    if not x_max >= args.step:
        raise UsageError("--x-max must be >= --step")
    table = constant_metric_ode_solve(args.k, args.f0, x_max, args.step)
    dev = table.sup_deviation(closed_form_fringe(args.k, Sign.from_boundary(args.f0)))
    ok = dev <= args.tol
    manifest = _manifest(args, "ode-check", [args.out] if args.out else [])
    if args.out:
        table.to_csv(args.out, manifest.header_lines())
    report = {"k": args.k, "f0": args.f0, "step": args.step, "x_max": x_max,
              "sup_norm": dev, "tol": args.tol, "pass": ok}
    _emit(format_report(report), header=manifest.header_lines())
    return EXIT_OK if ok else EXIT_CHECK


def reparam_rows(k, sign, x_max, points):
    xs = np.linspace(x_max / points, x_max, points)
    domain = (0.0, x_max)
    physical = closed_form_fringe(k, sign).evaluate(xs)
    curves = {name: reparametrized_fringe(name, k, sign, domain)(xs) for name in TRANSFORMS}
    d_sqrt = np.abs(curves["sqrt"] - physical)
    d_square = np.abs(curves["square"] - physical)
    rows = zip(xs, physical, curves["identity"], curves["sqrt"], curves["square"], d_sqrt, d_square)
    return list(rows), float(np.max(d_sqrt)), float(np.max(d_square))


def cmd_reparam_study(args) -> int:
    if not args.x_max > 0:
        raise UsageError("--x-max must be > 0")
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    rows, m_sqrt, m_square = reparam_rows(args.k, Sign(args.sign), args.x_max, args.points)
    manifest = _manifest(args, "reparam", [args.out] if args.out else [])
    columns = ["x", "f_physical", "f_identity", "f_sqrt", "f_square", "abs_d_sqrt", "abs_d_square"]
    summary = f"max_abs_d_sqrt={m_sqrt!r}, max_abs_d_square={m_square!r}"
    if args.out:
        write_csv(args.out, columns, rows, manifest.header_lines())
        with open(args.out, "a") as fh:
            fh.write(f"# {summary}\n")
        print(summary)
    else:
        write_csv(sys.stdout, columns, rows, manifest.header_lines())
        sys.stdout.write(f"# {summary}\n")
    return EXIT_OK


def cmd_delayed(args) -> int:
    if args.policy not in POLICIES:
        raise UsageError(f"unknown policy {args.policy!r}; choose from {', '.join(sorted(POLICIES))}")
    args.setup = "recombined"
    base, k, sign = _resolve(args)
    law = closed_form_fringe(k, sign) if base.scale_prepared is ScalePreparation.FREE_PARAMETER else None
    stream = delayed_choice_run(base, args.n, args.seed, args.policy, args.policy_seed, law, args.workers)
    report = {"policy": args.policy, "x": base.x, "k": k, "n": len(stream)}
    for kind in (SetupKind.OPEN_ARMS, SetupKind.RECOMBINED):
        n1, n2 = stream.counts(kind)
        theory = infer_distribution(base.with_kind(kind), k)
        tag = kind.value
        report[f"{tag}.n"] = n1 + n2
        report[f"{tag}.p1_theory"] = theory.p1
        if n1 + n2 == 0:
            continue
        emp = empirical_distribution(n1, n2)
        report[f"{tag}.p1_hat"] = emp.p1
        report[f"{tag}.p2_hat"] = emp.p2
        report[f"{tag}.stderr"] = emp.stderr
        report[f"{tag}.z1"] = emp.z_score(theory.p1)
    manifest = _manifest(args, "delayed", [args.clicks_out] if args.clicks_out else [])
    if args.clicks_out:
        stream.to_csv(args.clicks_out, manifest.header_lines())
    _emit(format_report(report), header=manifest.header_lines())
    return EXIT_OK


def _add_config_flags(sp, with_setup=True, with_x=True):
    if with_setup:
        sp.add_argument("--setup", choices=[k.value for k in SetupKind], default="recombined")
    sp.add_argument("--r1", type=float, help="length of arm 1")
    sp.add_argument("--r2", type=float, help="length of arm 2")
    if with_x:
        sp.add_argument("--x", type=float, help="path difference r1 - r2 (instead of --r1/--r2)")
    sp.add_argument("--p", type=float, help="particle wavenumber (hbar = 1)")
    sp.add_argument("--k", type=float, help="fringe wavenumber; must equal --p if both given")
    sp.add_argument("--scale", choices=[s.value for s in ScalePreparation], default="momentum",
                    help="which length scale the preparation fixes")
    sp.add_argument("--flip-detectors", action="store_true",
                    help="label the dark port at x = 0 as detector 1")


def _add_run_flags(sp, n_default):
    sp.add_argument("--n", type=int, default=n_default, help="number of trials")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infofringe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="Monte Carlo clicks for one configuration")
    _add_config_flags(sp)
    _add_run_flags(sp, 100_000)
    sp.add_argument("--clicks-out", help="write the per-trial click log here")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("scan", help="theory and simulated frequencies over an x sweep")
    _add_config_flags(sp, with_x=False)
    _add_run_flags(sp, 10_000)
    sp.add_argument("--x-min", type=float, default=0.0)
    sp.add_argument("--x-max", type=float, default=2 * math.pi)
    sp.add_argument("--points", type=int, default=9)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("fit", help="maximum-likelihood k from a CSV or generated data")
    sp.add_argument("input", nargs="?", help="scan output or click log")
    sp.add_argument("--sign", choices=[s.value for s in Sign], default="plus")
    sp.add_argument("--k-max", type=float)
    sp.add_argument("--n-grid", type=int)
    sp.add_argument("--k-true", type=float, help="generate data at this k instead of reading a file")
    sp.add_argument("--x-min", type=float, default=0.0)
    sp.add_argument("--x-max", type=float, default=math.pi)
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--n", type=int, default=100_000, help="trials per generated point")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("ode-check", help="integrate the constant-rate ODE and compare with the closed form")
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--f0", type=int, choices=[0, 1], default=1)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--x-max", type=float)
    sp.add_argument("--tol", type=float, default=ODE_TOL)
    sp.add_argument("--out", help="write the integrated table here")
    sp.set_defaults(func=cmd_ode_check)

    sp = sub.add_parser("reparam", help="fringe from the rule applied in sqrt(x) and x^2")
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--sign", choices=[s.value for s in Sign], default="plus")
    sp.add_argument("--x-max", type=float, default=2 * math.pi)
    sp.add_argument("--points", type=int, default=1000)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_reparam_study)

    sp = sub.add_parser("delayed", help="per-trial choice between open and recombined arms")
    _add_config_flags(sp, with_setup=False)
    _add_run_flags(sp, 1_000_000)
    sp.add_argument("--policy", default="fair-coin", help=", ".join(sorted(POLICIES)))
    sp.add_argument("--policy-seed", type=int)
    sp.add_argument("--clicks-out")
    sp.set_defaults(func=cmd_delayed)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if "seed" in vars(args) and args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with EXIT_USAGE
    except ParseError as exc:
        print(f"infofringe: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonIdentifiableError as exc:
        print(f"infofringe: not identifiable: {exc}", file=sys.stderr)
        return EXIT_NONIDENTIFIABLE
    except DomainError as exc:
        print(f"infofringe: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
