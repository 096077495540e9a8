"""Command-line interface: design, validate, serve.

Exit codes: 0 success, 2 configuration, 3 unattainable-design,
4 degeneracy, 5 small-sample, 1 any other engine failure.
"""

import argparse
import json
import math
import sys

from scipy import special

from .adjustment import TestWithLength
from .config import load_config, parse_config
from .errors import EngineError
from .oracle import simulate_length_criterion, simulate_power
from .report import default_cache_dir, execute_design

EXIT_CODES = {
    "configuration": 2,
    "unattainable-design": 3,
    "degeneracy": 4,
    "small-sample": 5,
}


def _exit_code(exc):
    return EXIT_CODES.get(exc.code, 1)


def _print_warnings(warnings, stream=None):
    for w in warnings:
        print(f"warning: {w}", file=stream if stream is not None else sys.stdout)


def _cmd_design(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        raw = json.loads(json.dumps(cfg.echo))
        raw["seed"] = args.seed
        cfg = parse_config(raw)
    cache_dir = None if args.no_cache else args.cache_dir
    payload, report, from_cache = execute_design(cfg, cache_dir=cache_dir)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload.decode("utf-8"))

    sssd = report["sssd"]
    print(
        f"SSSD ({sssd['stage']}): mu={sssd['mu']:.4f} sigma={sssd['sigma']:.4f} "
        f"l={sssd['l']:.6g} alpha={sssd['alpha']:.6g}"
    )
    print(f"classification: {report['classification']}")
    if report["recommendation"]:
        rec = report["recommendation"]
        print(f"recommended n per group: {rec['n']} (p_tilde={rec['p_tilde']:.4f})")
    _print_warnings(report["warnings"])
    if from_cache:
        print(f"(served from cache: {report['config_hash'][:12]})")
    return 0


def _percentile_sizes(mu, sigma, percentiles):
    return [int(math.ceil(mu + float(special.ndtri(p)) * sigma)) for p in percentiles]


def _cmd_validate(args):
    with open(args.report, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    cfg = parse_config(report["config"])
    if report.get("stage_two") is None:
        raise EngineError("report has no prior-adjusted stage to validate")
    s2 = report["stage_two"]
    l = report["stage_one"]["l"]
    test = TestWithLength(cfg.test, l)
    percentiles = [float(p) for p in args.percentiles.split(",") if p.strip()]
    reps = args.reps
    m = args.m

    rows = []
    for p in percentiles:
        n = int(math.ceil(s2["mu_hat"] + float(special.ndtri(p)) * s2["sigma_hat"]))
        est = simulate_length_criterion(
            cfg.design, cfg.priors, test, n, l, reps=reps, m=m, seed=args.seed,
            workers=args.workers,
        )
        rows.append((p, n, est))
    n_rec = report["recommendation"]["n"]
    power = simulate_power(
        cfg.design, cfg.priors, test, n_rec, reps=reps, m=m, seed=args.seed,
        workers=args.workers,
    )

    print(f"validation of report {report['config_hash'][:12]} (reps={reps}, m={m})")
    print(f"{'percentile':>10} {'n':>8} {'proportion':>11} {'se':>8}")
    for p, n, est in rows:
        print(f"{p:>10.2f} {n:>8d} {est.proportion:>11.4f} {est.se:>8.4f}")
    print(
        f"power at recommended n={n_rec}: {power.proportion:.4f} "
        f"(se {power.se:.4f}, target {cfg.test.target_power})"
    )
    _print_warnings(report.get("warnings", []))
    if args.out:
        table = {
            "config_hash": report["config_hash"],
            "reps": reps,
            "m": m,
            "seed": args.seed,
            "length_criterion": [
                {"percentile": p, "n": n, "proportion": e.proportion, "se": e.se}
                for p, n, e in rows
            ],
            "power_at_recommended": {
                "n": n_rec,
                "proportion": power.proportion,
                "se": power.se,
            },
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(table, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_serve(args):
    import uvicorn

    from .service import create_app

    app = create_app(cache_dir=args.cache_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eqdesign",
        description="Sample-size design for Bayesian equivalence and "
        "noninferiority tests",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser("design", help="run the two-stage design engine")
    p_design.add_argument("--config", required=True, help="path to a JSON run config")
    p_design.add_argument("--seed", type=int, default=None, help="override config seed")
    p_design.add_argument("--out", default=None, help="write the report to this path")
    p_design.add_argument("--cache-dir", default=default_cache_dir())
    p_design.add_argument("--no-cache", action="store_true")
    p_design.set_defaults(func=_cmd_design)

    p_val = sub.add_parser("validate", help="brute-force check a design report")
    p_val.add_argument("report", help="path to a design report JSON")
    p_val.add_argument("--reps", type=int, default=500)
    p_val.add_argument("--percentiles", default="0.25,0.5,0.9")
    p_val.add_argument("--m", type=int, default=10_000, help="posterior draws per rep")
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--workers", type=int, default=1)
    p_val.add_argument("--out", default=None, help="write the table as JSON")
    p_val.set_defaults(func=_cmd_validate)

    p_serve = sub.add_parser("serve", help="run the HTTP design service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--cache-dir", default=default_cache_dir())
    p_serve.add_argument(
        "--ui-dir", default=None, help="directory with a built browser UI to serve"
    )
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        if getattr(exc, "classification", None):
            print(f"classification: {exc.classification}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
