"""Command-line interface.

Subcommands:

    run <config>... [--jobs N] [--out DIR]   run experiments end to end
    verify-class <config>                    class-membership checks only
    check-invariants [--suite NAME] [--seed S]
                                             randomized invariant suites
    project <config>                         project listed points onto
                                             the configured domain

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration or
usage error.  The output directory resolves as --out, then the
CATKAPPA_OUT environment variable, then the config's output.dir, then
./out/<config stem>.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys

from . import config, experiment, invariants
from .convex import contains, project
from .errors import CatKappaError, ConfigError


def _out_dir(cfg: dict, path: str, cli_out: str | None) -> str:
    stem = os.path.splitext(os.path.basename(path))[0]
    base = cli_out or os.environ.get("CATKAPPA_OUT")
    if base is not None:
        return os.path.join(base, stem)
    cfg_dir = (cfg.get("output") or {}).get("dir")
    if cfg_dir is not None:
        return cfg_dir
    return os.path.join("out", stem)


def _run_one(path: str, cli_out: str | None) -> int:
    cfg = config.load_config(path)
    out_dir = _out_dir(cfg, path, cli_out)
    result = experiment.run_experiment(cfg, out_dir)
    tag = "ok" if result.status == 0 else "FAILED"
    print(f"{path}: {tag} (checks_failed={result.summary['checks_failed']}) -> {out_dir}")
    return result.status


def cmd_run(args) -> int:
    status = 0
    if args.jobs > 1 and len(args.config) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_run_one, p, args.out) for p in args.config]
            for fut in futures:
                status = max(status, fut.result())
    else:
        for path in args.config:
            status = max(status, _run_one(path, args.out))
    return status


def cmd_verify_class(args) -> int:
    cfg = config.load_config(args.config)
    space = config.build_space(cfg)
    domain = config.build_domain(cfg, space)
    T, _ = config.build_map(cfg, domain)
    if not cfg.get("class_checks"):
        raise ConfigError("class_checks", "no class checks configured")
    reports, failed = experiment._run_class_checks(
        cfg, space, domain, T, int(cfg.get("seed", 0))
    )
    for class_id, rep in reports.items():
        print(
            f"{class_id}: {rep.verdict} "
            f"(pairs={rep.sampled_pairs}, worst_slack={rep.worst_slack:.6e})"
        )
        if rep.witness is not None:
            print(f"  witness: {rep.witness}")
    return 1 if failed else 0


def cmd_check_invariants(args) -> int:
    names = list(invariants.SUITES) if args.suite == "all" else [args.suite]
    try:
        passed, records = invariants.run_suites(names, seed=args.seed)
    except KeyError as exc:
        raise ConfigError("suite", str(exc))
    for r in records:
        tag = "PASS" if r["passed"] else "FAIL"
        print(f"[{tag}] {r['name']} (worst margin {r['worst']:.3e})")
    return 0 if passed else 1


def cmd_project(args) -> int:
    cfg = config.load_config(args.config)
    space = config.build_space(cfg)
    domain = config.build_domain(cfg, space)
    pts = cfg.get("points")
    if not pts:
        raise ConfigError("points", "project needs a nonempty 'points' list")
    for lit in pts:
        x = config.resolve_point(space, lit, "points")
        px = project(domain, x)
        inside = contains(domain, x)
        coords = ",".join(repr(float(c)) for c in px.coords)
        print(f"{list(map(float, x.coords))} -> [{coords}] (member={inside})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catkappa",
        description="Hybrid-mapping experiments on constant-curvature spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one or more experiment configs")
    p_run.add_argument("config", nargs="+", help="YAML config path(s)")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_run.add_argument("--out", default=None, help="output directory root")
    p_run.set_defaults(func=cmd_run)

    p_vc = sub.add_parser("verify-class", help="run only the class checks")
    p_vc.add_argument("config")
    p_vc.set_defaults(func=cmd_verify_class)

    p_ci = sub.add_parser("check-invariants", help="randomized invariant suites")
    p_ci.add_argument(
        "--suite",
        default="all",
        choices=["all", *sorted(invariants.SUITES)],
    )
    p_ci.add_argument("--seed", type=int, default=0)
    p_ci.set_defaults(func=cmd_check_invariants)

    p_pr = sub.add_parser("project", help="project configured points onto the domain")
    p_pr.add_argument("config")
    p_pr.set_defaults(func=cmd_project)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CatKappaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
