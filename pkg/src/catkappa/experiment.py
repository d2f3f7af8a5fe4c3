"""End-to-end experiment runs driven by a config document.

``run_experiment`` builds the space, domain and map, verifies any
requested class memberships, gates theorem-tagged runs on their
hypotheses, runs the iteration scheme, computes diagnostics, and writes
the trace CSV, a key/value summary, per-series plot CSVs and figures
into the output directory.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from . import classes, config, diagnostics, iterate, report
from .classes import HybridParams
from .convex import ConvexSet, contains, project
from .errors import ConfigError, NotConverged
from .model_space import Point, distance, r_constant
from .setmap import dist_point_set

CLASS_CHECKERS = {
    "type1": classes.check_type1,
    "generalized_type1": classes.check_generalized_type1,
    "type2": classes.check_type2,
    "generalized_type2": classes.check_generalized_type2,
}

THEOREM_IDS = (
    "delta_convergence_two_step",
    "strong_convergence_three_step",
    "endpoint_existence",
)


@dataclass
class ExperimentResult:
    status: int
    summary: dict
    trace: object = None
    paths: list = field(default_factory=list)


def _sampling_center(domain: ConvexSet) -> tuple[Point, float]:
    if domain.kind == "whole_space":
        return domain.space.base_point(), 1.0
    center, radius = domain.balls[0]
    return center, radius


def _run_class_checks(cfg, space, domain, T, seed):
    reports = {}
    failed = []
    for i, spec in enumerate(cfg.get("class_checks", [])):
        key = f"class_checks[{i}]"
        class_id = config._require(spec, "class_id", key)
        params = config.build_params(spec.get("params", {}), f"{key}.params")
        center, default_radius = _sampling_center(domain)
        radius = float(spec.get("radius", default_radius))
        n_pairs = int(spec.get("pairs", 200))
        pairs = classes.pair_sampler(
            space, center, radius, n=n_pairs, seed=int(spec.get("seed", seed))
        )
        sample_xs = [x for x, _ in pairs[: min(50, len(pairs))]]
        config.check_class_params(class_id, params, sample_xs, f"{key}.params")
        if class_id in classes.CLASSICAL_IDS:
            single = lambda x: iterate.nearest_rule(x, T(x))
            rep = classes.check_classical(single, class_id, params, pairs, space)
        elif class_id in ("type1", "generalized_type1"):
            checker = CLASS_CHECKERS[class_id]
            if "quantifier" in spec:
                rep = checker(T, params, pairs, quantifier_mode=spec["quantifier"])
            else:
                rep = checker(T, params, pairs)
        elif class_id in CLASS_CHECKERS:
            rep = CLASS_CHECKERS[class_id](T, params, pairs)
        else:
            raise ConfigError(f"{key}.class_id", f"unknown class {class_id!r}")
        reports[class_id] = rep
        if not rep.satisfied:
            failed.append(class_id)
    return reports, failed


def _theorem_gate(cfg, space, domain, reports, seqs, T, target):
    """Refuse to run a theorem-tagged experiment with failed hypotheses."""
    thm = cfg.get("theorem")
    if thm is None:
        return None
    thm_id = config._require(thm, "id", "theorem")
    if thm_id not in THEOREM_IDS:
        raise ConfigError("theorem.id", f"unknown theorem tag {thm_id!r}")
    info = {"id": thm_id}

    if thm_id == "delta_convergence_two_step":
        eps = float(config._require(thm, "epsilon", "theorem"))
        cc = r_constant(eps)
        if space.kappa <= 0:
            raise ConfigError("theorem", "two-step hypothesis needs kappa > 0")
        bound = cc.diam_bound(space.kappa)
        if domain.diameter_bound() > bound:
            raise ConfigError(
                "theorem.epsilon",
                f"domain diameter bound {domain.diameter_bound():.6g} exceeds "
                f"(pi - eps)/(2 sqrt(kappa)) = {bound:.6g}",
            )
        rep = reports.get("generalized_type1")
        if rep is None or not rep.satisfied:
            raise ConfigError(
                "theorem",
                "hypothesis needs a satisfied generalized_type1 class check",
            )
        ratio = float(thm.get("ratio", 0.0))
        if seqs is None:
            raise ConfigError("theorem", "hypothesis needs a scheme with step sequences")
        for name in ("alpha", "beta"):
            ok, m = iterate.check_step_condition(seqs, cc.R, ratio, sequence=name)
            info[f"step_condition_{name}"] = m
            if not ok:
                raise ConfigError(
                    "theorem.ratio",
                    f"step condition fails for {name}: tail minimum {m:.3e}",
                )
        info.update(R=cc.R, epsilon=eps, diameter_cap=bound)
        return info

    if thm_id == "strong_convergence_three_step":
        rep = reports.get("type2")
        if rep is None or not rep.satisfied:
            raise ConfigError(
                "theorem", "hypothesis needs a satisfied type2 class check"
            )
        a1 = float(config._require(thm, "a1", "theorem"))
        if a1 < 1.0:
            raise ConfigError("theorem.a1", f"needs a1 >= 1, got {a1}")
        info["a1"] = a1
        return info

    # endpoint_existence
    a1 = float(config._require(thm, "a1", "theorem"))
    k1 = float(thm.get("k1", 0.0))
    k2 = float(thm.get("k2", 0.0))
    k = (a1 + k1) / (1.0 - k2)
    if not k < 1.0:
        raise ConfigError(
            "theorem", f"contraction constant (a1+k1)/(1-k2) = {k:.6g} not below 1"
        )
    info.update(a1=a1, k1=k1, k2=k2, k=k)
    return info


def _run_scheme(cfg, space, domain, T, seed):
    sch = cfg.get("scheme")
    if sch is None:
        return None, None, None
    scheme_id = config._require(sch, "id", "scheme")
    x0 = config.resolve_point(space, config._require(sch, "x0", "scheme"), "scheme.x0")
    if not contains(domain, x0):
        raise ConfigError("scheme.x0", "initial point lies outside the domain")
    stop = config.build_stop(sch)
    selection = sch.get("selection", "nearest")
    if selection == "nearest":
        rule = iterate.nearest_rule
    elif selection == "random":
        rule = iterate.random_rule(int(sch.get("selection_seed", seed)))
    else:
        raise ConfigError("scheme.selection", f"unknown rule {selection!r}")

    if scheme_id == "picard_nearest":
        try:
            point, trace, k_hat = iterate.picard_nearest_search(T, x0, stop)
        except NotConverged as exc:
            return exc.trace, None, stop
        return trace, None, stop

    seqs = config.build_seqs(sch)
    if scheme_id in iterate.SINGLE_VALUED_SCHEMES:
        single = lambda x: iterate.nearest_rule(x, T(x))
        trace = iterate.run_single_valued(
            scheme_id, single, x0, seqs, stop, space, project_into=domain
        )
    elif scheme_id == "mv_thianwan":
        trace = iterate.run_multivalued_thianwan(T, domain, x0, seqs, stop, rule)
    elif scheme_id == "mv_picard_s":
        trace = iterate.run_multivalued_picard_s(T, domain, x0, seqs, stop, rule)
    else:
        raise ConfigError("scheme.id", f"unknown scheme {scheme_id!r}")
    return trace, seqs, stop


def run_experiment(cfg: dict, out_dir: str) -> ExperimentResult:
    seed = int(cfg.get("seed", 0))
    space = config.build_space(cfg)
    domain = config.build_domain(cfg, space)
    T, target = config.build_map(cfg, domain)

    summary = {
        "space": {"kappa": space.kappa, "dim": space.dim, "model": space.model},
        "domain": {"kind": domain.kind},
        "map": {"id": T.tags.get("id", "custom")},
        "seed": seed,
    }
    checks_failed = []

    reports, failed = _run_class_checks(cfg, space, domain, T, seed)
    checks_failed.extend(f"class:{c}" for c in failed)
    for class_id, rep in reports.items():
        summary[f"class.{class_id}"] = {
            "verdict": rep.verdict,
            "worst_slack": rep.worst_slack,
            "pairs": rep.sampled_pairs,
        }

    # Gate before running anything when a theorem tag is present.  The
    # scheme's step sequences are needed for the step-condition check,
    # so they are built (but not run) first.
    sch = cfg.get("scheme")
    seqs_preview = None
    if sch is not None and sch.get("id") not in ("picard_nearest",) and "alpha" in sch:
        seqs_preview = config.build_seqs(sch)
    thm_info = _theorem_gate(cfg, space, domain, reports, seqs_preview, T, target)
    if thm_info is not None:
        summary["theorem"] = thm_info

    trace, seqs, stop = _run_scheme(cfg, space, domain, T, seed)

    diag = cfg.get("diagnostics", {}) or {}
    p = None
    if trace is not None:
        summary["scheme"] = {
            "id": trace.scheme_id,
            "iterations": len(trace) - 1,
            "stop_reason": trace.stop_reason,
            "final_residual": trace.residuals[-1],
        }
        if "fejer" in diag or "p" in diag:
            raw_p = (diag.get("fejer") or {}).get("p", diag.get("p"))
            if raw_p is None:
                if trace.scheme_id != "picard_nearest":
                    raise ConfigError(
                        "diagnostics.fejer",
                        "needs a reference point p unless the scheme is "
                        "picard_nearest (whose terminal point is used)",
                    )
                p = trace.terminal
            else:
                p = config.resolve_point(space, raw_p, "diagnostics.fejer.p", target)
        if p is not None:
            trace.extra_series["dist_to_p"] = [
                distance(space, x, p) for x in trace.iterates
            ]
            if "fejer" in diag:
                ok, viol = diagnostics.fejer_check(trace, p, float(
                    (diag.get("fejer") or {}).get("tol", 1e-9)))
                summary["fejer"] = {"passed": ok, "max_violation": viol}
                if not ok:
                    checks_failed.append("fejer")
            summary["final"] = {
                "dist_to_p": distance(space, trace.terminal, p),
                "endpoint_check": diagnostics.endpoint_check(T, p, 1e-6),
            }
        if "delta_limit" in diag and len(trace) >= 12:
            dl = diag.get("delta_limit") or {}
            est, score, ests = diagnostics.delta_limit_estimate(
                trace, domain,
                budget=int(dl.get("budget", 2000)), seed=seed,
            )
            summary["delta_limit"] = {
                "center_radius": est.radius,
                "agreement_score": score,
                "center_is_fixed": diagnostics.fixed_point_check(
                    T, est.point, float(dl.get("fixed_tol", 1e-6))
                ),
            }
            trace.extra_series["center_agreement"] = [
                distance(space, x, est.point) for x in trace.iterates
            ]
        if "step_condition" in diag and seqs is not None:
            sc = diag["step_condition"]
            cc = r_constant(float(config._require(sc, "epsilon", "diagnostics.step_condition")))
            ok, m = iterate.check_step_condition(
                seqs, cc.R, float(sc.get("ratio", 0.0))
            )
            summary["step_condition"] = {"passed": ok, "tail_min": m}
            if not ok:
                checks_failed.append("step_condition")
        summary["final_residual_check"] = {
            "terminal_in_image": dist_point_set(trace.terminal, T(trace.terminal)),
        }

    paths = []
    out = cfg.get("output", {}) or {}
    os.makedirs(out_dir, exist_ok=True)
    if trace is not None:
        trace_path = os.path.join(out_dir, "trace.csv")
        report.write_trace_csv(trace, trace_path)
        paths.append(trace_path)
        kinds = out.get("plots", ["residual"])
        for kind in kinds:
            if kind not in report.PLOT_KINDS:
                raise ConfigError("output.plots", f"unknown plot kind {kind!r}")
            try:
                report.trace_series(trace, kind)
            except Exception:
                continue
            csv_path = os.path.join(out_dir, f"{kind}.csv")
            report.emit_plot_data(trace, kind, csv_path)
            paths.append(csv_path)
        if out.get("figures", True):
            paths.extend(report.render_figures(trace, out_dir, kinds))

    summary["checks_failed"] = ",".join(checks_failed) if checks_failed else "none"
    status = 1 if checks_failed else 0
    summary["status"] = status
    summary_path = os.path.join(out_dir, "summary.txt")
    report.write_summary(summary_path, summary)
    paths.append(summary_path)
    return ExperimentResult(status, summary, trace, paths)
