"""Experiment configuration: YAML schema, validation, object construction.

A config file is a nested key/value document.  Top-level keys:

    seed          int, master RNG seed (default 0)
    space         {kappa, dim}
    domain        {shape: ball|intersection|whole_space, center, radius,
                   balls, witness}
    map           {id, ...builder parameters...}
    class_checks  list of {class_id, params, quantifier?, pairs?, radius?, seed?}
    scheme        {id, x0, alpha, beta?, gamma?, selection?, stop?}
    theorem       {id, ...hypothesis data...}; validated before any run
    diagnostics   {fejer?, delta_limit?, step_condition?}
    output        {dir?, plots?, figures?}

Point literals are either a coordinate list or the string "pole"
(the canonical base point); "target" resolves to the map target where
one exists.
"""

from __future__ import annotations

import math

import yaml

from . import convex, iterate, maps
from .classes import HybridParams, validate_params
from .errors import ConfigError
from .model_space import ModelSpace, Point


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}")
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"invalid YAML: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config", "top level must be a mapping")
    return cfg


def _require(cfg: dict, key: str, context: str):
    if key not in cfg:
        raise ConfigError(f"{context}.{key}" if context else key, "missing required key")
    return cfg[key]


def build_space(cfg: dict) -> ModelSpace:
    sp = _require(cfg, "space", "")
    try:
        return ModelSpace(float(_require(sp, "kappa", "space")),
                          int(_require(sp, "dim", "space")))
    except (TypeError, ValueError) as exc:
        raise ConfigError("space", str(exc))


def resolve_point(space: ModelSpace, literal, key: str, target: Point | None = None) -> Point:
    if literal == "pole":
        return space.base_point()
    if literal == "target":
        if target is None:
            raise ConfigError(key, '"target" used but the map has no target point')
        return target
    try:
        return space.point(literal)
    except Exception as exc:
        raise ConfigError(key, f"bad point literal: {exc}")


def build_domain(cfg: dict, space: ModelSpace) -> convex.ConvexSet:
    dom = _require(cfg, "domain", "")
    shape = _require(dom, "shape", "domain")
    try:
        if shape == "whole_space":
            return convex.whole_space(space)
        if shape == "ball":
            center = resolve_point(space, _require(dom, "center", "domain"), "domain.center")
            return convex.ball(space, center, float(_require(dom, "radius", "domain")))
        if shape == "intersection":
            balls = [
                (
                    resolve_point(space, _require(b, "center", "domain.balls"),
                                  "domain.balls.center"),
                    float(_require(b, "radius", "domain.balls")),
                )
                for b in _require(dom, "balls", "domain")
            ]
            witness = resolve_point(
                space, _require(dom, "witness", "domain"), "domain.witness"
            )
            return convex.intersection(space, balls, witness)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError("domain", str(exc))
    raise ConfigError("domain.shape", f"unknown shape {shape!r}")


def build_map(cfg: dict, domain: convex.ConvexSet):
    """Build the multivalued map; returns (map, target_point_or_None)."""
    mp = _require(cfg, "map", "")
    map_id = _require(mp, "id", "map")
    space = domain.space
    target = None
    try:
        if map_id == "contraction_to_point":
            target = resolve_point(space, _require(mp, "target", "map"), "map.target")
            return maps.contraction_to_point(
                domain, target, float(_require(mp, "rate", "map"))
            ), target
        if map_id == "constant":
            target = resolve_point(space, _require(mp, "c", "map"), "map.c")
            return maps.constant_map(domain, target), target
        if map_id == "identity":
            return maps.identity_map(domain), None
        if map_id == "expansion_from_point":
            target = resolve_point(space, _require(mp, "center", "map"), "map.center")
            return maps.expansion_from_point(
                domain, target, float(_require(mp, "factor", "map"))
            ), target
        if map_id == "pair_with_midpoint":
            target = resolve_point(space, _require(mp, "c", "map"), "map.c")
            return maps.pair_with_midpoint(domain, target), target
        if map_id == "table":
            entries = [
                (
                    resolve_point(space, _require(e, "key", "map.entries"),
                                  "map.entries.key"),
                    [
                        resolve_point(space, lit, "map.entries.image")
                        for lit in _require(e, "image", "map.entries")
                    ],
                )
                for e in _require(mp, "entries", "map")
            ]
            return maps.table_map(domain, entries), None
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError("map", str(exc))
    raise ConfigError("map.id", f"unknown builtin map {map_id!r}")


def build_params(raw: dict, key: str) -> HybridParams:
    if not isinstance(raw, dict):
        raise ConfigError(key, "params must be a mapping of coefficient names")
    allowed = {"a1", "a2", "a3", "b1", "b2", "k1", "k2", "lam", "alpha", "beta"}
    bad = set(raw) - allowed
    if bad:
        raise ConfigError(key, f"unknown coefficient names {sorted(bad)}")
    return HybridParams(**{k: float(v) for k, v in raw.items()})


def check_class_params(class_id: str, params: HybridParams, sample_points, key: str):
    ok, msg = validate_params(class_id, params, sample_points)
    if not ok:
        raise ConfigError(key, f"coefficient constraint violated: {msg}")


def build_step(spec, key: str):
    if spec is None:
        return None
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError(key, "step spec needs a 'family' key")
    family = spec["family"]
    try:
        if family == "constant":
            return iterate.constant(float(_require(spec, "value", key)))
        if family == "harmonic":
            return iterate.harmonic()
        if family == "affine_clamped":
            return iterate.affine_clamped(
                float(_require(spec, "a", key)), float(_require(spec, "b", key))
            )
        if family == "table":
            return iterate.from_table(_require(spec, "values", key))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(key, str(exc))
    raise ConfigError(key, f"unknown step family {family!r}")


def build_seqs(sch: dict) -> iterate.StepSequences:
    alpha = build_step(sch.get("alpha"), "scheme.alpha")
    if alpha is None:
        raise ConfigError("scheme.alpha", "missing required key")
    return iterate.StepSequences(
        alpha,
        build_step(sch.get("beta"), "scheme.beta"),
        build_step(sch.get("gamma"), "scheme.gamma"),
    )


def build_stop(sch: dict) -> iterate.StopRule:
    raw = sch.get("stop", {})
    try:
        return iterate.StopRule(
            int(raw.get("max_iters", 100_000)),
            float(raw.get("residual_tol", 1e-8)),
            float(raw.get("stall_tol", 1e-12)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError("scheme.stop", str(exc))
