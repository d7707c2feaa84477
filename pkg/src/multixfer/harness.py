"""Experiment configuration, dispatch and report emission.

A configuration is one JSON document; :data:`CONFIG_SCHEMA` is its JSON
Schema. :func:`run_experiment` returns a list of result records and
:func:`emit_report` writes ``report.json`` and ``report.csv``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from typing import Any

import jsonschema
import numpy as np

from .errors import DomainError, InvariantViolation
from .estimation import (SearchConfig, deperiodization_check, estimate_norm, mz_test, ratio,
                         transference_report, _lattice_members)
from .functions import GridFunction, TrigPolynomial, random_trig_polynomial
from .spaces import FrequencyBox, LineGrid, TorusGrid, make_exponents
from .symbols import (LatticeSymbol, SymbolFamily, bump_symbol, classify, dilate_family,
                      symbol_from_description)
from .weights import (Mollifier, WeightSpec, constant_weight, power_weight, smooth_weight,
                      step_weight, unit_weight)

__all__ = ["CONFIG_SCHEMA", "CSV_COLUMNS", "ConfigError", "load_config", "validate_config",
           "build_weight", "run_experiment", "emit_report", "render_csv", "render_json"]

CSV_COLUMNS = ["task", "symbol_id", "N", "d", "p", "p1", "p2", "p3", "weight_id", "target",
               "value", "constant_c", "rho", "pass", "seed", "resolution", "runtime_ms"]

_WEIGHT = {
    "oneOf": [
        {"type": "string", "enum": ["unit"]},
        {"type": "object", "required": ["form"],
         "properties": {
             "form": {"enum": ["unit", "constant", "power", "step", "smoothed"]},
             "value": {"type": "number", "exclusiveMinimum": 0},
             "alphas": {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": 2},
             "levels": {"type": "array"},
             "base": {"$ref": "#/$defs/weight"},
             "radius": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5}}},
    ]
}

_SYMBOL = {"type": "object", "required": ["form"],
           "properties": {"form": {"enum": ["constant", "modulation", "separable", "bump", "bessel",
                                            "half_space", "homogeneous_ratio", "dilation"]}}}

CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["task", "exponents"],
    "$defs": {"weight": _WEIGHT, "symbol": _SYMBOL},
    "properties": {
        "task": {"enum": ["classify", "estimate", "transfer", "mz", "deperiodize"]},
        "symbol": {"$ref": "#/$defs/symbol"},
        "family": {"oneOf": [
            {"type": "string", "enum": ["dilation"]},
            {"type": "object", "required": ["kind"],
             "properties": {"kind": {"enum": ["dilation", "members"]},
                            "base": {"$ref": "#/$defs/symbol"},
                            "r": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                                  "minItems": 1},
                            "members": {"type": "array", "items": {"$ref": "#/$defs/symbol"},
                                        "minItems": 1}}}]},
        "exponents": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 3},
        "d": {"enum": [1, 2]},
        "weights": {"oneOf": [
            {"$ref": "#/$defs/weight"},
            {"type": "object", "required": ["output", "inputs"],
             "properties": {"output": {"$ref": "#/$defs/weight"},
                            "inputs": {"type": "array", "items": {"$ref": "#/$defs/weight"}}}}]},
        "target": {"enum": ["strong", "weak"]},
        "seed": {"type": "integer", "minimum": 0},
        "search": {"type": "object", "properties": {
            "restarts": {"type": "integer", "minimum": 1},
            "steps": {"type": "integer", "minimum": 1},
            "freq_box": {"type": "integer", "minimum": 1},
            "scale": {"type": "number", "exclusiveMinimum": 0},
            "seed": {"type": "integer", "minimum": 0}}},
        "grids": {"type": "object", "properties": {
            "n": {"type": "integer", "minimum": 4},
            "L": {"type": "number", "exclusiveMinimum": 0},
            "points_per_unit": {"type": "integer", "minimum": 4},
            "s_schedule": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                           "minItems": 1}}},
        "tolerances": {"type": "object", "properties": {
            "rho": {"type": "number", "minimum": 0},
            "identity": {"type": "number", "minimum": 0},
            "recompute": {"type": "number", "minimum": 0}}},
        "instances": {"type": "integer", "minimum": 1},
        "classify": {"type": "object"},
    },
}


class ConfigError(DomainError):
    """Configuration failed schema or domain validation."""


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def validate_config(cfg: dict) -> None:
    """Schema validation plus exponent domain checks; raises :class:`ConfigError`."""
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config field {_pointer(exc.absolute_path)}: {exc.message}") from None
    try:
        make_exponents(cfg["exponents"])
    except DomainError as exc:
        raise ConfigError(f"config field /exponents: {exc}") from None
    task = cfg["task"]
    if task in ("classify", "estimate") and "symbol" not in cfg:
        raise ConfigError(f"config field /symbol: required for task {task!r}")


def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    validate_config(cfg)
    return cfg


def build_weight(desc, dim: int = 1) -> WeightSpec | None:
    """WeightSpec from its declarative description (``None`` for the unit weight)."""
    if desc is None or desc == "unit":
        return None
    form = desc["form"]
    if form == "unit":
        return None
    if form == "constant":
        return constant_weight(desc["value"], dim)
    if form == "power":
        return power_weight(desc.get("alphas", [0.5] * dim))
    if form == "step":
        return step_weight(desc["levels"])
    if form == "smoothed":
        base = build_weight(desc["base"], dim) or unit_weight(dim)
        return smooth_weight(base, Mollifier(base.dim, float(desc.get("radius", 0.5))))
    raise ConfigError(f"unknown weight form {form!r}")


def _weights(cfg: dict, N: int, d: int):
    desc = cfg.get("weights", "unit")
    if isinstance(desc, dict) and "output" in desc:
        ins = desc["inputs"]
        if len(ins) != N:
            raise ConfigError(f"config field /weights/inputs: expected {N} entries, got {len(ins)}")
        return build_weight(desc["output"], d), [build_weight(x, d) for x in ins]
    w = build_weight(desc, d)
    return w, [w] * N


def _weight_id(w_out, w_in) -> str:
    names = [(w.name if w is not None else "unit") for w in [w_out, *w_in]]
    return names[0] if len(set(names)) == 1 else ";".join(names)


def _family(cfg: dict, d: int, N: int):
    desc = cfg.get("family", "dilation")
    if desc == "dilation":
        desc = {"kind": "dilation"}
    if desc["kind"] == "dilation":
        base = (symbol_from_description(desc["base"], d, N) if "base" in desc
                else bump_symbol(3.0, d, N))
        return dilate_family(base, desc.get("r", [0.5, 1.0, 2.0])), f"dilation({base.label})"
    members = tuple(symbol_from_description(s, d, N) for s in desc["members"])
    return SymbolFamily(members, tuple(range(len(members))), "member"), "family(" + ",".join(
        m.label for m in members) + ")"


def _search_cfg(cfg: dict, seed: int, jobs: int, d: int) -> SearchConfig:
    s = cfg.get("search", {})
    g = cfg.get("grids", {})
    return SearchConfig(restarts=s.get("restarts", 8), steps=s.get("steps", 200),
                        freq_box=FrequencyBox(d, s.get("freq_box", 8 if d == 1 else 3)),
                        scale=s.get("scale", 0.5), seed=s.get("seed", seed),
                        grid_n=g.get("n"), jobs=jobs)


def _coeff_lists(polys):
    return [[[float(z.real), float(z.imag)] for z in np.asarray(g.coeffs).ravel()] for g in polys]


def _record(task, cfg, exps, d, symbol_id, weight_id, target, value, c, rho, passed, seed,
            resolution, runtime_ms, details):
    pl = list(exps.p_list) + [None] * (3 - exps.n_linear)
    return {"task": task, "symbol_id": symbol_id, "N": exps.n_linear, "d": d, "p": exps.p,
            "p1": pl[0], "p2": pl[1], "p3": pl[2], "weight_id": weight_id, "target": target,
            "value": value, "constant_c": c, "rho": rho, "pass": bool(passed), "seed": seed,
            "resolution": resolution, "runtime_ms": runtime_ms, "details": details}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, TrigPolynomial):
        return _coeff_lists([obj])[0]
    if obj is None or isinstance(obj, (str, int, bool)):
        return obj
    return str(obj)


def _check_estimate(est, lattice, exps, w_out, w_in, grid, tol):
    again = ratio(lattice, est.witnesses, exps, w_out, w_in, est.target, grid)
    if abs(again - est.value) > tol * max(1.0, abs(est.value)):
        raise InvariantViolation(f"witness-ratio-recompute: {again} != {est.value}")
    vals = [v for _, v in est.trace]
    if any(b < a for a, b in zip(vals, vals[1:])):
        raise InvariantViolation("trace-nondecreasing")


def run_experiment(cfg: dict, seed: int | None = None, jobs: int = 1, timing: bool = False) -> list[dict]:
    """Validate ``cfg`` and run it; returns result records (one per CSV row)."""
    validate_config(cfg)
    seed = int(cfg.get("seed", 0) if seed is None else seed)
    exps = make_exponents(cfg["exponents"])
    N, d = exps.n_linear, int(cfg.get("d", 1))
    w_out, w_in = _weights(cfg, N, d)
    wid = _weight_id(w_out, w_in)
    target = cfg.get("target", "strong")
    tols = cfg.get("tolerances", {})
    task = cfg["task"]
    t0 = time.perf_counter()
    out = []

    if task == "estimate":
        m = symbol_from_description(cfg["symbol"], d, N)
        scfg = _search_cfg(cfg, seed, jobs, d)
        est = estimate_norm(m, exps, w_out, w_in, target, scfg)
        grid = scfg.grid(N)
        _check_estimate(est, _lattice_members([m], scfg.freq_box), exps, w_out, w_in, grid,
                        tols.get("recompute", 1e-10))
        details = {"witnesses": _coeff_lists(est.witnesses), "restart_values": est.restart_values,
                   "trace_final": est.trace[-1][1], "freq_box": scfg.freq_box.max_freq,
                   "analytic_upper_bound": m.bound}
        out.append(_record(task, cfg, exps, d, m.label, wid, target, est.value, None, None,
                           est.value <= m.bound * (1 + 1e-9), seed, grid.n_per_axis, None, details))

    elif task == "transfer":
        fam, sid = _family(cfg, d, N)
        scfg = _search_cfg(cfg, seed, jobs, d)
        g = cfg.get("grids", {})
        rep = transference_report(fam, exps, w_out, w_in, target, scfg,
                                  s_schedule=tuple(g.get("s_schedule", (4, 8, 16))),
                                  tol=tols.get("rho", 0.05),
                                  points_per_unit=g.get("points_per_unit", 32))
        est = rep.pop("estimate")
        rep["witness_coefficients"] = _coeff_lists(est.witnesses)
        out.append(_record(task, cfg, exps, d, sid, wid, target, rep["N_T"], rep["constant_c"],
                           rep["rho"], rep["pass"], seed, scfg.grid(N).n_per_axis, None, rep))

    elif task == "classify":
        m = symbol_from_description(cfg["symbol"], d, N)
        opts = dict(cfg.get("classify", {}))
        ws = [w if w is not None else unit_weight(d) for w in w_in]
        rep = classify(m, exps, ws, seed=seed, **opts)
        out.append(_record(task, cfg, exps, d, m.label, wid, None, len(rep["applicable"]), None,
                           None, True, seed, None, None, rep))

    elif task == "mz":
        if N != 2:
            raise ConfigError("config field /exponents: mz needs two exponents")
        rng = np.random.default_rng(seed)
        grid = TorusGrid(d, cfg.get("grids", {}).get("n", 64 if d == 1 else 32))
        K = cfg.get("search", {}).get("freq_box", 3)
        side = 2 * K + 1
        reps, worst, ok = [], 0.0, True
        for _ in range(cfg.get("instances", 200)):
            A = rng.standard_normal((3, side)) + 1j * rng.standard_normal((3, side))
            B = rng.standard_normal((3, side)) + 1j * rng.standard_normal((3, side))
            if d != 1:
                raise ConfigError("config field /d: mz instances are one-dimensional")
            ops = [LatticeSymbol(np.outer(A[j], B[j]), 1, 2) for j in range(3)]
            bound = (np.sqrt((np.abs(A) ** 2).sum(axis=0).max())
                     * np.sqrt((np.abs(B) ** 2).sum(axis=0).max()))
            fs = [random_trig_polynomial(rng, 1, K) for _ in range(3)]
            gs = [random_trig_polynomial(rng, 1, K) for _ in range(3)]
            r = mz_test(ops, fs, gs, exps, bound, grid)
            ok &= r["pass"]
            worst = max(worst, r["ratio"])
            reps.append({k: r[k] for k in ("ratio", "constant_c", "pass")})
        out.append(_record(task, cfg, exps, d, "separable-random", wid, "strong", worst, None, None,
                           ok, seed, grid.n_per_axis, None, {"instances": reps}))

    elif task == "deperiodize":
        rng = np.random.default_rng(seed)
        kgrid = LineGrid(2, 0.5, 64)
        g = cfg.get("grids", {})
        s_sched = tuple(g.get("s_schedule", (4, 8, 16)))
        y1, y2 = kgrid.coords()
        worst, mono, reps = 0.0, True, []
        for i in range(cfg.get("instances", 20)):
            c = rng.uniform(-0.08, 0.08, 2)
            a = rng.uniform(0.08, 0.15)
            r2 = ((y1 - c[0]) ** 2 + (y2 - c[1]) ** 2) / a**2
            inside = r2 < 1
            K = GridFunction(kgrid, np.where(inside, np.exp(-1 / (1 - np.where(inside, r2, 0))), 0))
            g1 = random_trig_polynomial(rng, 1, 8, modes=8)
            g2 = random_trig_polynomial(rng, 1, 8, modes=8)
            r = deperiodization_check(K, g1, g2, 0.25, s_sched, exps.p, seed=seed + i)
            worst = max(worst, r["max_identity_error"])
            mono &= r["factors_nonincreasing"]
            reps.append(r)
        ok = worst <= tols.get("identity", 1e-6) and mono
        out.append(_record(task, cfg, exps, d, "random-bump-kernels", wid, None, worst, None, None,
                           ok, seed, kgrid.n_per_axis, None, {"instances": reps}))

    runtime = int(round((time.perf_counter() - t0) * 1000)) if timing else None
    for rec in out:
        rec["runtime_ms"] = runtime
    return out


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(results: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow([_csv_value(r.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def render_json(results: list[dict]) -> str:
    return json.dumps({"results": _jsonable(results)}, indent=2, sort_keys=True) + "\n"


def emit_report(results: list[dict], out_dir: str, stem: str = "report") -> tuple[str, str]:
    """Write ``<stem>.json`` and ``<stem>.csv`` into ``out_dir``; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    jpath = os.path.join(out_dir, f"{stem}.json")
    cpath = os.path.join(out_dir, f"{stem}.csv")
    with open(jpath, "w", encoding="utf-8") as fh:
        fh.write(render_json(results))
    with open(cpath, "w", encoding="utf-8") as fh:
        fh.write(render_csv(results))
    return jpath, cpath
