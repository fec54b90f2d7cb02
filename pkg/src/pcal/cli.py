"""Command line entry point: ``pcal <subcommand> [--config FILE] [flags]``.

Exit codes: 0 success, 2 validation error, 3 solver failure, 4 selftest failure.
"""
from __future__ import annotations

import argparse
import copy
import json
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .calculus import derivative, make_localizer, make_weight
from .composition import make_field
from .errors import PcalError, SolverError, ValidationError
from .grid import GridSignal, GridSpec, lp_norm
from .io import csv_text, decomposition_csv, decomposition_rows, read_signal_csv, report_json, write_text
from .littlewood_paley import (BesovIndex, besov_norm_lp, besov_norm_modulus, build_partition,
                               decompose, regularity_estimate)
from .paraproduct import bony_product
from .parallel import worker_count
from .selftest import closed_form_solution, run_selftest
from .signals import (RandomSeriesParams, gen_brownian, gen_fbm, gen_sine_bump, gen_wavelet_series,
                      gen_weierstrass, lift, meyer_max_level, mollify)
from .solvers import (GeometricRoughPath, SolverConfig, grid_exact_path, ito_lyons_probe,
                      paracontrolled_solve, young_lipschitz_probe, young_solve)

COMMANDS = ("analyze", "decompose", "product", "young", "rough", "lift", "probe", "selftest",
            "bench")
FIELDS = ("zero", "linear", "sin", "cos", "tanh", "rational")
SIGNALS = ("sin", "tone", "weierstrass", "fbm", "brownian", "wavelet", "csv")

_num_or_inf = {"anyOf": [{"type": "number"}, {"enum": ["inf"]}]}
_pos = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema"],
    "properties": {
        "schema": {"const": 1},
        "grid": {"type": "object", "additionalProperties": False, "properties": {
            "L": _pos, "N": {"type": "integer", "minimum": 16}}},
        "besov": {"type": "object", "additionalProperties": False, "properties": {
            "alpha": {"type": "number"}, "p": _num_or_inf, "q": _num_or_inf}},
        "field": {"type": "object", "additionalProperties": False, "properties": {
            "name": {"enum": list(FIELDS)}, "params": {"type": "object"}}},
        "signal": {"type": "object", "additionalProperties": False, "properties": {
            "kind": {"enum": list(SIGNALS)}, "params": {"type": "object"},
            "seed": {"type": "integer", "minimum": 0}}},
        "solver": {"type": "object", "additionalProperties": False, "properties": {
            "tol": _pos, "max_iters": {"type": "integer", "minimum": 1},
            "damping": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            "lambda_min": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            "u0": {"type": "number"}}},
        "weight": {"type": "object", "additionalProperties": False, "properties": {
            "kind": {"enum": ["exp_quadratic", "rational"]},
            "kappa": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            "T": _pos}},
    },
}

DEFAULTS = {
    "schema": 1,
    "grid": {"L": 8.0, "N": 4096},
    "besov": {},
    "field": {"name": "sin", "params": {}},
    "signal": {"kind": "sin", "params": {}, "seed": 0},
    "solver": {"tol": 1e-9, "max_iters": 200, "damping": 1.0, "lambda_min": 2.0**-6, "u0": 0.3},
    "weight": {"kind": "exp_quadratic", "kappa": 0.5, "T": 1.0},
}

# Besov index used when the config leaves it open
REGIME_INDEX = {"young": (0.75, "inf", "inf"), "rough": (0.4, 4, 2)}
DEFAULT_INDEX = (0.4, 4, 2)


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


# ---------------------------------------------------------------- config

def _parse_value(text: str):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return [int(lo), int(hi)]
    if text in ("inf", "true", "false"):
        return {"inf": "inf", "true": True, "false": False}[text]
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse_params(text: str) -> dict:
    """'s=0.8,r=0.4,J=3..8' -> {'s': 0.8, 'r': 0.4, 'J': [3, 8]}."""
    out = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in item:
            raise ValidationError(f"parameter {item!r} is not of the form key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = _parse_value(v.strip())
    return out


def parse_spec(text: str) -> tuple[str, dict]:
    """'linear:a=0.5' -> ('linear', {'a': 0.5})."""
    name, _, rest = text.partition(":")
    return name.strip(), parse_params(rest)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(2, f"cannot read config {path}: {e.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise CliError(2, f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    validate_config(raw, str(path))
    return raw


def validate_config(raw, where: str = "config"):
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as e:
        loc = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise CliError(2, f"{where}: field {loc}: {e.message}") from None


def resolve_config(args) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if args.config:
        cfg = _merge(cfg, load_config(args.config))
    over: dict = {}
    if args.L is not None or args.N is not None:
        over["grid"] = {k: v for k, v in (("L", args.L), ("N", args.N)) if v is not None}
    b = {k: v for k, v in (("alpha", args.alpha), ("p", args.p), ("q", args.q)) if v is not None}
    if b:
        over["besov"] = b
    if args.field:
        name, params = parse_spec(args.field)
        over["field"] = {"name": name, "params": params}
    sig: dict = {}
    if args.signal:
        kind, params = parse_spec(args.signal)
        sig = {"kind": kind, "params": params}
    if args.params:
        sig.setdefault("params", {}).update(parse_params(args.params))
        if "kind" not in sig and cfg["signal"]["kind"] == "sin" and args.command == "lift":
            sig["kind"] = "wavelet"
    if args.input:
        sig = {"kind": "csv", "params": {"path": str(args.input)}}
    if args.seed is not None:
        sig["seed"] = args.seed
    if sig:
        if "kind" in sig and sig["kind"] != cfg["signal"]["kind"]:
            cfg["signal"]["params"] = {}
        over["signal"] = sig
    sol = {k: v for k, v in (("tol", args.tol), ("max_iters", args.max_iters),
                             ("damping", args.damping), ("lambda_min", args.lambda_min),
                             ("u0", args.u0)) if v is not None}
    if sol:
        over["solver"] = sol
    w = {k: v for k, v in (("kind", args.weight), ("kappa", args.kappa), ("T", args.T))
         if v is not None}
    if w:
        over["weight"] = w
    if over.get("field") and over["field"]["name"] != cfg["field"]["name"]:
        cfg["field"]["params"] = {}
    cfg = _merge(cfg, over)
    # record the Besov index actually used, including regime defaults
    regime = {"young": "young", "rough": "rough"}.get(args.command)
    if args.command == "probe":
        regime = cfg["signal"]["params"].get("regime", "rough")
    a, p, q = REGIME_INDEX.get(regime, DEFAULT_INDEX)
    cfg["besov"] = {"alpha": a, "p": p, "q": q, **cfg["besov"]}
    validate_config(cfg, "resolved config")
    return cfg


def _inf(v):
    return np.inf if v == "inf" else float(v)


def besov_of(cfg: dict, regime: str | None = None) -> BesovIndex:
    a, p, q = REGIME_INDEX.get(regime, DEFAULT_INDEX)
    b = cfg["besov"]
    return BesovIndex(float(b.get("alpha", a)), _inf(b.get("p", p)), _inf(b.get("q", q)))


def solver_config(cfg: dict, regime: str) -> SolverConfig:
    s, w = cfg["solver"], cfg["weight"]
    return SolverConfig(T=float(w["T"]), tol=float(s["tol"]), max_iters=int(s["max_iters"]),
                        damping=float(s["damping"]), besov=besov_of(cfg, regime),
                        lambda_min=float(s["lambda_min"]), weight_kind=w["kind"],
                        kappa=float(w["kappa"]))


def field_of(cfg: dict):
    return make_field(cfg["field"]["name"], **cfg["field"]["params"])


def grid_of(cfg: dict) -> GridSpec:
    return GridSpec(float(cfg["grid"]["L"]), int(cfg["grid"]["N"]))


def _series_params(p: dict, seed: int) -> tuple[RandomSeriesParams, tuple[int, int] | None]:
    J = p.get("J", 6)
    levels = None
    if isinstance(J, list):
        levels = (int(J[0]), int(J[1]))
        J = levels[1]
    try:
        rp = RandomSeriesParams(float(p.get("s", 0.9)), float(p.get("r", 0.0)), int(J), seed)
    except TypeError:
        raise ValidationError(f"bad wavelet series parameters {p}") from None
    return rp, levels


def make_signal(cfg: dict, spec: GridSpec) -> GridSignal:
    """The configured signal on ``spec`` (unlocalized for random generators)."""
    sig = cfg["signal"]
    kind, p, seed = sig["kind"], sig["params"], int(sig["seed"])
    T = float(cfg["weight"]["T"])
    if kind == "sin":
        return gen_sine_bump(spec, T, float(p.get("amp", 1.0)), float(p.get("freq", 1.0)))
    if kind == "tone":
        k = int(p.get("k", 64))
        return GridSignal(spec, float(p.get("amp", 1.0)) * np.cos(np.pi * k * spec.x / spec.L))
    if kind == "weierstrass":
        J = p.get("J")
        return gen_weierstrass(spec, float(p.get("alpha0", 0.4)), None if J is None else int(J))
    if kind == "fbm":
        f = gen_fbm(float(p.get("H", 0.45)), spec, T, seed, localize=bool(p.get("localize", True)))
    elif kind == "brownian":
        J = p.get("J")
        f = gen_brownian(spec, T, seed, None if J is None else int(J))
    elif kind == "wavelet":
        params, _ = _series_params(p, seed)
        f = gen_wavelet_series(params, spec, T)
    elif kind == "csv":
        if "path" not in p:
            raise ValidationError("csv signal needs params.path")
        f = read_signal_csv(p["path"], spec.L)
        if f.spec != spec:
            raise ValidationError(f"{p['path']}: grid N={f.spec.N} does not match config N={spec.N}")
    else:
        raise ValidationError(f"unknown signal kind {kind!r}")
    eps = float(p.get("eps", 0.0))
    return mollify(f, eps) if eps > 0 else f


def driver_of(cfg: dict, spec: GridSpec) -> GridSignal:
    """theta = phi_T (X - X(0)): the signal localized and anchored for the solvers."""
    X = make_signal(cfg, spec)
    if X.shape != ():
        raise ValidationError("solvers take scalar signals")
    T = float(cfg["weight"]["T"])
    loc = make_localizer(T, spec).values.values
    return GridSignal(spec, loc * (X.values - X.at_origin()))


# ---------------------------------------------------------------- commands

def _window(spec: GridSpec, T: float):
    return np.abs(spec.x) <= T + 1e-12 * spec.L


def cmd_analyze(cfg, out):
    spec = grid_of(cfg)
    f = make_signal(cfg, spec)
    idx = besov_of(cfg)
    part = build_partition(spec)
    try:
        ahat = regularity_estimate(f, idx.p, part)
    except PcalError as e:
        ahat = str(e)
    res = {"besov_norm_lp": besov_norm_lp(f, idx, part),
           "besov_norm_modulus": besov_norm_modulus(f, idx) if f.shape == () else None,
           "alpha_hat": ahat, "lp_norm": lp_norm(f, idx.p), "sup_norm": lp_norm(f, np.inf),
           "levels": part.J + 3}
    out["analyze_blocks.csv"] = decomposition_csv(f, idx.p, idx.alpha, part)
    return res


def cmd_decompose(cfg, out):
    spec = grid_of(cfg)
    f = make_signal(cfg, spec)
    idx = besov_of(cfg)
    rows = decomposition_rows(f, idx.p, idx.alpha)
    out["decompose.csv"] = decomposition_csv(f, idx.p, idx.alpha)
    l2 = np.array([r[1] for r in rows])
    dom = int(np.argmax(l2))
    share = float(l2[dom] ** 2 / np.sum(l2**2)) if np.any(l2 > 0) else 0.0
    rec = decompose(f)
    err = float(np.max(np.abs(rec.reconstruct().values - f.values)))
    return {"dominant_level": rows[dom][0], "dominant_energy_share": share,
            "reconstruction_error": err, "J": len(rows) - 3}


def cmd_product(cfg, out):
    spec = grid_of(cfg)
    f = make_signal(cfg, spec)
    g = derivative(f)
    bp = bony_product(f, g)
    fg = f.values * g.values
    scl = float(np.max(np.abs(fg))) or 1.0
    idx = besov_of(cfg)
    low = BesovIndex(idx.alpha - 1, idx.p, idx.q)
    res = {"regrouping_rel": float(np.max(np.abs(bp.product.values - fg))) / scl,
           "norms": {"T_f_g": besov_norm_lp(bp.Tfg, low), "T_g_f": besov_norm_lp(bp.Tgf, low),
                     "pi": besov_norm_lp(bp.pi, BesovIndex(2 * idx.alpha - 1, idx.p, idx.q))},
           "second_factor": "derivative of the signal"}
    out["product.csv"] = csv_text(["x", "T_f_g", "T_g_f", "pi", "product"],
                                  zip(spec.x, bp.Tfg.values, bp.Tgf.values, bp.pi.values,
                                      bp.product.values))
    return res


def _oracle_error(F, u0, theta, u, spec, T):
    want = closed_form_solution(F, u0, theta.values)
    if want is None:
        return None
    w = _window(spec, T)
    return float(np.max(np.abs(u.values[w] - want[w])))


def cmd_young(cfg, out):
    spec = grid_of(cfg)
    th = driver_of(cfg, spec)
    F = field_of(cfg)
    sc = solver_config(cfg, "young")
    u0 = float(cfg["solver"]["u0"])
    r = young_solve(u0, derivative(th), F, sc)
    res = r.to_dict()
    res["sup_error"] = _oracle_error(F, u0, th, r.u, spec, sc.T)
    out["young.csv"] = csv_text(["x", "theta", "u"], zip(spec.x, th.values, r.u.values))
    return res


def _rough_path(cfg, spec, sc):
    sig = cfg["signal"]
    if sig["kind"] == "wavelet":
        params, levels = _series_params(sig["params"], int(sig["seed"]))
        rp, diag = lift(params, sc.index("rough"), sc.T, spec=spec, levels=levels)
        return rp, diag.to_dict()
    return grid_exact_path(driver_of(cfg, spec), sc.T, sc.index("rough")), None


def cmd_rough(cfg, out):
    spec = grid_of(cfg)
    F = field_of(cfg)
    sc = solver_config(cfg, "rough")
    u0 = float(cfg["solver"]["u0"])
    rp, diag = _rough_path(cfg, spec, sc)
    psi = make_weight(sc.weight_kind, sc.kappa, sc.T, spec)
    r = paracontrolled_solve(u0, rp, F, psi, sc)
    res = r.to_dict()
    res["sup_error"] = _oracle_error(F, u0, rp.theta, r.u, spec, sc.T)
    res["rough_path"] = {"provenance": rp.provenance, "theta_norm": rp.theta_norm,
                         "eta_norm": rp.eta_norm}
    if diag is not None:
        res["lift"] = diag
    out["rough.csv"] = csv_text(["x", "theta", "u_tilde", "u_sharp"],
                                zip(spec.x, rp.theta.values, r.u_tilde.values, r.u_sharp.values))
    return res


def _lift_grid(cfg, explicit_N: bool, J_max: int) -> GridSpec:
    spec = grid_of(cfg)
    if explicit_N:
        return spec
    while meyer_max_level(spec) < J_max and spec.N < 2**16:
        spec = GridSpec(spec.L, spec.N * 2)
    cfg["grid"]["N"] = spec.N
    return spec


def cmd_lift(cfg, out, explicit_N=False):
    sig = cfg["signal"]
    if sig["kind"] != "wavelet":
        raise ValidationError("lift needs a wavelet series signal (use --params s=...,r=...,J=lo..hi)")
    params, levels = _series_params(sig["params"], int(sig["seed"]))
    spec = _lift_grid(cfg, explicit_N, params.J_max)
    idx = besov_of(cfg)
    rp, diag = lift(params, idx, float(cfg["weight"]["T"]), spec=spec, levels=levels)
    rows = [(J, d, diag.ratios[i - 1] if i > 0 else float("nan"))
            for i, (J, d) in enumerate(zip(diag.levels, diag.d))]
    out["lift.csv"] = csv_text(["J", "d", "ratio"], rows)
    res = diag.to_dict()
    res["target_regularity"] = params.target_regularity
    return res


def _bump(spec: GridSpec, T: float) -> GridSignal:
    return make_localizer(T / 2, spec).values


def cmd_probe(cfg, out):
    spec = grid_of(cfg)
    F = field_of(cfg)
    u0 = float(cfg["solver"]["u0"])
    regime = cfg["signal"]["params"].get("regime", "rough")
    deltas = (1e-2, 1e-3)
    T = float(cfg["weight"]["T"])
    bump = _bump(spec, T)
    if regime == "young":
        sc = solver_config(cfg, "young")
        xi = derivative(driver_of(cfg, spec))
        pairs = [((u0, xi), (u0, xi))] + [((u0, xi), (u0, xi + d * bump)) for d in deltas]
        ratios = young_lipschitz_probe(pairs, F, sc)
    else:
        sc = solver_config(cfg, "rough")
        rp, _ = _rough_path(cfg, spec, sc)
        psi = make_weight(sc.weight_kind, sc.kappa, sc.T, spec)
        pert = [GeometricRoughPath(rp.theta, rp.xi, rp.eta + d * bump, rp.T, "perturbed")
                for d in deltas]
        pairs = [((u0, rp), (u0, rp))] + [((u0, rp), (u0, q)) for q in pert]
        ratios = ito_lyons_probe(pairs, F, psi, sc)
    rows = [(0.0,) + (r["ratio"],) for r in ratios[:1]] + [
        (d, r["ratio"]) for d, r in zip(deltas, ratios[1:])]
    out["probe.csv"] = csv_text(["delta", "ratio"], rows)
    return {"regime": regime, "deltas": [0.0, *deltas], "probes": ratios}


def cmd_selftest(cfg, out):
    return run_selftest(int(cfg["signal"]["seed"]))


def cmd_bench(cfg, out, explicit_N=False):
    spec = grid_of(cfg) if explicit_N else GridSpec(float(cfg["grid"]["L"]), 2**14)
    cfg["grid"]["N"] = spec.N
    rng = np.random.default_rng(int(cfg["signal"]["seed"]))
    f = GridSignal(spec, rng.standard_normal(spec.N))
    g = GridSignal(spec, rng.standard_normal(spec.N))
    build_partition(spec)
    times = []
    for _ in range(3):
        t0 = time.perf_counter()
        decompose(f)
        bony_product(f, g)
        times.append(time.perf_counter() - t0)
    return {"N": spec.N, "wall_seconds": times, "best_seconds": min(times),
            "threads": worker_count()}


HANDLERS = {"analyze": cmd_analyze, "decompose": cmd_decompose, "product": cmd_product,
            "young": cmd_young, "rough": cmd_rough, "lift": cmd_lift, "probe": cmd_probe,
            "selftest": cmd_selftest, "bench": cmd_bench}


# ---------------------------------------------------------------- driver

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcal", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"pcal {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file (schema 1)")
        sp.add_argument("--out", help="directory for the JSON report and CSV data")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--L", type=float)
        sp.add_argument("--N", type=int)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--p", type=_parse_value)
        sp.add_argument("--q", type=_parse_value)
        sp.add_argument("--field", help="name[:key=value,...], e.g. linear:a=0.5")
        sp.add_argument("--signal", help="kind[:key=value,...], e.g. fbm:H=0.45,eps=0.01")
        sp.add_argument("--params", help="signal parameters, e.g. s=0.8,r=0.4,J=3..8")
        sp.add_argument("--input", help="CSV signal file (x, channel_0)")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--max-iters", dest="max_iters", type=int)
        sp.add_argument("--damping", type=float)
        sp.add_argument("--lambda-min", dest="lambda_min", type=float)
        sp.add_argument("--u0", type=float)
        sp.add_argument("--weight", choices=["exp_quadratic", "rational"])
        sp.add_argument("--kappa", type=float)
        sp.add_argument("--T", type=float)
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    args = build_parser().parse_args(argv)
    try:
        worker_count()
        cfg = resolve_config(args)
        explicit_N = args.N is not None or (
            args.config is not None and "N" in load_config(args.config).get("grid", {}))
        out: dict[str, str] = {}
        handler = HANDLERS[args.command]
        if args.command in ("lift", "bench"):
            result = handler(cfg, out, explicit_N)
        else:
            result = handler(cfg, out)
    except CliError as e:
        print(f"pcal: error: {e}", file=stderr)
        return e.code
    except SolverError as e:
        print(f"pcal: solver failure: {e}", file=stderr)
        return 3
    except (ValidationError, ValueError, TypeError) as e:
        print(f"pcal: error: {e}", file=stderr)
        return 2
    report = {"command": args.command, "version": __version__, "config": cfg, "result": result}
    text = report_json(report)
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        write_text(d / f"{args.command}.json", text)
        for name, body in out.items():
            write_text(d / name, body)
    else:
        stdout.write(text)
    if args.command == "selftest" and not result["passed"]:
        print("pcal: selftest failed", file=stderr)
        return 4
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
