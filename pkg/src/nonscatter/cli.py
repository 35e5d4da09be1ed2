"""Command-line front end.

Exit codes: 0 success, 2 invalid input (including malformed JSON and
schema violations), 3 numerical diagnostic (for example an admissibility
violation detected by a solver).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path
from typing import Any, Iterable, Sequence

import jsonschema
import numpy as np

from .asymptotics import (
    asymptotic_terms,
    decay_probe,
    g_ratio,
    lambda_set,
    leading_order,
    sum_terms,
    vandermonde_classify,
)
from .density import HerglotzDensity
from .disk import wavenumber_sequence
from .errors import AdmissibilityError, DiagnosticError, ValidationError
from .geometry import RadiusFunction, admissibility_bound, check_hypotheses, max_log_second_derivative
from .oracle import QuadratureSpec, integral_I_many, integral_I_N_at
from .stationary import PAIRS, MapSpec, compose_iterate, stationary_set

TWO_PI = 2.0 * math.pi

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}


def _params(props: dict, required: Sequence[str]) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


DOMAIN_PARAMS = {
    "constant": _params({"radius": _POS}, []),
    "centered_ellipse": _params({"a": _POS, "b": _POS}, ["a", "b"]),
    "offset_disk": _params(
        {"R0": _POS, "x0": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}}, ["R0", "x0"]
    ),
    "focal_ellipse": _params({"a": _POS, "e": {"type": "number", "minimum": 0, "exclusiveMaximum": 1}}, ["a", "e"]),
    "log_fourier": _params(
        {"cos": {"type": "array", "items": _NUM}, "sin": {"type": "array", "items": _NUM}}, ["cos"]
    ),
    "piecewise_egg": _params(
        {
            "a": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            "mask": {
                "type": "array",
                "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
            },
            "harmonic": {"type": "integer", "minimum": 1},
        },
        ["a"],
    ),
}

CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["q", "domain"],
    "properties": {
        "q": {"type": "number", "exclusiveMinimum": 1},
        "domain": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": sorted(DOMAIN_PARAMS)},
                "params": {"type": "object"},
                "rotation": _NUM,
            },
            "allOf": [
                {
                    "if": {"properties": {"kind": {"const": kind}}},
                    "then": {"properties": {"params": schema}},
                }
                for kind, schema in sorted(DOMAIN_PARAMS.items())
            ],
        },
        "density": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {
                "fourier": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "prefixItems": [{"type": "integer"}, _NUM, _NUM],
                        "minItems": 3,
                        "maxItems": 3,
                    },
                },
                "samples": {
                    "type": "array",
                    "minItems": 16,
                    "items": {
                        "oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}]
                    },
                },
            },
        },
        "k_grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["min", "max", "count"],
            "properties": {"min": _POS, "max": _POS, "count": {"type": "integer", "minimum": 1}},
        },
        "eta_grid": {"type": "integer", "minimum": 1},
        "quadrature": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "min_nodes": {"type": "integer", "minimum": 64},
                "nodes_per_wavelength": _POS,
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lambda_tol": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.1},
                "root_tol": _POS,
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"format": {"enum": ["csv", "json"]}, "path": {"type": "string"}},
        },
    },
}

DEFAULT_K_GRID = {"min": 10.0, "max": 40.0, "count": 4}
DEFAULT_ETA_GRID = 8
DEFAULT_LAMBDA_TOL = 1e-8
DEFAULT_ROOT_TOL = 1e-12


# ---------------------------------------------------------------- config
def load_config(path: str | Path) -> dict[str, Any]:
    """Read and validate a config file.

    Raises
    ------
    ValidationError
        On unreadable files, malformed JSON (with line and column) or schema
        violations.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: Any) -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ValidationError(f"config invalid at {where}: {err.message}")
    kg = cfg.get("k_grid")
    if kg and kg["max"] < kg["min"]:
        raise ValidationError("k_grid.max must be >= k_grid.min")


def build_domain(spec: dict[str, Any]) -> RadiusFunction:
    kind = spec["kind"]
    p = dict(spec.get("params", {}))
    rot = float(spec.get("rotation", 0.0))
    if kind == "constant":
        return RadiusFunction.constant(p.get("radius", 1.0), rot)
    if kind == "centered_ellipse":
        return RadiusFunction.centered_ellipse(p["a"], p["b"], rot)
    if kind == "offset_disk":
        return RadiusFunction.offset_disk(p["R0"], p["x0"], rot)
    if kind == "focal_ellipse":
        return RadiusFunction.focal_ellipse(p["a"], p["e"], rot)
    if kind == "log_fourier":
        return RadiusFunction.log_fourier(p["cos"], p.get("sin", ()), rot)
    if kind == "piecewise_egg":
        return RadiusFunction.piecewise_egg(
            p["a"], p.get("mask", ((0.0, math.pi),)), p.get("harmonic", 1), rot
        )
    raise ValidationError(f"unknown domain kind {kind!r}")


def build_density(spec: dict[str, Any] | None) -> HerglotzDensity:
    if spec is None:
        return HerglotzDensity.constant()
    if "fourier" in spec:
        return HerglotzDensity.fourier({int(n): complex(x, y) for n, x, y in spec["fourier"]})
    samples = [complex(*s) if isinstance(s, list) else complex(s) for s in spec["samples"]]
    return HerglotzDensity.from_samples(samples)


def build_quadrature(cfg: dict[str, Any]) -> QuadratureSpec:
    return QuadratureSpec(**cfg.get("quadrature", {}))


def k_values(cfg: dict[str, Any], override: Sequence[float] | None) -> list[float]:
    if override:
        ks = [float(k) for k in override]
    else:
        g = cfg.get("k_grid", DEFAULT_K_GRID)
        ks = [float(v) for v in np.linspace(g["min"], g["max"], g["count"])]
    if any(not k > 0 for k in ks):
        raise ValidationError("wave numbers must be positive")
    return ks


def eta_values(cfg: dict[str, Any], override: Sequence[float] | None) -> list[float]:
    if override:
        return [float(e) for e in override]
    M = cfg.get("eta_grid", DEFAULT_ETA_GRID)
    return [TWO_PI * m / M for m in range(M)]


# ---------------------------------------------------------------- output
def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def rows_to_csv(rows: Iterable[dict[str, Any]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


class Table:
    """Rows plus column order and optional report-level metadata."""

    def __init__(self, columns: Sequence[str], rows: list[dict[str, Any]], meta: dict[str, Any] | None = None):
        self.columns = list(columns)
        self.rows = rows
        self.meta = meta or {}

    def render(self, fmt: str, cfg: dict[str, Any] | None) -> str:
        if fmt == "csv":
            return rows_to_csv(self.rows, self.columns)
        doc = {"columns": self.columns, "rows": self.rows, **self.meta}
        if cfg is not None:
            doc["config"] = cfg
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------ subcommands
def _ctx(args, admissible: bool = True) -> tuple[dict[str, Any], RadiusFunction, HerglotzDensity, float]:
    """Load the config; optionally insist on the admissibility bound."""
    if not args.config:
        raise ValidationError("this subcommand needs --config")
    cfg = load_config(args.config)
    rf, q = build_domain(cfg["domain"]), float(cfg["q"])
    if admissible:
        peak = max_log_second_derivative(rf)
        if not peak.value < admissibility_bound(q):
            raise AdmissibilityError(
                f"max (ln rho)'' = {peak.value:.6g} at t = {peak.argmax:.6g} is not below "
                f"sqrt(q)/(1+sqrt(q)) = {admissibility_bound(q):.6g}"
            )
    return cfg, rf, build_density(cfg.get("density")), q


def cmd_check(args):
    """Report admissibility and every theorem hypothesis for the domain."""
    cfg, rf, _, q = _ctx(args, admissible=False)
    report = check_hypotheses(rf, q)
    return {"report": report.to_dict(), "config": cfg}, cfg


def cmd_stationary(args):
    """List the four stationary points per observation angle."""
    cfg, rf, _, q = _ctx(args)
    rows = []
    for eta in eta_values(cfg, args.eta):
        for p in stationary_set(rf, q, eta):
            rows.append({
                "eta": eta, "j": p.j, "l": p.l, "theta": p.theta, "theta_xi": p.theta_xi,
                "psi": p.psi, "Psi": p.Psi, "det": p.det, "signature": p.signature, "f": p.f,
            })
    cols = ["eta", "j", "l", "theta", "theta_xi", "psi", "Psi", "det", "signature", "f"]
    return Table(cols, rows), cfg


def cmd_leading(args):
    """Evaluate the leading-order asymptotic term."""
    cfg, rf, phi, q = _ctx(args)
    ks = k_values(cfg, args.k)
    rows = []
    for eta in eta_values(cfg, args.eta):
        vals = np.atleast_1d(leading_order(rf, q, phi, eta, np.array(ks), args.N))
        for k, v in zip(ks, vals):
            rows.append({"k": k, "eta": eta, "N": args.N, "re": v.real, "im": v.imag})
    return Table(["k", "eta", "N", "re", "im"], rows), cfg


def cmd_integral(args):
    """Evaluate the boundary integral by quadrature."""
    cfg, rf, phi, q = _ctx(args, admissible=False)
    spec = build_quadrature(cfg)
    etas = eta_values(cfg, args.eta)
    rows = []
    for k in k_values(cfg, args.k):
        if args.N == 0:
            res = integral_I_many(rf, q, phi, etas, k, spec)
            vals, conv = [r.value for r in res], [r.converged for r in res]
        else:
            vals = list(integral_I_N_at(rf, q, phi, etas, k, args.N, spec))
            conv = [True] * len(vals)
        for eta, v, c in zip(etas, vals, conv):
            rows.append({"k": k, "eta": eta, "N": args.N, "re": v.real, "im": v.imag, "converged": c})
    return Table(["k", "eta", "N", "re", "im", "converged"], rows), cfg


SCAN_COLUMNS = ["k", "eta", "oracle_re", "oracle_im", "leading_re", "leading_im", "residual", "converged"]


def scan_rows(rf, q, phi, ks, etas, spec) -> list[dict[str, Any]]:
    """Oracle against leading order on the ``k x eta`` grid."""
    terms = {eta: asymptotic_terms(rf, q, phi, eta) for eta in etas}
    rows = []
    for k in ks:
        res = integral_I_many(rf, q, phi, etas, k, spec)
        for eta, r in zip(etas, res):
            lead = sum_terms(terms[eta], k, 0, q)
            rows.append({
                "k": k, "eta": eta, "oracle_re": r.value.real, "oracle_im": r.value.imag,
                "leading_re": lead.real, "leading_im": lead.imag,
                "residual": abs(r.value - lead), "converged": r.converged,
            })
    return rows


def cmd_scan(args):
    """Compare quadrature and leading order over a k x eta grid."""
    cfg, rf, phi, q = _ctx(args)
    rows = scan_rows(rf, q, phi, k_values(cfg, args.k), eta_values(cfg, args.eta), build_quadrature(cfg))
    return Table(SCAN_COLUMNS, rows), cfg


def cmd_decay(args):
    """Tabulate the k-scaled residual and its decay ratios."""
    cfg, rf, phi, q = _ctx(args)
    ks = k_values(cfg, args.k)
    spec = build_quadrature(cfg)
    rows = []
    verdicts = {}
    for eta in eta_values(cfg, args.eta):
        table = decay_probe(rf, q, phi, eta, ks, spec)
        verdicts[eta] = table.verdict
        for i, (k, r, kr, conv) in enumerate(table.rows):
            ratio = table.ratios[i - 1] if i else None
            rows.append({
                "eta": eta, "k": k, "residual": r, "scaled_residual": kr,
                "ratio": ratio, "converged": conv, "monotone": table.monotone, "verdict": table.verdict,
            })
    cols = ["eta", "k", "residual", "scaled_residual", "ratio", "converged", "monotone", "verdict"]
    return Table(cols, rows, {"verdicts": {repr(e): v for e, v in verdicts.items()}}), cfg


def _pair_name(p) -> str:
    return f"{p[0]}{p[1]}"


def cmd_gmap(args):
    """Tabulate the branch ratios G for every pair of branches."""
    cfg, rf, _, q = _ctx(args)
    pairs = [(a, b) for i, a in enumerate(PAIRS) for b in PAIRS[i + 1:]]
    cols = ["eta"] + [f"g_{_pair_name(a)}_{_pair_name(b)}" for a, b in pairs]
    rows = []
    for eta in eta_values(cfg, args.eta):
        pts = stationary_set(rf, q, eta)
        row = {"eta": eta}
        for (a, b), c in zip(pairs, cols[1:]):
            row[c] = g_ratio(rf, q, eta, a, b, pts)
        rows.append(row)
    return Table(cols, rows), cfg


def cmd_classify(args):
    """Classify the moment system at each observation angle."""
    if args.random is not None:
        return _classify_random(args)
    cfg, rf, phi, q = _ctx(args)
    tol = cfg.get("tolerances", {}).get("lambda_tol", DEFAULT_LAMBDA_TOL)
    norm = phi.sup_norm()
    rows = []
    for eta in eta_values(cfg, args.eta):
        terms = asymptotic_terms(rf, q, phi, eta)
        lam = lambda_set(phi, [t.point for t in terms], tol)
        verdict = vandermonde_classify(
            [t.weight for t in terms], [t.amplitude for t in terms], amp_tol=tol * norm * _amp_scale(terms)
        )
        rows.append({
            "eta": eta,
            "lambda": ";".join(_pair_name(p) for p in sorted(lam.members)),
            "lambda_size": len(lam),
            "label": verdict.label,
            "residual": verdict.residual,
            **{f"f_{_pair_name(t.point.label)}": t.weight for t in terms},
        })
    cols = ["eta", "lambda", "lambda_size", "label", "residual"] + [f"f_{_pair_name(p)}" for p in PAIRS]
    return Table(cols, rows), cfg


def _amp_scale(terms) -> float:
    """Largest ``|Psi| / |det|^(1/2)`` so the amplitude cut matches Lambda."""
    return max(abs(t.point.Psi) / math.sqrt(abs(t.point.det)) for t in terms)


def _classify_random(args):
    rng = np.random.default_rng(args.seed)
    rows = []
    for i in range(args.random):
        w = rng.normal(size=4)
        if rng.random() < 0.5:
            w[rng.permutation(4)[:2]] = w[0]
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        v = vandermonde_classify(w, c)
        rows.append({"instance": i, "label": v.label, "residual": v.residual})
    return Table(["instance", "label", "residual"], rows, {"seed": args.seed}), None


def cmd_disk(args):
    """Non-scattering wave numbers of a centred disk."""
    cfg = load_config(args.config) if args.config else None
    q = args.q if args.q is not None else (float(cfg["q"]) if cfg else 4.0)
    tol = (cfg or {}).get("tolerances", {}).get("root_tol", DEFAULT_ROOT_TOL)
    roots = wavenumber_sequence(args.n, q, args.R0, args.kmax, tol=tol)
    rows = [{"n": r.n, "k_root": r.k, "residual": r.residual} for r in roots]
    return Table(["n", "k_root", "residual"], rows, {"q": q, "R0": args.R0}), cfg


def cmd_iterate(args):
    """Iterate a composed map word and report the orbit."""
    cfg, rf, _, q = _ctx(args)
    if not args.word:
        raise ValidationError("iterate needs --word")
    toks = args.word.replace("*", " ").split()
    star = any(re.match(r"^T[12][12](\^-1)?$", t) for t in toks)
    if not star and rf.kind == "centered_ellipse":
        spec = MapSpec.parse(toks, q, ellipse=(rf.params["a"], rf.params["b"]))
    else:
        spec = MapSpec.parse(toks, q, rf=rf)
    orbit = compose_iterate(spec, args.t0, args.steps)
    rows = list(orbit.rows())
    return Table(["step", "lifted", "normalized", "increasing", "confined"], rows), cfg


COMMANDS = {
    "check": cmd_check,
    "stationary": cmd_stationary,
    "leading": cmd_leading,
    "integral": cmd_integral,
    "scan": cmd_scan,
    "decay": cmd_decay,
    "gmap": cmd_gmap,
    "classify": cmd_classify,
    "disk": cmd_disk,
    "iterate": cmd_iterate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonscatter", description="Stationary-phase toolkit for non-scattering analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    common.add_argument("--eta", type=float, nargs="+", help="observation angles in radians")
    common.add_argument("--k", type=float, nargs="+", help="wave numbers")
    common.add_argument("--N", type=int, default=0, help="theta_eta derivative order")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=(fn.__doc__ or name).strip().splitlines()[0] if fn.__doc__ else None)
        if name == "disk":
            p.add_argument("--n", type=int, default=0, help="angular index")
            p.add_argument("--kmax", type=float, default=30.0, help="largest wave number scanned")
            p.add_argument("--q", type=float, default=None, help="index of refraction (default: config q, else 4)")
            p.add_argument("--R0", type=float, default=1.0, help="disk radius")
        if name == "iterate":
            p.add_argument("--word", help="map word, e.g. 'T2^-1 T1' or 'T11^-1 T21'")
            p.add_argument("--t0", type=float, default=0.3, help="starting angle")
            p.add_argument("--steps", type=int, default=10, help="number of iterations")
        if name == "classify":
            p.add_argument("--random", type=int, default=None, help="classify this many random instances")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.N < 0:
        print("error: --N must be non-negative", file=sys.stderr)
        return 2
    try:
        result, cfg = COMMANDS[args.command](args)
        out_cfg = (cfg or {}).get("output", {})
        fmt = args.format or out_cfg.get("format", "csv")
        path = args.out or out_cfg.get("path")
        if isinstance(result, Table):
            text = result.render(fmt, cfg)
        else:
            text = json.dumps(_jsonable(result), indent=2, sort_keys=True) + "\n"
        emit(text, path)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DiagnosticError as exc:
        print(f"diagnostic: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
