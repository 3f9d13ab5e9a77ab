"""Command-line front end.

Subcommands: det, zeta, trace, residue, symbol, verify.  All angles are in
radians (expressions such as ``3*pi/4`` are accepted, degrees are not).
Every report embeds the fully resolved configuration.  Floats are printed
with 15 significant digits so identical inputs give byte-identical output.

Exit codes: 0 ok, 1 verification failure, 2 schema/input error, 3 angle not
Agmon, 4 unstable Laurent fit, 5 insufficient symbol depth, 6 any other
domain error.
"""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DepthInsufficient, FitUnstable, NotAgmon, OddZetaError, SchemaError
from .regdet import log_det, log_det_sym
from .spectralmodel import SpectralOperator, log_op, power_op
from .suites import SUITES, Params, run_suite, seed_from_env
from .symbolcalc import (
    DEFAULT_BANDWIDTH,
    DEFAULT_DEPTH,
    Symbol,
    anomaly_integrand,
    compose,
    log_symbol,
    power_symbol,
    residue_coboundary,
    residue_coboundary_sym,
    to_fourier,
    wodzicki_res,
)
from .zetacontinuation import ZetaFunction, continue_at, laurent_at_0, weighted_trace

EXIT_VERIFY = 1
EXIT_SCHEMA = 2
EXIT_AGMON = 3
EXIT_FIT = 4
EXIT_DEPTH = 5
EXIT_OTHER = 6
DIGITS = 15


@dataclass
class RunConfig:
    subcommand: str
    op: list[str] = field(default_factory=list)
    symbolfile: list[str] = field(default_factory=list)
    theta: float | None = None
    theta2: float | None = None
    sym: bool = False
    s: list[str] = field(default_factory=list)
    family: str = "log"
    action: str | None = None
    suite: str | None = None
    anomaly: list[str] = field(default_factory=list)
    coboundary: list[str] = field(default_factory=list)
    symmetrized: bool = False
    quad_nodes: int = 8
    depth: int = DEFAULT_DEPTH
    bandwidth: int = DEFAULT_BANDWIDTH
    k_expand: int = 6
    n_tail: int = 10_000
    fit_radius: float = 0.1
    fit_samples: int = 32
    tol: float | None = None
    format: str = "csv"
    double: bool = False
    seed: int = 0


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval_node(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval_node(node.operand))
    raise ValueError("unsupported expression")


def parse_angle(text: str) -> float:
    """Radians as a number or an arithmetic expression in ``pi``."""
    t = text.strip().lower()
    if t.endswith(("deg", "degree", "degrees", "°")):
        raise argparse.ArgumentTypeError(f"angles are in radians; got degrees {text!r}")
    try:
        return float(_eval_node(ast.parse(t, mode="eval").body))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an angle in radians: {text!r}") from exc


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise SchemaError(f"not a complex number: {text!r}") from exc


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def load_operator(path: str) -> SpectralOperator:
    return SpectralOperator.from_json(_load_json(path))


def load_symbol(path: str, bandwidth: int) -> Symbol:
    return Symbol.from_json(_load_json(path), bandwidth)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{DIGITS}g}"
    return str(x)


def _round(x: float) -> float:
    return float(f"{x:.{DIGITS}g}")


def flatten(row: dict) -> dict:
    """Split complex values into ``_re`` / ``_im`` columns."""
    out = {}
    for k, v in row.items():
        if isinstance(v, (complex, np.complexfloating)):
            out[k + "_re"] = float(v.real)
            out[k + "_im"] = float(v.imag)
        elif isinstance(v, dict):
            out[k] = ";".join(f"{dk}={_detail(dv)}" for dk, dv in v.items())
        else:
            out[k] = v
    return out


def _detail(v) -> str:
    if isinstance(v, (complex, np.complexfloating)):
        return f"{fmt(float(v.real))}{'+' if v.imag >= 0 else '-'}{fmt(abs(float(v.imag)))}i"
    return fmt(v)


def _json_value(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return _round(v) if math.isfinite(v) else str(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    return str(v)


def render(config: RunConfig, rows: list[dict], extra: dict | None = None) -> str:
    rows = [flatten(r) for r in rows]
    cfg = asdict(config)
    if config.format == "json":
        doc = {"config": cfg, "rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(_json_value(doc), indent=2) + "\n"
    header: list[str] = []
    for r in rows:
        header.extend(k for k in r if k not in header)
    if config.format == "csv":
        buf = io.StringIO()
        buf.write("# config " + json.dumps(_json_value(cfg), separators=(",", ":")) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(r[k]) if k in r else "" for k in header])
        return buf.getvalue()
    cells = [[fmt(r.get(k, "")) for k in header] for r in rows]
    widths = [max([len(h)] + [len(c[i]) for c in cells]) for i, h in enumerate(header)]
    lines = ["config: " + json.dumps(_json_value(cfg), separators=(",", ":"))]
    lines.append("  ".join(h.ljust(wd) for h, wd in zip(header, widths)))
    lines.extend("  ".join(c.ljust(wd) for c, wd in zip(cell, widths)) for cell in cells)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _det_params(c: RunConfig) -> dict:
    return {"k_expand": c.k_expand, "n_tail": c.n_tail, "radius": c.fit_radius, "samples": c.fit_samples}


def _require(value, name: str):
    if value is None or value == []:
        raise SchemaError(f"missing required option {name}")
    return value


def _single_op(c: RunConfig) -> SpectralOperator:
    return load_operator(_require(c.op, "--op")[0])


def cmd_det(c: RunConfig):
    A = _single_op(c)
    theta = _require(c.theta, "--theta")
    d = log_det(A, theta, **_det_params(c))
    row = {"theta": theta, "log_det": d.log_det, "det": d.det,
           "zeta_at_0": d.branch_provenance["zeta_at_0"], "fit_cross_validation": d.branch_provenance.get("cross_validation", 0.0),
           "k0": d.branch_provenance.get("k0", 0)}
    if c.sym:
        ds = log_det_sym(A, theta, **_det_params(c))
        row.update(partner=ds.partner_angle, log_det_partner=ds.branch_provenance["log_det_partner"],
                   log_det_sym=ds.log_det, det_sym=ds.det)
    return [row], 0


def cmd_zeta(c: RunConfig):
    A = _single_op(c)
    theta = _require(c.theta, "--theta")
    Z = ZetaFunction(A, A.require_agmon(theta), None, c.k_expand, c.n_tail)
    rows = []
    for text in c.s:
        s = parse_complex(text)
        rows.append({"theta": theta, "s": s, "zeta": continue_at(Z, s)})
    L = laurent_at_0(Z, radius=c.fit_radius, samples=c.fit_samples)
    rows.append({"theta": theta, "s": 0j, "zeta": L.finite_part, "pole": L.pole_coefficient,
                 "derivative": L.derivative_at_0})
    return rows, 0


def _family(c: RunConfig, A: SpectralOperator, theta: float):
    if c.family == "log":
        return log_op(A, theta)
    if c.family == "odd-log":
        return 0.5 * (log_op(A, theta) + log_op(A, theta - A.order * math.pi))
    if c.family == "power":
        return power_op(A, parse_complex(_require(c.s, "--s")[0]), theta)
    raise SchemaError(f"unknown family {c.family!r}")


def cmd_trace(c: RunConfig):
    """Weighted and symmetrized traces of a family built from the first
    operator, weighted by the second operator (or the first if absent)."""
    ops = [load_operator(p) for p in _require(c.op, "--op")]
    A, Q = ops[0], ops[-1]
    theta = _require(c.theta, "--theta")
    theta_Q = theta if c.theta2 is None else c.theta2
    fam = _family(c, A, theta)
    kw = {"k_expand": c.k_expand, "n_tail": c.n_tail, "radius": c.fit_radius, "samples": c.fit_samples}
    w1 = weighted_trace(fam, Q, theta_Q, **dict(kw))
    w2 = weighted_trace(fam, Q, theta_Q - Q.order * math.pi, **dict(kw))
    return [{"family": c.family, "theta": theta, "theta_Q": theta_Q, "weighted_theta": w1,
             "weighted_partner": w2, "tr_sym": 0.5 * (w1 + w2)}], 0


def cmd_residue(c: RunConfig):
    tol = 1e-8 if c.tol is None else c.tol
    if c.anomaly:
        A, B = (load_symbol(p, c.bandwidth) for p in c.anomaly)
        tA, tB = _require(c.theta, "--theta"), _require(c.theta2, "--theta2")
        nodes, weights = np.polynomial.legendre.leggauss(c.quad_nodes)
        ts, ws = 0.5 * (nodes + 1), 0.5 * weights
        vals = [anomaly_integrand(A, B, tA, float(t), c.depth, theta_B=tB) for t in ts]
        rows = [{"t": float(t), "integrand": v} for t, v in zip(ts, vals)]
        integral = complex(sum(w * v for w, v in zip(ws, vals)))
        worst = max(abs(v) for v in vals)
        rows.append({"t": "integral", "integrand": integral, "max_abs": worst, "passed": worst < tol})
        return rows, 0
    if c.coboundary:
        Q, A, B = (load_symbol(p, c.bandwidth) for p in c.coboundary)
        theta = _require(c.theta, "--theta")
        if c.symmetrized:
            val = residue_coboundary_sym(Q, theta, A, B, c.depth)
        else:
            val = residue_coboundary(Q, theta, A, B, c.depth)
        return [{"theta": theta, "symmetrized": c.symmetrized, "coboundary": val, "passed": abs(val) < tol}], 0
    rows = []
    for path in _require(c.symbolfile, "--symbolfile"):
        val = wodzicki_res(load_symbol(path, c.bandwidth))
        rows.append({"symbol": path, "residue": val, "vanishes": abs(val) < tol})
    return rows, 0


def cmd_symbol(c: RunConfig):
    syms = [load_symbol(p, c.bandwidth) for p in _require(c.symbolfile, "--symbolfile")]
    action = _require(c.action, "action")
    if action == "compose":
        if len(syms) != 2:
            raise SchemaError("compose needs two symbol files")
        out = compose(syms[0], syms[1], c.depth)
    elif action == "power":
        s = parse_complex(_require(c.s, "--s")[0])
        out = power_symbol(syms[0], s, _require(c.theta, "--theta"), c.depth)
    elif action == "log":
        out = log_symbol(syms[0], _require(c.theta, "--theta"), c.depth)
    else:
        raise SchemaError(f"unknown symbol action {action!r}")
    rows = []
    for comp in out.components:
        for side, vals in (("plus", comp.plus), ("minus", comp.minus)):
            coeffs = to_fourier(vals)
            B = (len(coeffs) - 1) // 2
            for n, z in enumerate(coeffs):
                if abs(z) > 0:
                    rows.append({"deg": complex(comp.degree).real, "side": side, "mode": n - B, "coeff": complex(z)})
    return rows, 0, {"symbol": out.to_json()}


def cmd_verify(c: RunConfig):
    p = Params(c.k_expand, c.n_tail, c.fit_radius, c.depth, c.bandwidth, c.seed)
    rows = run_suite(_require(c.suite, "suite"), p, c.double)
    if c.tol is not None:
        for r in rows:
            if not r.check.endswith(":doubling"):
                r.tolerance = c.tol
                r.passed = r.measured < c.tol and r.details.get("predicted", 0) == r.details.get("measured", 0)
    table = [{"suite": r.suite, "fixture": r.fixture, "check": r.check, "measured": r.measured,
              "tolerance": r.tolerance, "passed": r.passed, "details": r.details} for r in rows]
    return table, 0 if all(r.passed for r in rows) else EXIT_VERIFY


COMMANDS = {"det": cmd_det, "zeta": cmd_zeta, "trace": cmd_trace, "residue": cmd_residue,
            "symbol": cmd_symbol, "verify": cmd_verify}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--op", action="append", default=[], help="operator schema JSON (repeatable)")
    p.add_argument("--symbolfile", nargs="+", default=[], help="symbol schema JSON file(s)")
    p.add_argument("--theta", type=parse_angle, help="cut angle in radians")
    p.add_argument("--theta2", type=parse_angle, help="second angle in radians")
    p.add_argument("--sym", action="store_true", help="also report the symmetrized quantity")
    p.add_argument("--s", action="append", default=[], help="complex parameter s (repeatable)")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="symbol depth J")
    p.add_argument("--bandwidth", type=int, default=DEFAULT_BANDWIDTH, help="Fourier bandwidth N")
    p.add_argument("--k-expand", type=int, default=6, help="tail expansion depth K")
    p.add_argument("--n-tail", type=int, default=10_000, help="directly summed tail length")
    p.add_argument("--fit-radius", type=float, default=0.1, help="Laurent fit circle radius")
    p.add_argument("--fit-samples", type=int, default=32, help="Laurent fit sample count")
    p.add_argument("--tol", type=float, help="override the pass/fail tolerance")
    p.add_argument("--format", choices=("csv", "json", "plain"), default="csv")
    p.add_argument("--double", action="store_true", help="rerun with doubled K, N_tail, J, N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oddzeta", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in ("det", "zeta"):
        _common(sub.add_parser(name, help=f"{name} of a spectral operator"))
    p = sub.add_parser("trace", help="weighted and symmetrized traces")
    _common(p)
    p.add_argument("--family", choices=("log", "odd-log", "power"), default="log")
    p = sub.add_parser("residue", help="residues, coboundary and anomaly integrand")
    _common(p)
    p.add_argument("--anomaly", nargs=2, metavar=("A", "B"), default=[],
                   help="anomaly integrand of A^t B; angles --theta (A) and --theta2 (B)")
    p.add_argument("--coboundary", nargs=3, metavar=("Q", "A", "B"), default=[],
                   help="-(1/m) Res([log Q, A] B) at --theta")
    p.add_argument("--symmetrized", action="store_true")
    p.add_argument("--quad-nodes", type=int, default=8, help="Gauss-Legendre nodes on [0, 1]")
    p = sub.add_parser("symbol", help="compose / power / log of symbols")
    p.add_argument("action", choices=("compose", "power", "log"))
    _common(p)
    p = sub.add_parser("verify", help="run a built-in property suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    _common(p)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = set(RunConfig.__dataclass_fields__)
    data = {k: v for k, v in vars(ns).items() if k in fields}
    data["seed"] = seed_from_env()
    return RunConfig(**data)


def _fail(code: int, exc: Exception, stream) -> int:
    reason = getattr(exc, "code", type(exc).__name__)
    stream.write(json.dumps({"error": reason, "exit": code, "message": str(exc)}) + "\n")
    return code


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SCHEMA if exc.code else 0
    config = config_from_args(ns)
    try:
        result = COMMANDS[config.subcommand](config)
    except SchemaError as exc:
        return _fail(EXIT_SCHEMA, exc, stderr)
    except NotAgmon as exc:
        return _fail(EXIT_AGMON, exc, stderr)
    except FitUnstable as exc:
        return _fail(EXIT_FIT, exc, stderr)
    except DepthInsufficient as exc:
        return _fail(EXIT_DEPTH, exc, stderr)
    except OddZetaError as exc:
        return _fail(EXIT_OTHER, exc, stderr)
    rows, code = result[0], result[1]
    extra = result[2] if len(result) > 2 else None
    stdout.write(render(config, rows, extra))
    return code


if __name__ == "__main__":
    sys.exit(main())
