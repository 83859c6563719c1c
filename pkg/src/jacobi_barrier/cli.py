"""Command-line front end.

``--nodes`` is the number of interpolation points, i.e. polynomial degree
plus one. Every command accepts ``--config file.json`` holding a flat object
keyed by flag names; flags given on the command line win over the file.

Exit codes: 0 ok, 1 a reproduced table row or timing check failed,
2 invalid input, 3 numerical failure, 4 file I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import statistics
import sys
import time
from typing import Any, Sequence

import numpy as np

from .jacobi import JacobiParams, RootConvergenceError
from .operator import max_error_study, price, price_curve, spot_grid
from .oracles import McConfig, mc_price
from .tables import TABLE_IDS, load_table, summarize, table_rows
from .transform import OptionContract

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

DEFAULTS: dict[str, Any] = {
    "spot": 100.0, "strike": 100.0, "lower": 95.0, "upper": 120.0,
    "rate": 0.05, "vol": 0.25, "expiry": 0.5, "dates": 5,
    "nodes": 25, "jacobi_a": -0.5, "jacobi_b": -0.5,
    "method": "matrix", "paths": 1_000_000, "seed": 20240607,
    "format": None, "out": None, "timings": False,
    "spots": None, "grid_points": 50,
    "n_min": 5, "n_max": 40, "reference": "self",
    "dates_list": "5,25,125", "repeats": 5,
}

CONTRACT_KEYS = ("spot", "strike", "lower", "upper", "rate", "vol", "expiry", "dates")


class UsageError(ValueError):
    pass


def _contract_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("contract")
    g.add_argument("--spot", type=float)
    g.add_argument("--strike", type=float)
    g.add_argument("--lower", type=float)
    g.add_argument("--upper", type=float)
    g.add_argument("--rate", type=float)
    g.add_argument("--vol", type=float)
    g.add_argument("--expiry", type=float)
    g.add_argument("--dates", type=int, help="number of monitoring dates M")
    m = p.add_argument_group("method")
    m.add_argument("--nodes", type=int, help="interpolation points (degree + 1)")
    m.add_argument("--jacobi-a", dest="jacobi_a", type=float)
    m.add_argument("--jacobi-b", dest="jacobi_b", type=float)


def _output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("human", "csv", "json"))
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--config", help="flat JSON file of flag values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jacobi-barrier",
        description="Discrete double-barrier knock-out calls by Lagrange interpolation on Jacobi nodes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    kw = dict(argument_default=argparse.SUPPRESS)

    p = sub.add_parser("price", help="price one contract", **kw)
    _contract_flags(p)
    p.add_argument("--method", choices=("matrix", "mc", "both"))
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--timings", action="store_true", help="include phase timings in csv/json output")
    _output_flags(p)

    p = sub.add_parser("curve", help="prices over several spots sharing one matrix", **kw)
    _contract_flags(p)
    p.add_argument("--spots", help="comma separated spots; default is an even grid over [L, U]")
    p.add_argument("--grid-points", dest="grid_points", type=int)
    _output_flags(p)

    p = sub.add_parser("table", help="reproduce a published table", **kw)
    p.add_argument("table_id", type=int, choices=TABLE_IDS)
    _output_flags(p)

    p = sub.add_parser("converge", help="max error over a spot grid against node count", **kw)
    _contract_flags(p)
    p.add_argument("--n-min", dest="n_min", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--reference", choices=("self", "table"),
                   help="self: 100-node result on the grid; table: bundled published prices")
    p.add_argument("--grid-points", dest="grid_points", type=int)
    _output_flags(p)

    p = sub.add_parser("timing", help="wall time against monitoring count", **kw)
    _contract_flags(p)
    p.add_argument("--dates-list", dest="dates_list", help="comma separated monitoring counts")
    p.add_argument("--repeats", type=int)
    _output_flags(p)

    p = sub.add_parser("mc", help="Monte Carlo estimate", **kw)
    _contract_flags(p)
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    _output_flags(p)
    return parser


def _merge(ns: argparse.Namespace) -> dict[str, Any]:
    given = vars(ns)
    cfg = dict(DEFAULTS)
    path = given.pop("config", None)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a flat JSON object")
        for k, v in loaded.items():
            key = k.lstrip("-").replace("-", "_")
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {k!r}")
            cfg[key] = v
    cfg.update(given)
    return cfg


def _contract(cfg: dict[str, Any]) -> OptionContract:
    vals = {k: cfg[k] for k in CONTRACT_KEYS}
    vals["dates"] = int(vals["dates"])
    return OptionContract(**vals)


def _params(cfg: dict[str, Any]) -> JacobiParams:
    if int(cfg["nodes"]) < 1:
        raise UsageError(f"--nodes must be >= 1 (got {cfg['nodes']})")
    return JacobiParams(float(cfg["jacobi_a"]), float(cfg["jacobi_b"]))


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


# -- commands -----------------------------------------------------------------

def cmd_price(cfg: dict[str, Any]) -> tuple[dict, int]:
    c = _contract(cfg)
    jp = _params(cfg)
    method = cfg["method"]
    mcc = McConfig(int(cfg["paths"]), int(cfg["seed"])) if method in ("mc", "both") else None
    results, summary = [], {}
    res = None
    if method in ("matrix", "both"):
        res = price(c, int(cfg["nodes"]), jp)
        if not math.isfinite(res.price):
            raise FloatingPointError("non-finite price")
        results.append({"case": "matrix", "computed": res.price, "target": None, "abs_diff": None,
                        "pass": None})
        summary["price"] = res.price
        summary["timings"] = res.timings
    if mcc is not None:
        est = mc_price(c, mcc)
        row = {"case": "mc", "computed": est.price, "target": None, "abs_diff": None, "pass": None,
               "stderr": est.stderr, "paths": est.paths}
        if res is not None:
            diff = abs(res.price - est.price)
            row.update(target=res.price, abs_diff=diff, **{"pass": diff <= 4 * est.stderr})
            summary["agree_within_4_stderr"] = diff <= 4 * est.stderr
        results.append(row)
    return {"params": _report_params(cfg, "price"), "results": results, "summary": summary}, EXIT_OK


def cmd_curve(cfg: dict[str, Any]) -> tuple[dict, int]:
    c = _contract(cfg)
    jp = _params(cfg)
    spots = _floats(cfg["spots"]) if cfg["spots"] else list(spot_grid(c, int(cfg["grid_points"])))
    res = price_curve(c, spots, int(cfg["nodes"]), jp)
    results = [{"case": f"S0={s:g}", "spot": s, "computed": r.price} for s, r in zip(spots, res)]
    return {"params": _report_params(cfg, "curve"), "results": results,
            "summary": {"points": len(results)}}, EXIT_OK


def cmd_table(cfg: dict[str, Any]) -> tuple[dict, int]:
    params, rows = table_rows(int(cfg["table_id"]))
    summary = summarize(rows)
    return {"params": params, "results": rows, "summary": summary}, EXIT_OK if summary["all_pass"] else EXIT_FAIL


def _table_reference(c: OptionContract) -> tuple[list[float], list[float]]:
    spots, targets = [], []
    for tid in (2, 3):
        data = load_table(tid)
        for r in data["rows"]:
            vals = {**data["contract"], **{k: v for k, v in r.items() if k != "target"}}
            if all(math.isclose(float(vals[k]), float(getattr(c, k))) for k in CONTRACT_KEYS if k != "spot"):
                spots.append(float(vals["spot"]))
                targets.append(float(r["target"]))
    if not spots:
        raise UsageError("no bundled published prices match this contract; use --reference self")
    return spots, targets


def cmd_converge(cfg: dict[str, Any]) -> tuple[dict, int]:
    c = _contract(cfg)
    jp = _params(cfg)
    lo, hi = int(cfg["n_min"]), int(cfg["n_max"])
    if not 1 <= lo <= hi:
        raise UsageError(f"empty node range {lo}..{hi}")
    if cfg["reference"] == "table":
        spots, targets = _table_reference(c)
        reference = lambda xs: targets  # noqa: E731
    else:
        spots = list(spot_grid(c, int(cfg["grid_points"])))
        ref = [r.price for r in price_curve(c, spots, 100)]
        reference = lambda xs: ref  # noqa: E731
    results = []
    for n in range(lo, hi + 1):
        err = max_error_study(c, n, jp, spots, reference=reference)
        results.append({"nodes": n, "max_error": err})
    errs = [r["max_error"] for r in results]
    summary = {
        "first": errs[0], "last": errs[-1], "min": min(errs),
        "reduction": errs[0] / errs[-1] if errs[-1] > 0 else math.inf,
        "decreasing_steps": sum(b < a for a, b in zip(errs, errs[1:])),
        "steps": len(errs) - 1,
    }
    return {"params": _report_params(cfg, "converge"), "results": results, "summary": summary}, EXIT_OK


def cmd_timing(cfg: dict[str, Any]) -> tuple[dict, int]:
    c = _contract(cfg)
    jp = _params(cfg)
    dates = [int(d) for d in _floats(cfg["dates_list"])]
    if not dates:
        raise UsageError("--dates-list is empty")
    repeats = max(1, int(cfg["repeats"]))
    nodes = int(cfg["nodes"])
    contracts = [OptionContract(**{**{k: getattr(c, k) for k in CONTRACT_KEYS}, "dates": m}) for m in dates]
    for cm in contracts:
        price(cm, nodes, jp)  # warm caches
    runs: list[list[float]] = [[] for _ in dates]
    # rounds are interleaved so load drift affects every M alike
    for _ in range(repeats):
        for k, cm in enumerate(contracts):
            t0 = time.perf_counter()
            price(cm, nodes, jp)
            runs[k].append(time.perf_counter() - t0)
    results = [{"dates": m, "seconds": statistics.median(r)} for m, r in zip(dates, runs)]
    secs = [r["seconds"] for r in results]
    ratio = max(secs) / min(secs)
    summary = {"ratio": ratio, "limit": 1.5, "pass": ratio <= 1.5}
    return ({"params": _report_params(cfg, "timing"), "results": results, "summary": summary},
            EXIT_OK if summary["pass"] else EXIT_FAIL)


def cmd_mc(cfg: dict[str, Any]) -> tuple[dict, int]:
    c = _contract(cfg)
    est = mc_price(c, McConfig(int(cfg["paths"]), int(cfg["seed"])))
    results = [{"case": "mc", "computed": est.price, "stderr": est.stderr, "paths": est.paths}]
    return {"params": _report_params(cfg, "mc"), "results": results, "summary": {}}, EXIT_OK


COMMANDS = {"price": cmd_price, "curve": cmd_curve, "table": cmd_table,
            "converge": cmd_converge, "timing": cmd_timing, "mc": cmd_mc}

DEFAULT_FORMAT = {"converge": "csv", "timing": "csv"}


def _report_params(cfg: dict[str, Any], command: str) -> dict[str, Any]:
    keep = list(CONTRACT_KEYS) + ["nodes", "jacobi_a", "jacobi_b"]
    extra = {"price": ["method", "paths", "seed"], "mc": ["paths", "seed"],
             "converge": ["n_min", "n_max", "reference", "grid_points"],
             "timing": ["dates_list", "repeats"], "curve": ["spots", "grid_points"]}
    keep += extra.get(command, [])
    if command == "mc":
        keep = [k for k in keep if k not in ("nodes", "jacobi_a", "jacobi_b")]
    return {"command": command, **{k: cfg[k] for k in keep}}


# -- rendering ----------------------------------------------------------------

def _num(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_csv(report: dict) -> str:
    rows = report["results"]
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_num(r.get(k)) for k in cols])
    return buf.getvalue()


def _plain(v: Any) -> Any:
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render_json(report: dict) -> str:
    return json.dumps(_plain(report), indent=2) + "\n"


def _fmt(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "PASS" if v else "FAIL"
    if isinstance(v, (float, np.floating)):
        return f"{v:.6g}" if abs(v) < 1e-3 and v != 0 else f"{v:.6f}"
    return str(v)


def render_human(report: dict) -> str:
    p = report["params"]
    lines = []
    title = p.get("command") or f"table {p.get('table')}"
    lines.append(f"# {title}")
    if "source" in p:
        lines.append(f"# source: {p['source']}")
    for r in report["results"]:
        parts = [f"{k}={_fmt(v)}" for k, v in r.items()
                 if k not in ("case", "known_breakdown") and v is not None]
        head = f"{r['case']:<28}" if "case" in r else ""
        if r.get("known_breakdown"):
            parts.append("(known breakdown, not counted)")
        lines.append(head + "  ".join(parts))
    s = report["summary"]
    timings = s.get("timings")
    if timings:
        lines.append("timings: " + "  ".join(f"{k}={v * 1e3:.2f}ms" for k, v in timings.items()))
    rest = {k: v for k, v in s.items() if k != "timings"}
    if rest:
        lines.append("summary: " + "  ".join(f"{k}={_fmt(v)}" for k, v in rest.items()))
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str, with_timings: bool = False) -> str:
    if fmt == "human":
        return render_human(report)
    if not with_timings:
        # wall-clock numbers would break byte-identical reruns
        report = {**report, "summary": {k: v for k, v in report["summary"].items() if k != "timings"}}
    if fmt == "csv":
        return render_csv(report)
    return render_json(report)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    del args.command
    try:
        cfg = _merge(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    fmt = cfg["format"] or DEFAULT_FORMAT.get(command, "human")

    try:
        report, code = COMMANDS[command](cfg)
    except (RootConvergenceError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID

    text = render(report, fmt, bool(cfg.get("timings")))
    if cfg["out"]:
        try:
            with open(cfg["out"], "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {cfg['out']}: {exc}", file=sys.stderr)
            return EXIT_IO
        if command == "converge":
            s = report["summary"]
            print(f"wrote {cfg['out']}: max error {s['first']:.3e} at n={cfg['n_min']} -> "
                  f"{s['last']:.3e} at n={cfg['n_max']} ({s['decreasing_steps']}/{s['steps']} steps decreasing)")
    else:
        sys.stdout.write(text)
    if command == "timing" and fmt == "csv":
        s = report["summary"]
        print(f"max/min median time ratio {s['ratio']:.3f} (limit {s['limit']}): "
              f"{'PASS' if s['pass'] else 'FAIL'}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
