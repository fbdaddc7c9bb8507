"""``chainscope`` command line.

Exit codes: 0 success, 1 golden-suite failure, 2 invalid input, 3 undecided.
Reports are JSON with sorted keys so repeated runs are byte-identical.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import nested as N
from .errors import ChainscopeError, ConfigError, PreconditionError
from .golden import run_golden_suite
from .locator import locate_all_components, locate_cr
from .relations import (
    build_gap_matrix,
    chain_reaches,
    cr_report,
    ntilde_chain,
    ntilde_witness,
    orbit_witness,
    recurrence_witness,
    to_dot,
)
from .strong import DEFAULT_METRICS, parse_metric, strong_report
from .systems import SYSTEM_NAMES, format_state, load_system_config, parse_state

EXIT_OK, EXIT_SUITE, EXIT_INVALID, EXIT_UNDECIDED = 0, 1, 2, 3

# config-file keys that map onto command-line options
_CONFIG_KEYS = {
    "system", "grid_n", "required_points", "cycle_n", "truncation_k", "samples",
    "eps", "k_max", "schedule", "from", "to", "set", "mode", "metrics", "out", "dot", "threads", "only",
}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with the same fields as the flags")
    p.add_argument("--system", choices=SYSTEM_NAMES)
    p.add_argument("--grid", type=int, dest="grid_n", help="grid size for interval maps")
    p.add_argument("--required", type=float, nargs="*", dest="required_points",
                   help="points forced into the interval grid")
    p.add_argument("--cycle-n", type=int, dest="cycle_n")
    p.add_argument("--k", type=int, dest="truncation_k", help="subshift truncation")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--threads", type=int, help="worker threads (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chainscope", description="Chain recurrence on sampled dynamical systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("relations", help="orbit, recurrence, N~ and chain relations for one pair")
    _common(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--kmax", type=int, dest="k_max")
    p.add_argument("--from", dest="from_")
    p.add_argument("--to")

    p = sub.add_parser("cr", help="chain-recurrent set and SCC structure at one eps")
    _common(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--dot", help="also write the eps-graph in Graphviz format")

    p = sub.add_parser("strong", help="strong-chain values and recurrent sets")
    _common(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--metrics", help=f"comma-separated transforms (default {','.join(DEFAULT_METRICS)})")
    p.add_argument("--values", action="store_true", default=None, help="include dense value matrices (n <= 512)")

    p = sub.add_parser("nested", help="nested chains over a decreasing schedule")
    _common(p)
    p.add_argument("--schedule", help="'geometric:first,count' or a comma-separated list")
    p.add_argument("--from", dest="from_")
    p.add_argument("--to")
    p.add_argument("--set", help="comma-separated states; checks every ordered pair")
    p.add_argument("--mode", choices=("exact", "greedy"))

    p = sub.add_parser("locate", help="projected orbits and terminal components")
    _common(p)
    p.add_argument("--from", dest="from_", help="seed of the projected orbit")
    p.add_argument("--eps", type=float, help="also list terminal components at this eps")

    p = sub.add_parser("paper", help="run the golden cases")
    p.add_argument("--only", help="run only cases whose name starts with this prefix")
    p.add_argument("--out")
    p.add_argument("--config")
    p.add_argument("--threads", type=int)
    p.add_argument("--fault-sigma1-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def _read_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    unknown = sorted(set(cfg) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown field {unknown[0]!r}")
    return cfg


def _settings(args) -> dict:
    """Config file values overridden by any flag given on the command line."""
    cfg = _read_config(args.config) if getattr(args, "config", None) else {}
    for key, val in vars(args).items():
        if key in ("config", "command", "fault_sigma1_scale") or val is None:
            continue
        cfg["from" if key == "from_" else key] = val
    return cfg


def _system(cfg: dict):
    if "system" not in cfg:
        raise ConfigError("--system (or config field 'system') is required")
    return load_system_config(cfg)


def _need(cfg: dict, key: str, flag: str):
    if cfg.get(key) is None:
        raise ConfigError(f"{flag} (or config field {key!r}) is required")
    return cfg[key]


def _eps(cfg: dict) -> float:
    eps = _need(cfg, "eps", "--eps")
    if not isinstance(eps, (int, float)) or not eps > 0 or not math.isfinite(eps):
        raise ConfigError(f"field 'eps' must be a positive real, got {eps!r}")
    return float(eps)


def _index(system, text) -> int:
    return system.index_of(parse_state(system, text))


def _threads(cfg: dict) -> int:
    t = cfg.get("threads", 1)
    if not isinstance(t, int) or t < 1:
        raise ConfigError(f"field 'threads' must be a positive integer, got {t!r}")
    return t


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(report: dict, out) -> None:
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, report)


def cmd_relations(cfg):
    s = _system(cfg)
    eps = _eps(cfg)
    k_max = _need(cfg, "k_max", "--kmax")
    if not isinstance(k_max, int) or k_max < 0:
        raise ConfigError(f"field 'k_max' must be a nonnegative integer, got {k_max!r}")
    x = parse_state(s, _need(cfg, "from", "--from"))
    y = parse_state(s, _need(cfg, "to", "--to"))
    k_o = orbit_witness(s, x, y, k_max)
    k_r = recurrence_witness(s, x, y, eps, k_max)
    nw = ntilde_witness(s, x, y, eps, k_max)
    report = {
        "schema": 1,
        "system": s.name,
        "x": format_state(x),
        "y": format_state(y),
        "eps": eps,
        "k_max": k_max,
        "O": {"holds": k_o is not None, "k": k_o},
        "R": {"holds": k_r is not None, "k": k_r},
        "Ntilde": {"holds": nw is not None, "z": None, "k": None, "chain": None},
        "C": None,
    }
    if nw is not None:
        z, k = nw
        report["Ntilde"].update(z=format_state(z), k=k, chain=[format_state(p) for p in ntilde_chain(s, x, y, z, k).points])
    if x in s.samples and y in s.samples:
        g = build_gap_matrix(s)
        ch = chain_reaches(g, eps, s.index_of(x), s.index_of(y))
        report["C"] = {"holds": ch is not None, "chain": None if ch is None else list(ch.points)}
    return EXIT_OK, report


def cmd_cr(cfg):
    s = _system(cfg)
    eps = _eps(cfg)
    g = build_gap_matrix(s)
    report = cr_report(g, eps)
    report["system"] = s.name
    if cfg.get("dot"):
        Path(cfg["dot"]).write_text(to_dot(g, eps))
    return EXIT_OK, report


def cmd_strong(cfg):
    s = _system(cfg)
    eps = _eps(cfg)
    metrics = cfg.get("metrics", ",".join(DEFAULT_METRICS))
    names = [m for m in (metrics.split(",") if isinstance(metrics, str) else metrics) if m.strip()]
    if not names:
        raise ConfigError("at least one metric is required")
    for m in names:
        parse_metric(m)
    report = strong_report(build_gap_matrix(s), eps, names, include_values=bool(cfg.get("values")))
    report["system"] = s.name
    return EXIT_OK, report


def cmd_nested(cfg):
    s = _system(cfg)
    sched_spec = _need(cfg, "schedule", "--schedule")
    sched = N.Schedule.parse(sched_spec) if isinstance(sched_spec, str) else N.Schedule(tuple(sched_spec))
    mode = cfg.get("mode", "exact")
    g = build_gap_matrix(s)
    if cfg.get("set") is not None:
        items = cfg["set"].split(",") if isinstance(cfg["set"], str) else cfg["set"]
        M = sorted({_index(s, t) for t in items})
        if not M:
            raise ConfigError("--set must name at least one state")
        pairs = [(a, b) for a in M for b in M]
        with ThreadPoolExecutor(max_workers=_threads(cfg)) as pool:
            results = list(pool.map(lambda p: N.nested_decide(g, sched, *p, mode), pairs))
        report = {
            "schema": 1,
            "system": s.name,
            "set": M,
            "mode": mode,
            "nested_transitive": all(r.ok for r in results),
            "pairs": [{"from": a, "to": b, **r.certificate()} for (a, b), r in zip(pairs, results)],
        }
        undecided = any(r.status == "undecided" for r in results) and not any(r.status == "infeasible" for r in results)
        return (EXIT_UNDECIDED if undecided else EXIT_OK), report
    x = _index(s, _need(cfg, "from", "--from"))
    y = _index(s, _need(cfg, "to", "--to"))
    res = N.nested_decide(g, sched, x, y, mode)
    report = {"system": s.name, "from": x, "to": y, "mode": mode, **res.certificate(g.labels)}
    return (EXIT_UNDECIDED if res.status == "undecided" else EXIT_OK), report


def cmd_locate(cfg):
    s = _system(cfg)
    g = build_gap_matrix(s)
    report = {"schema": 1, "system": s.name, "rho": g.resolution()}
    if cfg.get("from") is None and cfg.get("eps") is None:
        raise ConfigError("locate needs --from (a seed) and/or --eps")
    if cfg.get("from") is not None:
        report["orbit"] = locate_cr(g, _index(s, cfg["from"])).to_json()
    if cfg.get("eps") is not None:
        report["eps"] = eps = _eps(cfg)
        report["components"] = [c.to_json() for c in locate_all_components(g, eps)]
    return EXIT_OK, report


def cmd_golden(cfg, fault_scale: float = 1.0):
    code, report = run_golden_suite(only=cfg.get("only"), sigma1_scale=fault_scale)
    if not report["cases"]:
        raise ConfigError(f"--only {cfg.get('only')!r} matches no case")
    return code, report


COMMANDS = {
    "relations": cmd_relations,
    "cr": cmd_cr,
    "strong": cmd_strong,
    "nested": cmd_nested,
    "locate": cmd_locate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _settings(args)
        _threads(cfg)
        if args.command == "paper":
            code, report = cmd_golden(cfg, args.fault_sigma1_scale)
            for case in report["cases"]:
                print(f"{'PASS' if case['passed'] else 'FAIL'} {case['name']}", file=sys.stderr)
            if report["failed"]:
                print(f"failed: {', '.join(report['failed'])}", file=sys.stderr)
        else:
            code, report = COMMANDS[args.command](cfg)
        _emit(report, cfg.get("out"))
        return code
    except PreconditionError as exc:
        hint = "" if exc.min_eps is None else f" (need eps > {exc.min_eps!r})"
        print(f"chainscope: precondition: {exc}{hint}", file=sys.stderr)
        return EXIT_INVALID
    except (ChainscopeError, ValueError) as exc:
        print(f"chainscope: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
