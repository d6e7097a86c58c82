"""``polyunzip`` command line.

Exit codes: 0 success (or the claim holds), 2 claim fails, 3 budget
exhausted, 4 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .catalog import SHAPES, InvariantViolation, UnknownShape, catalog
from .export import write_fold, write_svg
from .hampath import (BUDGET, SearchConfig, TooManyFlatVertices, find_hamiltonian_cycle,
                      find_hamiltonian_path, zipper_path_search)
from .lattice import Polycube, PolycubeError, PolycubeFormatError, is_polycube_tree, load_polycube
from .parity import hampath_obstruction, parity_report
from .reproduce import CLAIMS, run_claim
from .surface import extract_surface, skeleton_graph
from .unfold import (CutTree, DevelopmentInconsistent, InvalidCut, edge_unfolding_search,
                     unfold, zipper_unfolding_search)

EXIT_OK, EXIT_CLAIM, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4

ENV_BUDGET = "POLYUNZIP_BUDGET"
ENV_THREADS = "POLYUNZIP_THREADS"
DEFAULT_BUDGET = 600.0


class InputError(Exception):
    def __init__(self, category: str, kind: str, detail: str):
        super().__init__(f"{kind}: {detail}")
        self.category = category  # "io", "parse" or "validation"
        self.kind = kind
        self.detail = detail


def parse_duration(text: str) -> float:
    """``90``, ``90s``, ``500ms``, ``10m``, ``2h`` -> seconds."""
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*(ms|s|m|h)?\s*", str(text))
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}")
    value = float(m.group(1))
    scale = {"ms": 0.001, "s": 1, None: 1, "m": 60, "h": 3600}[m.group(2)]
    if value * scale <= 0:
        raise argparse.ArgumentTypeError("duration must be positive")
    return value * scale


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k != "elapsed_ms"}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


@dataclass
class RunReport:
    command: str
    input: dict
    config: dict
    payload: dict
    stats: dict = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        # payload keys sit at the top level, so search commands read as
        # {"result": ..., "path": ..., "certificate": ..., "stats": ...}
        return {"command": self.command, "input": self.input, "config": self.config,
                **self.payload, "stats": self.stats, "artifacts": self.artifacts}


def input_digest(p: Polycube) -> str:
    text = json.dumps(sorted(list(c) for c in p.cubes), separators=(",", ":"))
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def _load_input(args) -> tuple[Polycube, dict]:
    shape = getattr(args, "shape", None)
    path = getattr(args, "input", None) or getattr(args, "file", None)
    if shape and path:
        raise InputError("io", "UsageError", "give either --shape or an input file, not both")
    if not shape and not path:
        raise InputError("io", "UsageError", "no input: use --shape NAME or --input FILE")
    try:
        if shape:
            p = catalog(shape, getattr(args, "k", None))
            info = {"shape": p.name}
        else:
            p = load_polycube(path)
            info = {"file": str(path)}
    except UnknownShape as exc:
        raise InputError("io", "UnknownShape",
                         f"{exc.args[0]!r}; known: {', '.join(SHAPES)}") from None
    except OSError as exc:
        raise InputError("io", "IOError", str(exc)) from None
    except PolycubeFormatError as exc:
        raise InputError("parse", exc.kind, str(exc)) from None
    except PolycubeError as exc:
        raise InputError("validation", exc.kind, str(exc)) from None
    except InvariantViolation as exc:
        raise InputError("validation", "InvariantViolation", str(exc)) from None
    info["cubes"] = len(p.cubes)
    info["digest"] = input_digest(p)
    return p, info


def _config(args) -> SearchConfig:
    budget = args.budget
    if budget is None:
        env = os.environ.get(ENV_BUDGET)
        budget = parse_duration(env) if env else DEFAULT_BUDGET
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get(ENV_THREADS, "1"))
    kw = {"time_budget": budget, "seed": args.seed, "threads": threads}
    if getattr(args, "max_expansions", None):
        kw["max_expansions"] = args.max_expansions
    if getattr(args, "no_parity", False):
        kw["prune_parity"] = False
    return SearchConfig(**kw)


def _search_exit(status: str) -> int:
    return EXIT_BUDGET if status == BUDGET else EXIT_OK


# ---------------------------------------------------------------------------
# Subcommands.  Each returns (RunReport, exit code).

def cmd_validate(args):
    cfg = _config(args)
    p, info = _load_input(args)
    g = skeleton_graph(extract_surface(p))
    s = extract_surface(p)
    euler = len(s.vertices) - len(s.edges) + len(s.faces)
    payload = {"result": "valid", "cubes": len(p.cubes), "euler_characteristic": euler,
               "genus": (2 - euler) // 2, "vertices": len(g)}
    return RunReport("validate", info, cfg.to_dict(), payload), EXIT_OK


def cmd_info(args):
    cfg = _config(args)
    p, info = _load_input(args)
    s = extract_surface(p)
    g = skeleton_graph(s)
    report = parity_report(g)
    cert = hampath_obstruction(g)
    payload = {
        "result": "ok",
        "cubes": len(p.cubes),
        "vertices": len(s.vertices),
        "edges": len(s.edges),
        "faces": len(s.faces),
        "corner_vertices": len(g.corners),
        "flat_vertices": len(g.flats),
        "flats": [list(g.points[v]) for v in g.flats],
        "parity": report.to_dict(),
        "bipartite": True,
        "obstruction": cert.to_dict() if cert else None,
        "dual_tree": is_polycube_tree(p),
    }
    return RunReport("info", info, cfg.to_dict(), payload), EXIT_OK


def _graph_search(args, name, fn):
    cfg = _config(args)
    p, info = _load_input(args)
    g = skeleton_graph(extract_surface(p))
    res = fn(g, cfg)
    d = res.to_dict(g)
    stats = d.pop("stats")
    return RunReport(name, info, cfg.to_dict(), d, stats), _search_exit(res.status)


def cmd_ham_path(args):
    return _graph_search(args, "ham-path", find_hamiltonian_path)


def cmd_ham_cycle(args):
    return _graph_search(args, "ham-cycle", find_hamiltonian_cycle)


def cmd_zipper(args):
    def run(g, cfg):
        try:
            return zipper_path_search(g, cfg, args.strategy)
        except TooManyFlatVertices as exc:
            raise InputError("validation", "TooManyFlatVertices", str(exc)) from None
    report, code = _graph_search(args, "zipper", run)
    report.config["strategy"] = args.strategy
    return report, code


def _write_artifacts(args, s, layout, title) -> list[str]:
    out = []
    if getattr(args, "svg", None):
        write_svg(s, layout, args.svg)
        out.append(str(args.svg))
    if getattr(args, "fold", None):
        write_fold(s, layout, args.fold, title)
        out.append(str(args.fold))
    return out


def _read_cut(path) -> CutTree:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError("io", "IOError", str(exc)) from None
    except json.JSONDecodeError as exc:
        raise InputError("parse", "FormatError", f"{path}: {exc}") from None
    if isinstance(data, dict):
        data = data.get("cut", data.get("edges"))
    try:
        return CutTree.from_pairs((int(u), int(v)) for u, v in data)
    except (TypeError, ValueError):
        raise InputError("parse", "FormatError", "cut must be a list of [u, v] vertex pairs") from None


def cmd_unfold(args):
    cfg = _config(args)
    p, info = _load_input(args)
    s = extract_surface(p)
    cut = _read_cut(args.cut)
    try:
        layout = unfold(s, cut)
    except InvalidCut as exc:
        raise InputError("validation", f"InvalidCut({exc.kind})", exc.detail) from None
    except DevelopmentInconsistent as exc:
        raise InputError("validation", "DevelopmentInconsistent", str(exc)) from None
    payload = {"result": "nonoverlapping" if layout.nonoverlapping else "overlapping",
               "layout": layout.to_dict()}
    arts = _write_artifacts(args, s, layout, p.name or "")
    return RunReport("unfold", info, cfg.to_dict(), payload, artifacts=arts), EXIT_OK


def _net_command(args, name, fn):
    cfg = _config(args)
    p, info = _load_input(args)
    s = extract_surface(p)
    res = fn(s, cfg)
    d = res.to_dict()
    stats = d.pop("stats")
    arts = _write_artifacts(args, s, res.layout, p.name or "") if res.layout else []
    return RunReport(name, info, cfg.to_dict(), d, stats, arts), _search_exit(res.status)


def cmd_search_net(args):
    return _net_command(args, "search-net", edge_unfolding_search)


def cmd_zipper_net(args):
    return _net_command(args, "zipper-net", zipper_unfolding_search)


def cmd_reproduce(args):
    cfg = _config(args)
    k = args.k if args.k is not None else 1
    res = run_claim(args.claim, cfg, k=k)
    arts = []
    for name, (s, layout) in res.artifacts.items():
        arts += _write_artifacts(args, s, layout, name)
    info = {"claim": args.claim}
    if args.claim == "tower":
        info["k"] = k
    d = res.to_dict()
    report = RunReport("reproduce", info, cfg.to_dict(), d, {"elapsed_ms": res.elapsed_ms}, arts)
    if res.holds:
        return report, EXIT_OK
    return report, EXIT_BUDGET if res.budget else EXIT_CLAIM


COMMANDS = {
    "validate": cmd_validate, "info": cmd_info, "ham-path": cmd_ham_path,
    "ham-cycle": cmd_ham_cycle, "zipper": cmd_zipper, "unfold": cmd_unfold,
    "search-net": cmd_search_net, "zipper-net": cmd_zipper_net, "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--budget", type=parse_duration, default=None,
                        help=f"time budget such as 90s, 10m, 2h (env {ENV_BUDGET}; default 600s)")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker processes for net search (env {ENV_THREADS}; default 1)")
    common.add_argument("--max-expansions", type=int, default=None,
                        help="node expansion budget for exact searches")
    common.add_argument("--json", action="store_true", help="print the full report as JSON")
    common.add_argument("--report", type=Path, help="also write the JSON report to this file")

    shape = argparse.ArgumentParser(add_help=False)
    shape.add_argument("--shape", help=f"catalog shape: {', '.join(SHAPES)}")
    shape.add_argument("--input", type=Path, help="polycube JSON file")
    shape.add_argument("--k", type=int, default=None, help="tower height for P44tower")

    files = argparse.ArgumentParser(add_help=False)
    files.add_argument("--svg", type=Path, help="write the net as SVG")
    files.add_argument("--fold", type=Path, help="write the net as FOLD JSON")

    parser = argparse.ArgumentParser(prog="polyunzip", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common, shape], help="check a polycube")
    v.add_argument("file", nargs="?", type=Path, help="polycube JSON file")
    sub.add_parser("info", parents=[common, shape], help="counts, parity and flags")
    for name in ("ham-path", "ham-cycle"):
        sp = sub.add_parser(name, parents=[common, shape], help=f"exact {name} search")
        sp.add_argument("--no-parity", action="store_true",
                        help="switch off the parity certificate and bound")
    z = sub.add_parser("zipper", parents=[common, shape], help="zipper cut path search")
    z.add_argument("--strategy", choices=["FlatSubsets", "DirectDFS"], default="FlatSubsets")
    z.add_argument("--no-parity", action="store_true")
    u = sub.add_parser("unfold", parents=[common, shape, files], help="develop a given cut tree")
    u.add_argument("--cut", required=True, type=Path, help="JSON list of [u, v] vertex pairs")
    sub.add_parser("search-net", parents=[common, shape, files], help="search for an edge unfolding")
    sub.add_parser("zipper-net", parents=[common, shape, files],
                   help="search for a zipper (single path) unfolding")
    r = sub.add_parser("reproduce", parents=[common, files], help="check one result")
    r.add_argument("claim", choices=CLAIMS)
    r.add_argument("--k", type=int, default=None, help="tower height (claim 'tower')")
    return parser


def _summary(report: dict) -> str:
    parts = [f"{report['command']}: {report.get('result')}"]
    for key in ("conclusion", "detail"):
        if report.get(key):
            parts.append(str(report[key]))
    if report.get("command") == "info" and "parity" in report:
        parts.append(f"flat={report['flat_vertices']} imbalance={report['parity']['imbalance']} "
                     f"dual_tree={report['dual_tree']}")
    return " | ".join(parts)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.monotonic()
    try:
        report, code = COMMANDS[args.command](args)
        out = report.to_dict()
    except InputError as exc:
        code = EXIT_INPUT
        out = {"command": args.command, "result": "error",
               "error": {"category": exc.category, "kind": exc.kind, "detail": exc.detail},
               "stats": {}, "artifacts": []}
    except ValueError as exc:
        code = EXIT_INPUT
        out = {"command": args.command, "result": "error",
               "error": {"category": "validation", "kind": type(exc).__name__, "detail": str(exc)},
               "stats": {}, "artifacts": []}
    out["stats"]["elapsed_ms"] = out["stats"].get("elapsed_ms",
                                                  round((time.monotonic() - t0) * 1000, 3))
    out["exit_code"] = code
    out["payload_digest"] = "sha256:" + hashlib.sha256(
        json.dumps(_strip_timing({k: v for k, v in out.items() if k != "stats"}),
                   sort_keys=True).encode()).hexdigest()
    text = json.dumps(out, indent=2, sort_keys=False)
    if getattr(args, "report", None):
        Path(args.report).write_text(text + "\n")
    if args.json:
        print(text)
    else:
        print(_summary(out))
        if "error" in out:
            print(f"error ({out['error']['category']}): {out['error']['kind']}: "
                  f"{out['error']['detail']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
