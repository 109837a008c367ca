"""Batch command-line driver.

Subcommands: check, scan-insert, atpg, sim, rank, freeze, report.
Exit codes: 0 success, 2 usage, 3 parse/validate failure, 4 simulation
mismatch. Machine outputs are JSON with an embedded run manifest; nothing
is written without an explicit flag.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .atpg import generate_patterns, fill_expected
from .bench import ParseError, parse_bench
from .freeze import AreaModel, area, insert_freeze
from .netlist import Netlist, NetlistError, validate
from .power import rank_cells, render_toggle_table, toggle_table
from .scan import ChainMap, Partition, ScanConfig, Stitch, insert_scan
from .scanpat import read_scanpat, write_scanpat
from .sim import ScanRunner, test_clocks
from .vlog import emit_vlog, parse_vlog

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_MISMATCH = 4


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(subcommand: str, inputs: list[str], seed: int, config: dict) -> dict:
    return {
        "tool": "scanfreeze",
        "version": __version__,
        "subcommand": subcommand,
        "inputs": {p: _sha256(p) for p in sorted(inputs)},
        "seed": seed,
        "config": config,
    }


def _write_json(path: str, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _read_netlist(path: str, fmt: str | None) -> Netlist:
    text = Path(path).read_text()
    if fmt is None:
        fmt = "bench" if path.endswith(".bench") else "vlog"
    if fmt == "bench":
        return parse_bench(text, name=Path(path).stem)
    return parse_vlog(text)


def _read_patterns(path: str, netlist: Netlist, chain_map: ChainMap):
    chains, inputs, outputs, patterns = read_scanpat(Path(path).read_text())
    want_chains = [(c.name, len(c.cells)) for c in chain_map.chains]
    if chains != want_chains:
        raise ParseError(f"pattern chains {chains} do not match chain map "
                         f"{want_chains}")
    if inputs != netlist.functional_inputs():
        raise ParseError("pattern INPUTS do not match the netlist")
    if outputs != [po for po, _ in netlist.functional_outputs()]:
        raise ParseError("pattern OUTPUTS do not match the netlist")
    return patterns


def _write_patterns(path: str, netlist: Netlist, chain_map: ChainMap,
                    patterns) -> None:
    Path(path).write_text(write_scanpat(
        [(c.name, len(c.cells)) for c in chain_map.chains],
        netlist.functional_inputs(),
        [po for po, _ in netlist.functional_outputs()],
        patterns))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scanfreeze",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def netlist_arg(p):
        p.add_argument("netlist", help="input netlist (.bench or .v)")
        p.add_argument("--format", choices=["bench", "vlog"], default=None)

    p = sub.add_parser("check", help="parse and validate a netlist")
    netlist_arg(p)

    p = sub.add_parser("scan-insert", help="convert FFs to scan and stitch chains")
    netlist_arg(p)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--stitch", choices=["q", "qb"], default="q")
    p.add_argument("--order", help="file with one FF name per line")
    p.add_argument("--partition", choices=["contiguous", "round-robin"],
                   default="contiguous")
    p.add_argument("--out", required=True, help="output netlist (.v)")
    p.add_argument("--chainmap", required=True, help="output chain map JSON")

    p = sub.add_parser("atpg", help="generate stuck-at test patterns")
    netlist_arg(p)
    p.add_argument("--chainmap", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-budget", type=int, default=32)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output pattern file")
    p.add_argument("--report", required=True, help="output fault report JSON")

    p = sub.add_parser("sim", help="simulate patterns, count toggles")
    netlist_arg(p)
    p.add_argument("--chainmap", required=True)
    p.add_argument("--patterns", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--toggles", required=True, help="output toggle stats JSON")
    p.add_argument("--table", help="output FF-pair toggle table (text)")

    p = sub.add_parser("rank", help="rank power-sensitive scan cells")
    netlist_arg(p)
    p.add_argument("--chainmap", required=True)
    p.add_argument("--patterns", required=True)
    p.add_argument("--top", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output freeze plan JSON")

    p = sub.add_parser("freeze", help="insert a freeze gate at a scan cell")
    netlist_arg(p)
    p.add_argument("--cell", required=True)
    p.add_argument("--value", type=int, choices=[0, 1], required=True)
    p.add_argument("--out", required=True, help="output netlist (.v)")
    p.add_argument("--log", required=True, help="output transform log JSON")
    p.add_argument("--patterns", help="input pattern file to refresh")
    p.add_argument("--chainmap", help="chain map (needed with --repatterns)")
    p.add_argument("--repatterns",
                   help="write patterns with regenerated expected values")

    p = sub.add_parser("report", help="area and test-time report")
    netlist_arg(p)
    p.add_argument("--area", action="store_true")
    p.add_argument("--test-time", action="store_true")
    p.add_argument("--patterns")
    p.add_argument("--out", required=True)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ParseError, NetlistError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"scanfreeze: error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def _dispatch(args) -> int:
    if args.command == "check":
        nl = _read_netlist(args.netlist, args.format)
        diags = validate(nl)
        for d in diags:
            print(str(d), file=sys.stderr)
        return 0 if not any(d.severity == "error" for d in diags) else EXIT_PARSE

    if args.command == "scan-insert":
        nl = _read_netlist(args.netlist, args.format)
        order = None
        if args.order:
            order = [ln.strip() for ln in Path(args.order).read_text().splitlines()
                     if ln.strip()]
        cfg = ScanConfig(
            n_chains=args.chains,
            stitch=Stitch.Q if args.stitch == "q" else Stitch.QB,
            order=order,
            partition=Partition.CONTIGUOUS if args.partition == "contiguous"
            else Partition.ROUND_ROBIN)
        scanned, cmap = insert_scan(nl, cfg)
        Path(args.out).write_text(emit_vlog(scanned))
        doc = json.loads(cmap.to_json())
        doc["manifest"] = _manifest("scan-insert", [args.netlist], 0, {
            "chains": args.chains, "stitch": args.stitch,
            "partition": args.partition})
        _write_json(args.chainmap, doc)
        return 0

    if args.command == "atpg":
        nl = _read_netlist(args.netlist, args.format)
        cmap = ChainMap.from_json(Path(args.chainmap).read_text())
        patterns, report = generate_patterns(nl, cmap, seed=args.seed,
                                             random_budget=args.random_budget,
                                             jobs=args.jobs)
        _write_patterns(args.out, nl, cmap, patterns)
        doc = report.to_doc()
        doc["manifest"] = _manifest("atpg", [args.netlist, args.chainmap],
                                    args.seed, {"random_budget": args.random_budget,
                                                "jobs": args.jobs})
        _write_json(args.report, doc)
        return 0

    if args.command == "sim":
        nl = _read_netlist(args.netlist, args.format)
        cmap = ChainMap.from_json(Path(args.chainmap).read_text())
        patterns = _read_patterns(args.patterns, nl, cmap)
        run = ScanRunner(nl, cmap).run_patterns(patterns)
        doc = run.stats.to_doc()
        doc["manifest"] = _manifest(
            "sim", [args.netlist, args.chainmap, args.patterns], 0,
            {"jobs": args.jobs})
        _write_json(args.toggles, doc)
        if args.table:
            rows = toggle_table(nl, cmap, patterns)
            Path(args.table).write_text(render_toggle_table(nl, rows))
        if run.mismatches:
            for m in run.mismatches:
                print(f"mismatch: pattern {m.pattern} {m.where}: expected "
                      f"{m.expected}, observed {m.observed}", file=sys.stderr)
            return EXIT_MISMATCH
        return 0

    if args.command == "rank":
        nl = _read_netlist(args.netlist, args.format)
        cmap = ChainMap.from_json(Path(args.chainmap).read_text())
        patterns = _read_patterns(args.patterns, nl, cmap)
        plan = rank_cells(nl, cmap, patterns, args.top)
        doc = plan.to_doc()
        doc["manifest"] = _manifest(
            "rank", [args.netlist, args.chainmap, args.patterns], 0,
            {"top": args.top, "jobs": args.jobs})
        _write_json(args.out, doc)
        return 0

    if args.command == "freeze":
        nl = _read_netlist(args.netlist, args.format)
        frozen, log = insert_freeze(nl, args.cell, args.value)
        Path(args.out).write_text(emit_vlog(frozen))
        doc = log.to_doc()
        doc["manifest"] = _manifest("freeze", [args.netlist], 0,
                                    {"cell": args.cell, "value": args.value})
        _write_json(args.log, doc)
        for w in log.warnings:
            print(f"warning: {w}", file=sys.stderr)
        if args.repatterns:
            if not (args.patterns and args.chainmap):
                print("scanfreeze: error: --repatterns needs --patterns and "
                      "--chainmap", file=sys.stderr)
                return EXIT_USAGE
            cmap = ChainMap.from_json(Path(args.chainmap).read_text())
            patterns = _read_patterns(args.patterns, nl, cmap)
            refreshed = fill_expected(frozen, cmap, patterns)
            _write_patterns(args.repatterns, frozen, cmap, refreshed)
        return 0

    if args.command == "report":
        nl = _read_netlist(args.netlist, args.format)
        doc: dict = {}
        if args.area:
            doc["area_ge"] = area(nl, AreaModel())
        if args.test_time:
            if not args.patterns:
                print("scanfreeze: error: --test-time needs --patterns",
                      file=sys.stderr)
                return EXIT_USAGE
            chains, _ins, _outs, patterns = read_scanpat(
                Path(args.patterns).read_text())
            max_len = max((ln for _n, ln in chains), default=0)
            doc["test_clocks"] = test_clocks(len(patterns), max_len)
            doc["n_patterns"] = len(patterns)
            doc["max_chain_len"] = max_len
        inputs = [args.netlist] + ([args.patterns] if args.patterns else [])
        doc["manifest"] = _manifest("report", inputs, 0,
                                    {"area": args.area,
                                     "test_time": args.test_time})
        _write_json(args.out, doc)
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
