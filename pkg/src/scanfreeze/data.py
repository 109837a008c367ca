"""Bundled benchmark fixtures."""

from __future__ import annotations

from importlib import resources

from .bench import parse_bench
from .netlist import Netlist
from .vlog import parse_vlog


def _read(name: str) -> str:
    return resources.files("scanfreeze").joinpath("data", name).read_text()


def s27_bench_text() -> str:
    return _read("s27.bench")


def s27_scan_vlog_text() -> str:
    return _read("s27_scan_qb.v")


def load_s27() -> Netlist:
    """The plain s27 benchmark (4 PIs, 1 PO, 3 DFFs, 10 gates)."""
    return parse_bench(s27_bench_text(), name="s27")


def load_s27_scan() -> Netlist:
    """The golden scan-inserted s27: one chain, QB-stitched."""
    return parse_vlog(s27_scan_vlog_text())
