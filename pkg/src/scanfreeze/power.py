"""Shift-power analysis: per-FF-pair toggle attribution, per-cell freeze
sensitivity, and ranking of power-sensitive scan cells."""

from __future__ import annotations

from dataclasses import dataclass, field

from .freeze import insert_freeze
from .netlist import Netlist, NetlistError, PrimitiveKind, fanin_cone, fanout_cone, levelize
from .scan import ChainMap
from .sim import Pattern, ScanRunner


@dataclass
class PairToggleRow:
    src_ff: str
    dst_ff: str
    gates: list[str]  # combinational cells on src->dst paths, level order
    toggles: int


@dataclass
class FreezeEntry:
    cell: str
    value: int
    score: int


@dataclass
class FreezePlan:
    entries: list[FreezeEntry] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {"entries": [{"cell": e.cell, "value": e.value, "score": e.score}
                            for e in self.entries]}


def path_gates(netlist: Netlist, src_ff: str, dst_ff: str) -> list[str]:
    """Combinational cells lying on paths from src's Q to dst's D:
    fanout cone of Q intersected with fanin cone of D, in level order."""
    for name in (src_ff, dst_ff):
        cell = netlist.cells.get(name)
        if cell is None or not cell.kind.is_ff:
            raise NetlistError(f"{name} is not a flip-flop cell")
    q_net = netlist.cells[src_ff].pins["Q"]
    d_net = netlist.cells[dst_ff].pins["D"]
    if q_net is None or d_net is None:
        return []
    gates = fanout_cone(netlist, q_net) & fanin_cone(netlist, d_net)
    levels = levelize(netlist)
    return sorted(gates, key=lambda c: (levels[c], c))


def toggle_table(netlist: Netlist, chain_map: ChainMap,
                 patterns: list[Pattern]) -> list[PairToggleRow]:
    """One row per ordered FF pair with a nonempty path gate set; a net
    shared by several pairs counts in each row (diagnostic view, not a
    partition)."""
    if patterns:
        stats = ScanRunner(netlist, chain_map).run_patterns(patterns).stats
        shift = stats.shift
    else:
        shift = {}
    ffs = [c.name for c in netlist.ff_cells()]
    rows = []
    for src in ffs:
        for dst in ffs:
            gates = path_gates(netlist, src, dst)
            if not gates:
                continue
            total = sum(shift.get(netlist.cells[g].output_net(), 0)
                        for g in gates)
            rows.append(PairToggleRow(src, dst, gates, total))
    rows.sort(key=lambda r: (-r.toggles, r.src_ff, r.dst_ff))
    return rows


def render_toggle_table(netlist: Netlist, rows: list[PairToggleRow]) -> str:
    """Aligned text table: flip-flop pair, gate output nets involved,
    shift-toggle count."""
    body = []
    for r in rows:
        nets = ", ".join(netlist.cells[g].output_net() for g in r.gates)
        body.append((f"{r.src_ff} - {r.dst_ff}", nets, str(r.toggles)))
    headers = ("Flip Flops", "Gates Involved", "Toggling")
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def total_shift_toggles(netlist: Netlist, chain_map: ChainMap,
                        patterns: list[Pattern]) -> int:
    if not patterns:
        return 0
    return ScanRunner(netlist, chain_map).run_patterns(patterns).stats.total_shift


def sensitivity(netlist: Netlist, chain_map: ChainMap, patterns: list[Pattern],
                cell: str, value: int) -> int:
    """Shift toggles saved by freezing ``cell`` to ``value``: baseline minus
    the count on the freeze-inserted netlist, same patterns. May be
    negative; reported as-is."""
    c = netlist.cells.get(cell)
    if c is None or c.kind is not PrimitiveKind.SFF:
        raise NetlistError(f"{cell} is not a scan cell")
    if not patterns:
        return 0
    base = total_shift_toggles(netlist, chain_map, patterns)
    frozen, _log = insert_freeze(netlist, cell, value)
    return base - total_shift_toggles(frozen, chain_map, patterns)


def sensitivity_virtual(netlist: Netlist, chain_map: ChainMap,
                        patterns: list[Pattern], cell: str, value: int) -> int:
    """Same quantity, measured without rewriting the netlist: the simulator
    virtualizes the freeze gate. Cross-checks ``sensitivity``."""
    c = netlist.cells.get(cell)
    if c is None or c.kind is not PrimitiveKind.SFF:
        raise NetlistError(f"{cell} is not a scan cell")
    if not patterns:
        return 0
    base = total_shift_toggles(netlist, chain_map, patterns)
    frozen_run = ScanRunner(netlist, chain_map,
                            virtual_freezes=((cell, value),)).run_patterns(patterns)
    return base - frozen_run.stats.total_shift


def rank_cells(netlist: Netlist, chain_map: ChainMap, patterns: list[Pattern],
               top_k: int) -> FreezePlan:
    """Evaluate both freeze values for every scan cell, keep the better one
    per cell, and return the top_k by descending score (ties: cell name)."""
    if top_k < 1:
        raise NetlistError("top_k must be >= 1")
    entries = []
    for c in netlist.cells.values():
        if c.kind is not PrimitiveKind.SFF:
            continue
        s0 = sensitivity(netlist, chain_map, patterns, c.name, 0)
        s1 = sensitivity(netlist, chain_map, patterns, c.name, 1)
        value, score = (0, s0) if s0 >= s1 else (1, s1)
        entries.append(FreezeEntry(c.name, value, score))
    entries.sort(key=lambda e: (-e.score, e.cell))
    return FreezePlan(entries[:top_k])


def structural_score(netlist: Netlist, cell: str) -> int:
    """Simulation-free proxy: size of the Q net's combinational fanout cone."""
    c = netlist.cells.get(cell)
    if c is None or not c.kind.is_ff:
        raise NetlistError(f"{cell} is not a flip-flop cell")
    q_net = c.pins["Q"]
    if q_net is None:
        return 0
    return len(fanout_cone(netlist, q_net))
