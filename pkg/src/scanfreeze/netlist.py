"""Gate-level netlist intermediate representation and structural analyses.

The IR is a flat graph of primitive cells connected by named scalar nets.
Netlists are treated as immutable once built: every analysis here is pure,
and transformation passes (scan insertion, freeze gates) work on a copy.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum


class NetlistError(Exception):
    """Structural problem that makes a netlist unusable for an operation."""


class PrimitiveKind(str, Enum):
    INV = "INV"
    BUF = "BUF"
    AND2 = "AND2"
    OR2 = "OR2"
    NAND2 = "NAND2"
    NOR2 = "NOR2"
    ANDB2 = "ANDB2"  # Y = A0 AND (NOT A1N); realizes the freeze-to-0 gate
    DFF = "DFF"
    SFF = "SFF"

    @property
    def input_pins(self) -> tuple[str, ...]:
        return _INPUT_PINS[self]

    @property
    def output_pins(self) -> tuple[str, ...]:
        return _OUTPUT_PINS[self]

    @property
    def pins(self) -> tuple[str, ...]:
        return self.input_pins + self.output_pins

    @property
    def is_ff(self) -> bool:
        return self in (PrimitiveKind.DFF, PrimitiveKind.SFF)

    @property
    def data_input_pins(self) -> tuple[str, ...]:
        """Input pins that carry logic values (CLK is bookkeeping only)."""
        return tuple(p for p in self.input_pins if p != "CLK")


_INPUT_PINS = {
    PrimitiveKind.INV: ("A",),
    PrimitiveKind.BUF: ("A",),
    PrimitiveKind.AND2: ("A0", "A1"),
    PrimitiveKind.OR2: ("A0", "A1"),
    PrimitiveKind.NAND2: ("A0", "A1"),
    PrimitiveKind.NOR2: ("A0", "A1"),
    PrimitiveKind.ANDB2: ("A0", "A1N"),
    PrimitiveKind.DFF: ("D", "CLK"),
    PrimitiveKind.SFF: ("D", "SI", "SE", "CLK"),
}

_OUTPUT_PINS = {
    PrimitiveKind.INV: ("Y",),
    PrimitiveKind.BUF: ("Y",),
    PrimitiveKind.AND2: ("Y",),
    PrimitiveKind.OR2: ("Y",),
    PrimitiveKind.NAND2: ("Y",),
    PrimitiveKind.NOR2: ("Y",),
    PrimitiveKind.ANDB2: ("Y",),
    PrimitiveKind.DFF: ("Q", "QB"),
    PrimitiveKind.SFF: ("Q", "QB"),
}

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def canonical_name(raw: str) -> str:
    """Normalize an identifier to the bracket-free canonical form.

    Escaped names lose their backslash and bit selects become suffixes:
    ``\\Sdummy [1]`` -> ``Sdummy_1_``.
    """
    name = raw.strip()
    if name.startswith("\\"):
        name = name[1:].strip()
    name = re.sub(r"\s*\[\s*(\d+)\s*\]$", r"_\1_", name)
    if not _NAME_RE.match(name):
        raise NetlistError(f"invalid identifier: {raw!r}")
    return name


@dataclass
class Cell:
    """One primitive instance. ``pins`` maps every port of the kind to a net
    name; FF output ports may be left unbound (None)."""

    name: str
    kind: PrimitiveKind
    pins: dict[str, str | None]

    def net(self, port: str) -> str | None:
        return self.pins[port]

    def output_net(self) -> str | None:
        """Net of the single output (combinational kinds only)."""
        return self.pins[self.kind.output_pins[0]]


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.severity}[{self.code}]: {self.message}"


@dataclass(frozen=True)
class Net:
    """Materialized view of one net: its unique driver and its readers.

    driver is ("input", name), ("const", value) or ("cell", cell, port);
    readers are ("cell", cell, port) or ("output", port).
    """

    name: str
    driver: tuple | None
    readers: tuple


class Netlist:
    """A named circuit: ordered ports, cells, constants, designated nets.

    Primary outputs are (port, net) pairs; a port normally reads the net of
    the same name, but may alias another net (Verilog ``assign``).
    """

    def __init__(self, name: str):
        self.name = name
        self.inputs: list[str] = []
        self.outputs: list[tuple[str, str]] = []
        self.cells: dict[str, Cell] = {}
        self.constants: dict[str, int] = {}
        self.clock: str | None = None
        self.scan_en: str | None = None
        self._index: _Index | None = None

    # -- construction -----------------------------------------------------

    def add_input(self, name: str) -> None:
        self._index = None
        self.inputs.append(name)

    def add_output(self, port: str, net: str | None = None) -> None:
        self._index = None
        self.outputs.append((port, net if net is not None else port))

    def add_cell(self, name: str, kind: PrimitiveKind, pins: dict[str, str | None]) -> Cell:
        if name in self.cells:
            raise NetlistError(f"duplicate cell name: {name}")
        full = {}
        for port in kind.pins:
            if port in pins:
                full[port] = pins[port]
            elif port in kind.output_pins and kind.is_ff:
                full[port] = None
            else:
                raise NetlistError(f"cell {name}: port {port} not bound")
        extra = set(pins) - set(kind.pins)
        if extra:
            raise NetlistError(f"cell {name}: unknown ports {sorted(extra)}")
        cell = Cell(name, kind, full)
        self.cells[name] = cell
        self._index = None
        return cell

    def add_constant(self, net: str, value: int) -> None:
        self._index = None
        self.constants[net] = value

    def copy(self) -> "Netlist":
        out = Netlist(self.name)
        out.inputs = list(self.inputs)
        out.outputs = list(self.outputs)
        out.cells = {c.name: Cell(c.name, c.kind, dict(c.pins)) for c in self.cells.values()}
        out.constants = dict(self.constants)
        out.clock = self.clock
        out.scan_en = self.scan_en
        return out

    def invalidate(self) -> None:
        """Drop cached analyses after in-place edits (transform passes)."""
        self._index = None

    # -- derived views ----------------------------------------------------

    def _indexed(self) -> "_Index":
        if self._index is None:
            self._index = _Index(self)
        return self._index

    def net_names(self) -> list[str]:
        """All referenced nets, in deterministic first-seen order."""
        return list(self._indexed().nets)

    def drivers(self) -> dict[str, list[tuple]]:
        return self._indexed().drivers

    def readers(self) -> dict[str, list[tuple]]:
        return self._indexed().readers

    def nets(self) -> dict[str, Net]:
        idx = self._indexed()
        out = {}
        for n in idx.nets:
            ds = idx.drivers.get(n, [])
            out[n] = Net(n, ds[0] if ds else None, tuple(idx.readers.get(n, ())))
        return out

    def driver_cell(self, net: str) -> Cell | None:
        """The cell driving ``net``, or None for PI/constant/undriven."""
        ds = self.drivers().get(net, [])
        for d in ds:
            if d[0] == "cell":
                return self.cells[d[1]]
        return None

    def ff_cells(self) -> list[Cell]:
        return [c for c in self.cells.values() if c.kind.is_ff]

    def comb_cells(self) -> list[Cell]:
        return [c for c in self.cells.values() if not c.kind.is_ff]

    def scan_in_ports(self) -> list[str]:
        return sorted((p for p in self.inputs if re.fullmatch(r"scan_in\d+", p)),
                      key=lambda p: int(p[7:]))

    def scan_out_ports(self) -> list[str]:
        return sorted((p for p, _ in self.outputs if re.fullmatch(r"scan_out\d+", p)),
                      key=lambda p: int(p[8:]))

    def functional_inputs(self) -> list[str]:
        """Primary inputs excluding the clock and scan plumbing."""
        skip = {self.clock, self.scan_en} | set(self.scan_in_ports())
        return [p for p in self.inputs if p not in skip]

    def functional_outputs(self) -> list[tuple[str, str]]:
        skip = set(self.scan_out_ports())
        return [(p, n) for p, n in self.outputs if p not in skip]

    def is_scan_inserted(self) -> bool:
        return self.scan_en is not None and any(
            c.kind is PrimitiveKind.SFF for c in self.cells.values())

    def __repr__(self) -> str:
        return (f"Netlist({self.name!r}, {len(self.inputs)} PI, "
                f"{len(self.outputs)} PO, {len(self.cells)} cells)")


class _Index:
    """Net name ordering plus driver/reader maps, derived once per netlist."""

    def __init__(self, nl: Netlist):
        nets: dict[str, None] = {}
        drivers: dict[str, list[tuple]] = {}
        readers: dict[str, list[tuple]] = {}

        def see(net: str) -> None:
            nets.setdefault(net, None)

        for pi in nl.inputs:
            see(pi)
            drivers.setdefault(pi, []).append(("input", pi))
        for net, value in nl.constants.items():
            see(net)
            drivers.setdefault(net, []).append(("const", value))
        for cell in nl.cells.values():
            for port in cell.kind.input_pins:
                net = cell.pins[port]
                if net is not None:
                    see(net)
                    readers.setdefault(net, []).append(("cell", cell.name, port))
            for port in cell.kind.output_pins:
                net = cell.pins[port]
                if net is not None:
                    see(net)
                    drivers.setdefault(net, []).append(("cell", cell.name, port))
        for port, net in nl.outputs:
            see(net)
            readers.setdefault(net, []).append(("output", port))

        self.nets = nets
        self.drivers = drivers
        self.readers = readers


# -- analyses --------------------------------------------------------------


def validate(netlist: Netlist) -> list[Diagnostic]:
    """Check all structural invariants; one diagnostic per violation.

    Returns an empty list exactly when the netlist is well formed. Floating
    nets (driven but unread, or vice versa never happens post-parse) are
    reported at warning severity.
    """
    diags: list[Diagnostic] = []
    seen_inputs: set[str] = set()
    for pi in netlist.inputs:
        if pi in seen_inputs:
            diags.append(Diagnostic("duplicate-name", f"primary input {pi} declared twice"))
        seen_inputs.add(pi)
    seen_outputs: set[str] = set()
    for po, _net in netlist.outputs:
        if po in seen_outputs:
            diags.append(Diagnostic("duplicate-name", f"primary output {po} declared twice"))
        seen_outputs.add(po)

    drivers = netlist.drivers()
    readers = netlist.readers()

    for cell in netlist.cells.values():
        for port in cell.kind.input_pins:
            if cell.pins[port] is None:
                diags.append(Diagnostic("unbound-pin", f"{cell.name}.{port} is unbound"))
        if not cell.kind.is_ff and cell.output_net() is None:
            diags.append(Diagnostic("unbound-pin", f"{cell.name}.Y is unbound"))

    for net in netlist.net_names():
        ds = drivers.get(net, [])
        if len(ds) > 1:
            who = ", ".join(d[1] if d[0] != "const" else f"const {d[1]}" for d in ds)
            diags.append(Diagnostic("multi-driver", f"net {net} driven by: {who}"))
        elif not ds and readers.get(net):
            diags.append(Diagnostic("undriven-net", f"net {net} has readers but no driver"))
        elif ds and not readers.get(net):
            src = ds[0]
            if src[0] == "cell" and netlist.cells[src[1]].kind.is_ff:
                continue  # dangling FF outputs are fine
            diags.append(Diagnostic("floating-net", f"net {net} drives nothing",
                                    severity="warning"))

    try:
        levelize(netlist)
    except NetlistError as exc:
        diags.append(Diagnostic("comb-cycle", str(exc)))
    return diags


def levelize(netlist: Netlist) -> dict[str, int]:
    """Topological levels: FF cells at 0, combinational cells at
    1 + max level of their input drivers (PIs/constants count as level 0)."""
    levels: dict[str, int] = {}
    for cell in netlist.cells.values():
        if cell.kind.is_ff:
            levels[cell.name] = 0

    driver_of: dict[str, str] = {}
    for net, ds in netlist.drivers().items():
        for d in ds:
            if d[0] == "cell" and not netlist.cells[d[1]].kind.is_ff:
                driver_of[net] = d[1]

    visiting: set[str] = set()

    def level_of(cell: Cell) -> int:
        if cell.name in levels:
            return levels[cell.name]
        if cell.name in visiting:
            raise NetlistError(f"combinational cycle through {cell.name}")
        visiting.add(cell.name)
        best = 0
        for port in cell.kind.data_input_pins:
            net = cell.pins[port]
            if net is None:
                continue
            drv = driver_of.get(net)
            if drv is not None:
                best = max(best, level_of(netlist.cells[drv]))
        visiting.discard(cell.name)
        levels[cell.name] = best + 1
        return best + 1

    for cell in netlist.comb_cells():
        level_of(cell)
    return levels


def fanout_cone(netlist: Netlist, net: str) -> set[str]:
    """Combinational cells reachable forward from ``net`` without passing
    through a flip-flop. The driver of ``net`` itself is not included."""
    if net not in netlist.drivers() and net not in netlist.readers():
        raise NetlistError(f"unknown net: {net}")
    readers = netlist.readers()
    cone: set[str] = set()
    frontier = [net]
    while frontier:
        n = frontier.pop()
        for r in readers.get(n, ()):
            if r[0] != "cell":
                continue
            cell = netlist.cells[r[1]]
            if cell.kind.is_ff or cell.name in cone:
                continue
            cone.add(cell.name)
            for port in cell.kind.output_pins:
                out = cell.pins[port]
                if out is not None:
                    frontier.append(out)
    return cone


def fanin_cone(netlist: Netlist, net: str) -> set[str]:
    """Combinational cells reachable backward from ``net`` (including its
    driver) without passing through a flip-flop."""
    if net not in netlist.drivers() and net not in netlist.readers():
        raise NetlistError(f"unknown net: {net}")
    cone: set[str] = set()
    frontier = [net]
    while frontier:
        n = frontier.pop()
        cell = netlist.driver_cell(n)
        if cell is None or cell.kind.is_ff or cell.name in cone:
            continue
        cone.add(cell.name)
        for port in cell.kind.data_input_pins:
            src = cell.pins[port]
            if src is not None:
                frontier.append(src)
    return cone
