"""Stuck-at fault universe: enumeration and equivalence collapsing.

Fault sites are cell pins or primary inputs. Scan plumbing (SI, SE, CLK
and QB-as-scan-path) carries no faults; FF D and Q pins do. Collapsing
applies the classical gate-local equivalences plus stem/branch merging on
fanout-free nets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netlist import Netlist, NetlistError, PrimitiveKind


@dataclass(frozen=True, order=True)
class Fault:
    """A stuck-at fault. ``cell`` is empty for primary-input sites."""

    cell: str
    port: str
    sa: int

    @property
    def site(self) -> str:
        return f"{self.cell}/{self.port}" if self.cell else self.port

    def __str__(self) -> str:
        return f"{self.site} SA{self.sa}"

    @classmethod
    def parse(cls, text: str) -> "Fault":
        site, sa = text.rsplit(" SA", 1)
        cell, _, port = site.rpartition("/")
        return cls(cell, port, int(sa))


def enumerate_faults(netlist: Netlist) -> list[Fault]:
    """Uncollapsed universe: SA0/SA1 on every combinational cell pin, every
    functional PI, and every FF D and Q pin (bound pins only)."""
    faults: list[Fault] = []
    for pi in netlist.functional_inputs():
        faults.append(Fault("", pi, 0))
        faults.append(Fault("", pi, 1))
    for cell in netlist.cells.values():
        if cell.kind.is_ff:
            ports = ["D"] + (["Q"] if cell.pins["Q"] is not None else [])
        else:
            ports = list(cell.kind.pins)
        for port in ports:
            if cell.pins[port] is None:
                continue
            faults.append(Fault(cell.name, port, 0))
            faults.append(Fault(cell.name, port, 1))
    faults.sort(key=lambda f: (f.cell, f.port, f.sa))
    return faults


# Gate-local equivalences: (kind) -> list of (input port, input sa, output sa).
_LOCAL_EQUIV = {
    PrimitiveKind.INV: [("A", 0, 1), ("A", 1, 0)],
    PrimitiveKind.BUF: [("A", 0, 0), ("A", 1, 1)],
    PrimitiveKind.AND2: [("A0", 0, 0), ("A1", 0, 0)],
    PrimitiveKind.NAND2: [("A0", 0, 1), ("A1", 0, 1)],
    PrimitiveKind.OR2: [("A0", 1, 1), ("A1", 1, 1)],
    PrimitiveKind.NOR2: [("A0", 1, 0), ("A1", 1, 0)],
    PrimitiveKind.ANDB2: [("A0", 0, 0), ("A1N", 1, 0)],
}


def collapse_faults(netlist: Netlist, faults: list[Fault]) -> list[Fault]:
    """One application of the classical equivalence rules; the class
    representative is the fault with the lexicographically smallest site."""
    universe = set(faults)
    parent: dict[Fault, Fault] = {f: f for f in faults}

    def find(f: Fault) -> Fault:
        while parent[f] is not f:
            parent[f] = parent[parent[f]]
            f = parent[f]
        return f

    def union(f: Fault, g: Fault) -> None:
        if f in universe and g in universe:
            rf, rg = find(f), find(g)
            if rf is not rg:
                parent[rg] = rf

    for cell in netlist.cells.values():
        for in_port, in_sa, out_sa in _LOCAL_EQUIV.get(cell.kind, ()):
            union(Fault(cell.name, in_port, in_sa),
                  Fault(cell.name, cell.kind.output_pins[0], out_sa))

    # Stem/branch: a net with exactly one reading pin makes the source
    # fault and the branch fault indistinguishable.
    readers = netlist.readers()
    drivers = netlist.drivers()
    for net, rlist in readers.items():
        pins = [r for r in rlist if r[0] == "cell"]
        if len(pins) != 1 or len(rlist) != 1:
            continue
        _tag, rcell, rport = pins[0]
        ds = drivers.get(net, [])
        if len(ds) != 1:
            continue
        d = ds[0]
        if d[0] == "input":
            src = ("", d[1])
        elif d[0] == "cell":
            src = (d[1], d[2])
        else:
            continue
        for sa in (0, 1):
            union(Fault(src[0], src[1], sa), Fault(rcell, rport, sa))

    classes: dict[Fault, list[Fault]] = {}
    for f in faults:
        classes.setdefault(find(f), []).append(f)
    reps = [min(members, key=lambda f: (f.site, f.sa)) for members in classes.values()]
    reps.sort(key=lambda f: (f.cell, f.port, f.sa))
    return reps


def fault_forcing(netlist: Netlist, fault: Fault
                  ) -> tuple[dict[str, int], dict[tuple[str, str], int]]:
    """Translate a fault into simulator hooks: (net forces, pin forces).

    Output-pin and PI faults force the driven net (seen by every reader);
    input-pin faults are private to the reading cell.
    """
    if not fault.cell:
        if fault.port not in netlist.inputs:
            raise NetlistError(f"unknown primary input {fault.port}")
        return {fault.port: fault.sa}, {}
    cell = netlist.cells.get(fault.cell)
    if cell is None:
        raise NetlistError(f"unknown cell {fault.cell}")
    if fault.port not in cell.kind.pins:
        raise NetlistError(f"{fault.cell} has no port {fault.port}")
    net = cell.pins[fault.port]
    if net is None:
        raise NetlistError(f"fault site {fault.site} is unbound")
    if fault.port in cell.kind.output_pins:
        return {net: fault.sa}, {}
    return {}, {(fault.cell, fault.port): fault.sa}
