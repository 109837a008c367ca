"""Freeze-gate insertion and the gate-equivalent area model.

Freezing to 0 inserts a single AND-with-inverted-input gate (A0 = the scan
cell's Q, A1N = scan-enable): during shifting its output is a constant 0,
in functional mode it is transparent. Freezing to 1 uses an OR gate with
scan-enable on the second input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .netlist import Netlist, NetlistError, PrimitiveKind


DEFAULT_AREA_WEIGHTS = {
    PrimitiveKind.INV: 0.5,
    PrimitiveKind.BUF: 0.5,
    PrimitiveKind.AND2: 1.5,
    PrimitiveKind.OR2: 1.5,
    PrimitiveKind.ANDB2: 1.5,
    PrimitiveKind.NAND2: 1.0,
    PrimitiveKind.NOR2: 1.0,
    PrimitiveKind.DFF: 4.0,
    PrimitiveKind.SFF: 6.0,
}


@dataclass
class AreaModel:
    weights: dict[PrimitiveKind, float] = field(
        default_factory=lambda: dict(DEFAULT_AREA_WEIGHTS))


@dataclass
class FreezeLog:
    cell: str
    value: int
    gate: str
    new_net: str
    rewired: list[tuple[str, str]]  # (reader cell or PO, pin)
    warnings: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {"cell": self.cell, "value": self.value, "gate": self.gate,
                "new_net": self.new_net,
                "rewired": [{"reader": r, "pin": p} for r, p in self.rewired],
                "warnings": self.warnings}


def insert_freeze(netlist: Netlist, cell: str, value: int
                  ) -> tuple[Netlist, FreezeLog]:
    """Drive all functional readers of ``cell``'s Q from a freeze gate that
    holds ``value`` while scan-enable is high. Scan-path connections (SI
    links, scan-out taps) are untouched."""
    src = netlist.cells.get(cell)
    if src is None or src.kind is not PrimitiveKind.SFF:
        raise NetlistError(f"{cell} is not a scan cell")
    if value not in (0, 1):
        raise NetlistError("freeze value must be 0 or 1")
    if netlist.scan_en is None:
        raise NetlistError("netlist has no scan-enable")
    gate_name = f"{cell}_frzgate"
    if gate_name in netlist.cells:
        raise NetlistError(f"{cell} is already frozen")

    out = netlist.copy()
    q_net = out.cells[cell].pins["Q"]
    if q_net is None:
        q_net = f"{cell}_q"
        out.cells[cell].pins["Q"] = q_net
        out.invalidate()
    warnings: list[str] = []
    rewired: list[tuple[str, str]] = []
    scan_outs = set(out.scan_out_ports())

    readers = []
    if q_net is not None:
        for r in out.readers().get(q_net, ()):
            if r[0] == "cell":
                rcell = out.cells[r[1]]
                if r[2] == "SI" or r[2] not in rcell.kind.data_input_pins:
                    continue
                readers.append(("cell", r[1], r[2]))
            elif r[0] == "output" and r[1] not in scan_outs:
                readers.append(("output", r[1], ""))
    if not readers:
        warnings.append(f"{cell}.Q has no functional readers; freeze gate "
                        "added but drives nothing")

    new_net = f"{cell}_frz"
    taken = set(out.net_names())
    k = 0
    while new_net in taken:
        k += 1
        new_net = f"{cell}_frz{k}"
    if value == 0:
        out.add_cell(gate_name, PrimitiveKind.ANDB2,
                     {"A0": q_net, "A1N": out.scan_en, "Y": new_net})
    else:
        out.add_cell(gate_name, PrimitiveKind.OR2,
                     {"A0": q_net, "A1": out.scan_en, "Y": new_net})

    for tag, name, pin in readers:
        if tag == "cell":
            out.cells[name].pins[pin] = new_net
            rewired.append((name, pin))
        else:
            out.outputs = [(po, new_net if po == name else net)
                           for po, net in out.outputs]
            rewired.append((name, "PO"))
    out.invalidate()
    log = FreezeLog(cell, value, gate_name, new_net, rewired, warnings)
    return out, log


def area(netlist: Netlist, model: AreaModel | None = None) -> float:
    """Total gate-equivalents under the weight model."""
    model = model or AreaModel()
    total = 0.0
    for c in netlist.cells.values():
        w = model.weights.get(c.kind)
        if w is None:
            raise NetlistError(f"area model has no weight for {c.kind.value}")
        total += w
    return total
