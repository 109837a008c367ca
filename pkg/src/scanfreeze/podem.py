"""PODEM: deterministic test generation for one stuck-at fault.

Works on the combinational view of a scan design: FF states are assignable
pseudo-inputs, FF D nets are pseudo-outputs, scan-enable is the constant 0
of capture mode. The search assigns only primary inputs and FF states;
implication is a full two-plane (good/faulty) resimulation, which is cheap
at the circuit sizes this toolkit targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .faults import Fault, fault_forcing
from .logic import X
from .netlist import Netlist, PrimitiveKind, levelize
from .scan import ChainMap
from .sim import Pattern, _Engine

DEFAULT_BACKTRACK_LIMIT = 10_000


class PodemStatus(Enum):
    FOUND = "FOUND"
    UNTESTABLE = "UNTESTABLE"
    ABORTED = "ABORTED"


@dataclass
class PodemOutcome:
    status: PodemStatus
    pattern: Pattern | None = None
    backtracks: int = 0


# Value a gate input must take so it does not decide the output on its own.
_NONCONTROLLING = {
    (PrimitiveKind.AND2, "A0"): 1, (PrimitiveKind.AND2, "A1"): 1,
    (PrimitiveKind.NAND2, "A0"): 1, (PrimitiveKind.NAND2, "A1"): 1,
    (PrimitiveKind.OR2, "A0"): 0, (PrimitiveKind.OR2, "A1"): 0,
    (PrimitiveKind.NOR2, "A0"): 0, (PrimitiveKind.NOR2, "A1"): 0,
    (PrimitiveKind.ANDB2, "A0"): 1, (PrimitiveKind.ANDB2, "A1N"): 0,
}

# Does the value objective flip when backtracing through this pin?
_INVERTS = {
    (PrimitiveKind.INV, "A"): True,
    (PrimitiveKind.BUF, "A"): False,
    (PrimitiveKind.AND2, "A0"): False, (PrimitiveKind.AND2, "A1"): False,
    (PrimitiveKind.OR2, "A0"): False, (PrimitiveKind.OR2, "A1"): False,
    (PrimitiveKind.NAND2, "A0"): True, (PrimitiveKind.NAND2, "A1"): True,
    (PrimitiveKind.NOR2, "A0"): True, (PrimitiveKind.NOR2, "A1"): True,
    (PrimitiveKind.ANDB2, "A0"): False, (PrimitiveKind.ANDB2, "A1N"): True,
}


class _CombView:
    """Two-plane simulation of the capture-mode combinational core."""

    def __init__(self, nl: Netlist, fault: Fault):
        net_f, pin_f = fault_forcing(nl, fault)
        self.good = _Engine(nl)
        self.bad = _Engine(nl, net_forces=net_f, pin_forces=pin_f)
        self.nl = nl
        self.fault = fault
        self.assignable = [("pi", p) for p in nl.functional_inputs()] + \
                          [("ff", c.name) for c in nl.ff_cells()]
        self.targets = [("po", po, self.good.ids[net])
                        for po, net in nl.functional_outputs()]
        for ff in self.good.ffs:
            cell, _i, d, _si, _q, _qb, _df = ff
            if d >= 0:
                self.targets.append(("ppo", cell, d))
        if fault.cell and fault.port == "D":
            self.d_forced_cell = fault.cell
        else:
            self.d_forced_cell = None
        # Net whose good value activates the fault.
        if fault.cell:
            self.site_net = nl.cells[fault.cell].pins[fault.port]
        else:
            self.site_net = fault.port
        self.site_id = self.good.ids[self.site_net]
        self.levels = levelize(nl)

    def simulate(self, assign: dict) -> tuple[list[int], list[int]]:
        gv = [X] * self.good.n_nets
        bv = [X] * self.bad.n_nets
        gs = [X] * len(self.good.ffs)
        bs = [X] * len(self.bad.ffs)
        for eng, vals in ((self.good, gv), (self.bad, bv)):
            for nid, v in eng.consts:
                vals[nid] = v
            if self.nl.scan_en is not None:
                vals[eng.pi_ids[self.nl.scan_en]] = 0
        for key, v in assign.items():
            tag, name = key
            if tag == "pi":
                gv[self.good.pi_ids[name]] = v
                bv[self.bad.pi_ids[name]] = v
            else:
                gs[self.good.ff_index[name]] = v
                bs[self.bad.ff_index[name]] = v
        # Net forces on PI nets are not part of the settle pass.
        for nid, v in self.bad.force_by_id.items():
            bv[nid] = v
        self.good.settle(gv, gs)
        self.bad.settle(bv, bs)
        return gv, bv

    def detected(self, gv, bv) -> bool:
        for kind, owner, nid in self.targets:
            g = gv[nid]
            b = self.fault.sa if (kind == "ppo" and owner == self.d_forced_cell) \
                else bv[nid]
            if g != X and b != X and g != b:
                return True
        return False


def podem(netlist: Netlist, fault: Fault, chain_map: ChainMap | None = None,
          backtrack_limit: int = DEFAULT_BACKTRACK_LIMIT) -> PodemOutcome:
    """Search for a capture-mode pattern that detects ``fault``.

    UNTESTABLE is returned only after the implicit decision tree over
    primary inputs and FF states is exhausted; ABORTED when the backtrack
    limit trips first.
    """
    view = _CombView(netlist, fault)
    nl = netlist
    readers = nl.readers()
    assign: dict = {}
    stack: list[list] = []  # [key, value, tried_both]
    backtracks = 0

    target_nets = {nid for _k, _o, nid in view.targets}

    def x_path_exists(net_id: int, gv, bv) -> bool:
        """Forward path to a target through cells whose output is still
        unresolved in either plane (or already carries a discrepancy)."""
        seen = set()
        frontier = [net_id]
        while frontier:
            nid = frontier.pop()
            if nid in target_nets:
                return True
            if nid in seen:
                continue
            seen.add(nid)
            name = view.good.names[nid]
            for r in readers.get(name, ()):
                if r[0] != "cell":
                    continue
                cell = nl.cells[r[1]]
                if cell.kind.is_ff or r[2] not in cell.kind.data_input_pins:
                    continue
                out = cell.output_net()
                if out is None:
                    continue
                oid = view.good.ids[out]
                g, b = gv[oid], bv[oid]
                viable = g == X or b == X or g != b
                if viable or oid in target_nets:
                    frontier.append(oid)
        return False

    def frontier_cells(gv, bv):
        out = []
        for cell in nl.comb_cells():
            onet = cell.output_net()
            if onet is None:
                continue
            oid = view.good.ids[onet]
            if gv[oid] != X and bv[oid] != X:
                continue
            has_d = False
            for port in cell.kind.input_pins:
                net = cell.pins[port]
                if net is None:
                    continue
                nid = view.good.ids[net]
                g, b = gv[nid], bv[nid]
                if view.fault.cell == cell.name and view.fault.port == port:
                    b = view.fault.sa
                if g != X and b != X and g != b:
                    has_d = True
                    break
            if has_d:
                out.append(cell)
        out.sort(key=lambda c: (view.levels[c.name], c.name))
        return out

    def objective(gv, bv):
        """(net id, value) to pursue next, or None when this branch dies."""
        site_g = gv[view.site_id]
        want = 1 - view.fault.sa
        if site_g == X:
            return view.site_id, want
        if site_g != want:
            return None  # activation impossible under current assignment
        for cell in frontier_cells(gv, bv):
            oid = view.good.ids[cell.output_net()]
            if not x_path_exists(oid, gv, bv):
                continue
            for port in cell.kind.input_pins:
                net = cell.pins[port]
                if net is None:
                    continue
                nid = view.good.ids[net]
                if gv[nid] == X:
                    return nid, _NONCONTROLLING[(cell.kind, port)]
        return None

    def backtrace(net_id: int, v: int, gv):
        while True:
            name = view.good.names[net_id]
            cell = nl.driver_cell(name)
            if cell is None:
                if name not in nl.inputs:
                    return None  # undriven net: nothing can justify it
                return ("pi", name), v
            if cell.kind.is_ff:
                if cell.pins["Q"] == name:
                    return ("ff", cell.name), v
                return ("ff", cell.name), 1 - v  # QB
            for port in cell.kind.input_pins:
                net = cell.pins[port]
                if net is None:
                    continue
                nid = view.good.ids[net]
                if gv[nid] == X:
                    if _INVERTS[(cell.kind, port)]:
                        v = 1 - v
                    net_id = nid
                    break
            else:
                raise AssertionError("X output without X input")

    while True:
        gv, bv = view.simulate(assign)
        if view.detected(gv, bv):
            return PodemOutcome(PodemStatus.FOUND,
                                _package(nl, chain_map, assign), backtracks)
        obj = objective(gv, bv)
        traced = backtrace(obj[0], obj[1], gv) if obj is not None else None
        if traced is not None:
            key, v = traced
            assign[key] = v
            stack.append([key, v, False])
            continue
        while stack:
            key, v, tried = stack.pop()
            if not tried:
                backtracks += 1
                if backtracks > backtrack_limit:
                    return PodemOutcome(PodemStatus.ABORTED, None, backtracks)
                assign[key] = 1 - v
                stack.append([key, 1 - v, True])
                break
            del assign[key]
        else:
            return PodemOutcome(PodemStatus.UNTESTABLE, None, backtracks)


def _package(nl: Netlist, chain_map: ChainMap | None, assign: dict) -> Pattern:
    pi = "".join("01X"[assign.get(("pi", p), X)] for p in nl.functional_inputs())
    load = {}
    if chain_map is not None:
        for chain in chain_map.chains:
            load[chain.name] = "".join(
                "01X"[assign.get(("ff", c), X)] for c in chain.cells)
    return Pattern(load=load, pi=pi)
