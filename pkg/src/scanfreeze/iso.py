"""Netlist graph isomorphism.

Two flavors: ``structurally_equal`` demands identical names everywhere
(round-trip checks), while ``isomorphic`` matches cells and internal nets
structurally, anchored at primary port names (scan-insertion vs. golden
netlist comparisons, where instance names differ).
"""

from __future__ import annotations

from .netlist import Netlist, PrimitiveKind

# Gates whose inputs are interchangeable: a pin swap is not a structural
# difference.
_SYMMETRIC = {PrimitiveKind.AND2, PrimitiveKind.OR2,
              PrimitiveKind.NAND2, PrimitiveKind.NOR2}


def structurally_equal(a: Netlist, b: Netlist) -> bool:
    """Same ports (in order), cells, kinds, pin bindings, constants and
    designated nets, by name. Cell iteration order is irrelevant."""
    if a.inputs != b.inputs or a.outputs != b.outputs:
        return False
    if a.constants != b.constants or a.clock != b.clock or a.scan_en != b.scan_en:
        return False
    if set(a.cells) != set(b.cells):
        return False
    for name, ca in a.cells.items():
        cb = b.cells[name]
        if ca.kind is not cb.kind or ca.pins != cb.pins:
            return False
    return True


def isomorphic(a: Netlist, b: Netlist) -> bool:
    return find_isomorphism(a, b) is not None


def find_isomorphism(a: Netlist, b: Netlist) -> dict[str, str] | None:
    """Cell-name mapping a->b witnessing an isomorphism, or None.

    Primary inputs/outputs must carry the same port names on both sides
    (they anchor the match); cell and internal net names are free.
    """
    if set(a.inputs) != set(b.inputs):
        return None
    if {po for po, _ in a.outputs} != {po for po, _ in b.outputs}:
        return None
    if len(a.cells) != len(b.cells):
        return None

    sig_a = _refine(a)
    sig_b = _refine(b)
    by_sig_b: dict[int, list[str]] = {}
    for cell, s in sig_b.items():
        by_sig_b.setdefault(s, []).append(cell)
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return None

    # Backtracking over cells, rarest signature first, keeping the induced
    # net correspondence consistent.
    order = sorted(a.cells, key=lambda c: (len(by_sig_b.get(sig_a[c], ())), c))
    cell_map: dict[str, str] = {}
    net_map: dict[str, str] = {}
    net_map_rev: dict[str, str] = {}

    def bind_net(na: str | None, nb: str | None) -> bool:
        if na is None or nb is None:
            return na is None and nb is None
        if na in net_map:
            return net_map[na] == nb
        if nb in net_map_rev:
            return False
        net_map[na] = nb
        net_map_rev[nb] = na
        return True

    def unbind_nets(bound: list[str]) -> None:
        for na in bound:
            nb = net_map.pop(na)
            net_map_rev.pop(nb)

    # Anchor PI nets and PO-read nets up front.
    for pi in a.inputs:
        if not bind_net(pi, pi):
            return None
    po_net_a = {po: net for po, net in a.outputs}
    po_net_b = {po: net for po, net in b.outputs}
    for po in po_net_a:
        if not bind_net(po_net_a[po], po_net_b[po]):
            return None
    for net, val in a.constants.items():
        candidates = [n for n, v in b.constants.items() if v == val]
        if len(candidates) == 1:
            if not bind_net(net, candidates[0]):
                return None

    used_b: set[str] = set()

    def try_pins(ca, cb, port_pairs) -> list[str] | None:
        bound: list[str] = []
        for pa, pb in port_pairs:
            na, nb = ca.pins[pa], cb.pins[pb]
            if na is not None and na not in net_map and nb is not None \
                    and nb not in net_map_rev:
                net_map[na] = nb
                net_map_rev[nb] = na
                bound.append(na)
            elif not (na is None and nb is None
                      or na is not None and net_map.get(na) == nb):
                unbind_nets(bound)
                return None
        return bound

    def place(idx: int) -> bool:
        if idx == len(order):
            return True
        ca = a.cells[order[idx]]
        kind = ca.kind
        ins = kind.input_pins
        pinmaps = [tuple(zip(kind.pins, kind.pins))]
        if kind in _SYMMETRIC:
            swapped = list(zip(ins, reversed(ins))) + \
                [(p, p) for p in kind.output_pins]
            pinmaps.append(tuple(swapped))
        for name_b in by_sig_b.get(sig_a[ca.name], ()):
            if name_b in used_b:
                continue
            cb = b.cells[name_b]
            if cb.kind is not kind:
                continue
            for pairs in pinmaps:
                bound = try_pins(ca, cb, pairs)
                if bound is None:
                    continue
                used_b.add(name_b)
                cell_map[ca.name] = name_b
                if place(idx + 1):
                    return True
                used_b.discard(name_b)
                del cell_map[ca.name]
                unbind_nets(bound)
        return False

    return dict(cell_map) if place(0) else None


def _refine(nl: Netlist) -> dict[str, int]:
    """Weisfeiler-Lehman style signatures for cells, anchored at port names."""
    readers = nl.readers()
    drivers = nl.drivers()

    def pin_label(cell_name: str, port: str) -> str:
        # Symmetric gate inputs are indistinguishable.
        kind = nl.cells[cell_name].kind
        return "A*" if kind in _SYMMETRIC and port in kind.input_pins else port

    def net_base(net: str) -> tuple:
        ds = drivers.get(net, [])
        d = ds[0] if ds else None
        if d and d[0] == "input":
            src: tuple = ("PI", d[1])
        elif d and d[0] == "const":
            src = ("CONST", d[1])
        else:
            src = ("CELL",)
        sinks = tuple(sorted(
            ("PO", r[1]) if r[0] == "output" else ("pin", pin_label(r[1], r[2]))
            for r in readers.get(net, ())))
        return (src, sinks)

    net_sig = {n: hash(net_base(n)) for n in nl.net_names()}
    cell_sig = {c.name: hash(c.kind.value) for c in nl.cells.values()}

    for _ in range(max(4, len(nl.cells))):
        new_cell = {}
        for c in nl.cells.values():
            in_part = tuple(net_sig[c.pins[p]] if c.pins[p] is not None else 0
                            for p in c.kind.input_pins)
            if c.kind in _SYMMETRIC:
                in_part = tuple(sorted(in_part))
            out_part = tuple(net_sig[c.pins[p]] if c.pins[p] is not None else 0
                             for p in c.kind.output_pins)
            new_cell[c.name] = hash((c.kind.value, in_part, out_part))
        new_net = {}
        for n in nl.net_names():
            ds = drivers.get(n, [])
            d = ds[0] if ds else None
            if d and d[0] == "cell":
                src = ("CELL", new_cell[d[1]], d[2])
            else:
                src = net_base(n)[0]
            sinks = tuple(sorted(
                ("PO", r[1]) if r[0] == "output"
                else ("pin", new_cell[r[1]], pin_label(r[1], r[2]))
                for r in readers.get(n, ())))
            new_net[n] = hash((src, sinks))
        if new_cell == cell_sig and new_net == net_sig:
            break
        cell_sig, net_sig = new_cell, new_net
    return cell_sig
