"""Stuck-at fault simulation.

Two routes that must agree exactly:

* ``fault_simulate_serial`` is the reference oracle: rerun the whole
  pattern sequence once per fault with the fault forced, and mark it
  detected on the first definite PO or unload disagreement with the
  fault-free run.
* ``fault_simulate`` packs one fault machine per bit of a pair of wide
  integers (hi/lo planes of the 3-valued encoding) and evaluates all
  machines of a chunk in a single protocol pass.

Detection means: fault-free and faulty values both definite and different
at a functional PO measure or an unload position.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .faults import Fault, fault_forcing
from .logic import X
from .netlist import Netlist, levelize
from .scan import ChainMap, Stitch
from .sim import Pattern, ScanRunner, _Engine, compensate_load, str_to_bits

_INV, _BUF, _AND, _OR, _NAND, _NOR, _ANDB = range(7)


def fault_simulate_serial(netlist: Netlist, chain_map: ChainMap,
                          patterns: list[Pattern],
                          faults: list[Fault]) -> list[Fault]:
    """Reference oracle: one faulted rerun per fault, early exit on the
    first detecting observation."""
    if not patterns:
        return []
    baseline = ScanRunner(netlist, chain_map).run_patterns(patterns)
    good = baseline.results
    detected = []
    for fault in faults:
        net_f, pin_f = fault_forcing(netlist, fault)
        runner = ScanRunner(netlist, chain_map,
                            net_forces=net_f, pin_forces=pin_f)
        if _serial_detects(runner, patterns, good):
            detected.append(fault)
    return detected


def _serial_detects(runner: ScanRunner, patterns, good) -> bool:
    def differs(a: str, b: str) -> bool:
        return any(x in "01" and y in "01" and x != y for x, y in zip(a, b))

    for k, pat in enumerate(patterns):
        unload = runner._shift_phase(pat.load)
        if k > 0:
            for chain, bits in unload.items():
                if differs(bits, good[k - 1].observed_unload[chain]):
                    return True
        po = runner.apply_pi(pat.pi)
        if differs(po, good[k].observed_po):
            return True
        runner.capture()
    flush = runner._shift_phase({c.name: "X" * len(c.cells)
                                 for c in runner.cmap.chains})
    for chain, bits in flush.items():
        if differs(bits, good[-1].observed_unload[chain]):
            return True
    return False


def fault_simulate(netlist: Netlist, chain_map: ChainMap,
                   patterns: list[Pattern], faults: list[Fault],
                   jobs: int = 1, chunk: int = 256) -> list[Fault]:
    """Accelerated bit-parallel fault simulation; equals the serial oracle
    on every input. Deterministic regardless of ``jobs``."""
    if not patterns or not faults:
        return []
    chunks = [faults[i:i + chunk] for i in range(0, len(faults), chunk)]

    def run(chunk_faults: list[Fault]) -> list[Fault]:
        sim = _PlaneSim(netlist, chain_map, chunk_faults)
        mask = sim.run(patterns)
        return [f for m, f in enumerate(chunk_faults, start=1) if mask >> m & 1]

    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    return [f for part in parts for f in part]


class _PlaneSim:
    """All fault machines of one chunk simulated at once on hi/lo planes.

    Bit m of a plane belongs to machine m; machine 0 runs fault-free.
    Encoding per machine: (hi, lo) = (1,0) one, (0,1) zero, (1,1) X.
    """

    def __init__(self, nl: Netlist, chain_map: ChainMap, faults: list[Fault]):
        self.e = _Engine(nl, chain_map)
        self.nl = nl
        self.cmap = chain_map
        self.width = len(faults) + 1
        self.all = (1 << self.width) - 1

        net_masks: dict[int, list[int]] = {}  # id -> [m0, m1]
        pin_masks: dict[tuple[str, str], list[int]] = {}
        for m, fault in enumerate(faults, start=1):
            net_f, pin_f = fault_forcing(nl, fault)
            for net, sa in net_f.items():
                mk = net_masks.setdefault(self.e.ids[net], [0, 0])
                mk[sa] |= 1 << m
            for pin, sa in pin_f.items():
                mk = pin_masks.setdefault(pin, [0, 0])
                mk[sa] |= 1 << m
        self.net_masks = net_masks
        # Per-entry pin masks; the schedule order is levelized comb cells
        # sorted by (level, name), same as _Engine builds it.
        self.entry_masks: list = [None] * len(self.e.schedule)
        levels = levelize(nl)
        order = sorted(nl.comb_cells(), key=lambda c: (levels[c.name], c.name))
        for i, cell in enumerate(order):
            pins = cell.kind.input_pins
            ma = pin_masks.get((cell.name, pins[0]))
            mb = pin_masks.get((cell.name, pins[1])) if len(pins) > 1 else None
            mo = net_masks.get(self.e.schedule[i][3])
            if ma or mb or mo:
                self.entry_masks[i] = (ma, mb, mo)
        self.ff_d_masks = [pin_masks.get((f[0], "D")) for f in self.e.ffs]

        n = self.e.n_nets
        self.hi = [self.all] * n
        self.lo = [self.all] * n
        self.shi = [self.all] * len(self.e.ffs)
        self.slo = [self.all] * len(self.e.ffs)
        for nid, v in self.e.consts:
            self._write(nid, v)
        self._settle()

    # -- plane primitives ---------------------------------------------------

    def _apply(self, h: int, l: int, mk) -> tuple[int, int]:
        m0, m1 = mk
        return (h & ~m0) | m1, (l | m0) & ~m1

    def _write(self, nid: int, v: int) -> None:
        if v == 0:
            h, l = 0, self.all
        elif v == 1:
            h, l = self.all, 0
        else:
            h, l = self.all, self.all
        mk = self.net_masks.get(nid)
        if mk:
            h, l = self._apply(h, l, mk)
        self.hi[nid], self.lo[nid] = h, l

    def _settle(self) -> None:
        hi, lo = self.hi, self.lo
        for (cell, i, d, si, q, qb, _df) in self.e.ffs:
            sh, sl = self.shi[i], self.slo[i]
            if q >= 0:
                mk = self.net_masks.get(q)
                hi[q], lo[q] = self._apply(sh, sl, mk) if mk else (sh, sl)
            if qb >= 0:
                hi[qb], lo[qb] = sl, sh
        if self.e.vfreezes:
            se = self.e.scan_en_id
            seh, sel = hi[se], lo[se]
            for cell_name, value, vid in self.e.vfreezes:
                i = self.e.ff_index[cell_name]
                sh, sl = self.shi[i], self.slo[i]
                if value == 0:  # AND(q, NOT se)
                    hi[vid], lo[vid] = sh & sel, sl | seh
                else:  # OR(q, se)
                    hi[vid], lo[vid] = sh | seh, sl & sel
        for entry, masks in zip(self.e.schedule, self.entry_masks):
            code, a, b, out = entry[0], entry[1], entry[2], entry[3]
            ha, la = hi[a], lo[a]
            if masks and masks[0]:
                ha, la = self._apply(ha, la, masks[0])
            if code == _INV:
                h, l = la, ha
            elif code == _BUF:
                h, l = ha, la
            else:
                hb, lb = hi[b], lo[b]
                if masks and masks[1]:
                    hb, lb = self._apply(hb, lb, masks[1])
                if code == _AND:
                    h, l = ha & hb, la | lb
                elif code == _OR:
                    h, l = ha | hb, la & lb
                elif code == _NAND:
                    h, l = la | lb, ha & hb
                elif code == _NOR:
                    h, l = la & lb, ha | hb
                else:  # ANDB: a AND NOT b
                    h, l = ha & lb, la | hb
            if masks and masks[2]:
                h, l = self._apply(h, l, masks[2])
            hi[out], lo[out] = h, l

    def _observe(self, nid: int, detected: int) -> int:
        h, l = self.hi[nid], self.lo[nid]
        h0, l0 = h & 1, l & 1
        if h0 and l0:
            return detected
        if h0:
            return detected | (l & ~h)
        return detected | (h & ~l)

    # -- protocol (mirrors ScanRunner.run_patterns) --------------------------

    def run(self, patterns: list[Pattern]) -> int:
        detected = 0
        strobe_log: list[dict[str, tuple[int, int]]] = []

        def shift_phase(load: dict[str, str]) -> list[dict[str, tuple[int, int]]]:
            self._write(self.e.pi_ids[self.nl.scan_en], 1)
            self._settle()
            L = self.cmap.max_length
            strobes = []
            for t in range(L):
                snap = {}
                for name, si_id, out_id, lc in self.e.chains:
                    snap[name] = (self.hi[out_id], self.lo[out_id])
                strobes.append(snap)
                for chain in self.cmap.chains:
                    bits = load[chain.name]
                    if self.cmap.stitch is Stitch.QB:
                        bits = compensate_load(bits)
                    lc = len(chain.cells)
                    pad = L - lc
                    v = X if t < pad else str_to_bits(bits)[L - 1 - t]
                    self._write(self.e.pi_ids[chain.scan_in], int(v))
                new_shi, new_slo = self.shi[:], self.slo[:]
                for (_c, i, _d, si, _q, _qb, _df) in self.e.ffs:
                    if si >= 0:
                        new_shi[i], new_slo[i] = self.hi[si], self.lo[si]
                self.shi, self.slo = new_shi, new_slo
                self._settle()
            return strobes

        def observe_unload(strobes) -> int:
            det = 0
            for name, _si, _out, lc in self.e.chains:
                for t in range(lc):
                    h, l = strobes[t][name]
                    h0, l0 = h & 1, l & 1
                    if h0 and l0:
                        continue
                    det |= (l & ~h) if h0 else (h & ~l)
            return det

        for k, pat in enumerate(patterns):
            strobes = shift_phase(pat.load)
            if k > 0:
                detected |= observe_unload(strobes)
            self._write(self.e.pi_ids[self.nl.scan_en], 0)
            for name, bit in zip(self.nl.functional_inputs(),
                                 str_to_bits(pat.pi)):
                self._write(self.e.pi_ids[name], int(bit))
            self._settle()
            for _po, nid in self.e.functional_po_ids:
                detected = self._observe(nid, detected)
            new_shi, new_slo = self.shi[:], self.slo[:]
            for ff, dmask in zip(self.e.ffs, self.ff_d_masks):
                (_c, i, d, _si, _q, _qb, _df) = ff
                h, l = (self.hi[d], self.lo[d]) if d >= 0 else (self.all, self.all)
                if dmask:
                    h, l = self._apply(h, l, dmask)
                new_shi[i], new_slo[i] = h, l
            self.shi, self.slo = new_shi, new_slo
            self._settle()
        flush = shift_phase({c.name: "X" * len(c.cells)
                             for c in self.cmap.chains})
        detected |= observe_unload(flush)
        return detected & ~1
