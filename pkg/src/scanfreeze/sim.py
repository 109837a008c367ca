"""Cycle-based 3-valued simulation of the scan shift/capture protocol.

Model notes, fixed here and relied on by the power analyses:

* Zero-delay: one levelized evaluation pass per clock; hazards are not
  modeled. Only definite 0<->1 changes count as toggles, and only on
  combinational cell output nets (FF outputs necessarily churn during
  shift and are excluded).
* Buckets: the L shift-edge settles of a pattern count as shift toggles,
  the capture-edge settle as capture toggles. Mode-change settles (raising
  or dropping scan-enable, applying primary inputs) establish the next
  baseline but are not attributed to either bucket.
* Primary inputs hold their last applied values during shifting; before
  the first pattern everything is X.
* QB stitching inverts data at every stage. Loads are compensated on
  injection (bit for chain position i is the wanted state XOR i mod 2, the
  bit for the farthest cell entering first); observed unloads are reported
  per position as raw-output XOR (L - i) mod 2, which reproduces the
  complement behavior a tester sees on a QB-stitched chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .logic import Logic3, X, l_and, l_not, l_or, str_to_bits
from .netlist import Netlist, NetlistError, PrimitiveKind, levelize
from .scan import ChainMap, Stitch

_INV, _BUF, _AND, _OR, _NAND, _NOR, _ANDB = range(7)
_OPCODE = {
    PrimitiveKind.INV: _INV,
    PrimitiveKind.BUF: _BUF,
    PrimitiveKind.AND2: _AND,
    PrimitiveKind.OR2: _OR,
    PrimitiveKind.NAND2: _NAND,
    PrimitiveKind.NOR2: _NOR,
    PrimitiveKind.ANDB2: _ANDB,
}
_NOT_T = (1, 0, 2)
_AND_T = ((0, 0, 0), (0, 1, 2), (0, 2, 2))
_OR_T = ((0, 1, 2), (1, 1, 1), (2, 1, 2))


@dataclass
class SimState:
    """Point-in-time values: every net plus every FF's internal state."""

    nets: dict[str, Logic3] = field(default_factory=dict)
    ffs: dict[str, Logic3] = field(default_factory=dict)


@dataclass
class ToggleStats:
    shift: dict[str, int] = field(default_factory=dict)
    capture: dict[str, int] = field(default_factory=dict)

    @property
    def total_shift(self) -> int:
        return sum(self.shift.values())

    @property
    def total_capture(self) -> int:
        return sum(self.capture.values())

    def to_doc(self) -> dict:
        nets = sorted(set(self.shift) | set(self.capture))
        return {
            "nets": {n: {"shift": self.shift.get(n, 0),
                         "capture": self.capture.get(n, 0)} for n in nets},
            "totals": {"shift": self.total_shift, "capture": self.total_capture},
        }


@dataclass
class Pattern:
    """One scan test: chain loads (Q-state semantics, index 0 nearest
    scan-in), a functional-PI vector, and expected responses."""

    load: dict[str, str]
    pi: str
    expected_po: str = ""
    expected_unload: dict[str, str] = field(default_factory=dict)


@dataclass
class PatternResult:
    observed_po: str
    observed_unload: dict[str, str] = field(default_factory=dict)
    toggles: ToggleStats = field(default_factory=ToggleStats)


@dataclass(frozen=True)
class Mismatch:
    pattern: int
    where: str
    expected: str
    observed: str


@dataclass
class RunResult:
    stats: ToggleStats
    results: list[PatternResult]
    mismatches: list[Mismatch]


def validate_pattern(pattern: Pattern, netlist: Netlist, chain_map: ChainMap) -> None:
    for chain in chain_map.chains:
        bits = pattern.load.get(chain.name)
        if bits is None or len(bits) != len(chain.cells):
            raise NetlistError(
                f"pattern load for {chain.name} must have {len(chain.cells)} bits")
        exp = pattern.expected_unload.get(chain.name, "")
        if exp and len(exp) != len(chain.cells):
            raise NetlistError(f"pattern unload for {chain.name} has wrong length")
    n_pi = len(netlist.functional_inputs())
    if len(pattern.pi) != n_pi:
        raise NetlistError(f"pattern PI vector must have {n_pi} bits")
    n_po = len(netlist.functional_outputs())
    if pattern.expected_po and len(pattern.expected_po) != n_po:
        raise NetlistError(f"pattern PO vector must have {n_po} bits")


# -- QB stitch compensation --------------------------------------------------


def compensate_load(bits: str) -> str:
    """Injection-side QB compensation: flip odd chain positions. Involutive."""
    return "".join(_flip(c) if i % 2 else c for i, c in enumerate(bits))


def compensate_unload(bits: str) -> str:
    """Observation-side QB compensation: flip position i when (L-i) is odd.
    Involutive."""
    n = len(bits)
    return "".join(_flip(c) if (n - i) % 2 else c for i, c in enumerate(bits))


def _flip(c: str) -> str:
    return {"0": "1", "1": "0"}.get(c, c)


# -- compiled engine ---------------------------------------------------------


class _Engine:
    """A netlist compiled to net-indexed arrays plus a levelized schedule.

    Optional hooks: stuck-value forcing on nets and on individual cell input
    pins (fault machines), and virtual freeze gates that mirror the transform
    pass without rewriting the netlist.
    """

    def __init__(self, nl: Netlist, chain_map: ChainMap | None = None, *,
                 net_forces: dict[str, int] | None = None,
                 pin_forces: dict[tuple[str, str], int] | None = None,
                 virtual_freezes: tuple[tuple[str, int], ...] = ()):
        net_forces = net_forces or {}
        pin_forces = pin_forces or {}

        ids: dict[str, int] = {}
        for n in nl.net_names():
            ids[n] = len(ids)

        # Virtual freeze nets and the pin/PO redirection they imply.
        pin_redirect: dict[tuple[str, str], int] = {}
        po_redirect: dict[str, int] = {}
        self.vfreezes: list[tuple[str, int, int]] = []  # (ff cell, value, vnet id)
        scan_out_ports = set(nl.scan_out_ports())
        if virtual_freezes and nl.scan_en is None:
            raise NetlistError("virtual freeze requires a scan-inserted netlist")
        for cell_name, value in virtual_freezes:
            ff = nl.cells[cell_name]
            if ff.kind is not PrimitiveKind.SFF:
                raise NetlistError(f"{cell_name} is not a scan cell")
            q_net = ff.pins["Q"]
            vnet = f"{cell_name}_frz"
            vid = ids.setdefault(vnet, len(ids))
            self.vfreezes.append((cell_name, value, vid))
            if q_net is None:
                continue
            for r in nl.readers().get(q_net, ()):
                if r[0] == "cell" and r[2] != "SI" and r[2] in \
                        nl.cells[r[1]].kind.data_input_pins:
                    pin_redirect[(r[1], r[2])] = vid
                elif r[0] == "output" and r[1] not in scan_out_ports:
                    po_redirect[r[1]] = vid

        self.n_nets = len(ids)
        self.ids = ids
        self.names = list(ids)

        self.pi_ids = {pi: ids[pi] for pi in nl.inputs}
        self.consts = [(ids[n], v) for n, v in nl.constants.items()]
        self.force_by_id = {ids[n]: v for n, v in net_forces.items() if n in ids}

        def in_id(cell, port):
            r = pin_redirect.get((cell.name, port))
            if r is not None:
                return r
            net = cell.pins[port]
            return ids[net] if net is not None else -1

        levels = levelize(nl)
        self.schedule: list[tuple] = []
        self.comb_outs: list[tuple[int, str]] = []
        for cell in sorted(nl.comb_cells(), key=lambda c: (levels[c.name], c.name)):
            code = _OPCODE[cell.kind]
            pins = cell.kind.input_pins
            a = in_id(cell, pins[0])
            b = in_id(cell, pins[1]) if len(pins) > 1 else -1
            out_net = cell.output_net()
            out = ids[out_net] if out_net is not None else -1
            fa = pin_forces.get((cell.name, pins[0]))
            fb = pin_forces.get((cell.name, pins[1])) if len(pins) > 1 else None
            fo = self.force_by_id.get(out)
            self.schedule.append((code, a, b, out, fa, fb, fo))
            if out >= 0:
                self.comb_outs.append((out, out_net))
        for cell_name, value, vid in self.vfreezes:
            self.comb_outs.append((vid, f"{cell_name}_frz"))

        self.ffs: list[tuple] = []  # (cell, state idx, d, si, q, qb, d_force)
        for i, cell in enumerate(nl.ff_cells()):
            d = in_id(cell, "D")
            si = in_id(cell, "SI") if cell.kind is PrimitiveKind.SFF else -1
            q = ids[cell.pins["Q"]] if cell.pins["Q"] is not None else -1
            qb = ids[cell.pins["QB"]] if cell.pins["QB"] is not None else -1
            self.ffs.append((cell.name, i, d, si, q, qb,
                             pin_forces.get((cell.name, "D"))))
        self.ff_index = {f[0]: f[1] for f in self.ffs}

        self.scan_en_id = ids[nl.scan_en] if nl.scan_en else -1
        self.po_ids = []
        for po, net in nl.outputs:
            self.po_ids.append((po, po_redirect.get(po, ids[net])))
        functional = [po for po, _ in nl.functional_outputs()]
        self.functional_po_ids = [(po, nid) for po, nid in self.po_ids
                                  if po in functional]

        self.chains: list[tuple] = []
        if chain_map is not None:
            po_net = dict(self.po_ids)
            for chain in chain_map.chains:
                si_id = ids.get(chain.scan_in)
                out_id = po_net.get(chain.scan_out)
                if si_id is None or out_id is None:
                    raise NetlistError(
                        f"netlist lacks ports for {chain.name} "
                        f"({chain.scan_in}/{chain.scan_out})")
                self.chains.append((chain.name, si_id, out_id, len(chain.cells)))
        self.stitch = chain_map.stitch if chain_map is not None else Stitch.Q

    def settle(self, values: list[int], states: list[int]) -> None:
        """Write FF outputs from states, then one levelized pass."""
        force = self.force_by_id
        for _cell, i, _d, _si, q, qb, _df in self.ffs:
            s = states[i]
            if q >= 0:
                fv = force.get(q)
                values[q] = s if fv is None else fv
            if qb >= 0:
                values[qb] = _NOT_T[s]
        se = values[self.scan_en_id] if self.scan_en_id >= 0 else X
        for _cell, value, vid in self.vfreezes:
            i = self.ff_index[_cell]
            s = states[i]
            if value == 0:
                values[vid] = _AND_T[s][_NOT_T[se]]
            else:
                values[vid] = _OR_T[s][se]
        for code, a, b, out, fa, fb, fo in self.schedule:
            va = values[a] if fa is None else fa
            if code == _INV:
                v = _NOT_T[va]
            elif code == _BUF:
                v = va
            else:
                vb = values[b] if fb is None else fb
                if code == _AND:
                    v = _AND_T[va][vb]
                elif code == _OR:
                    v = _OR_T[va][vb]
                elif code == _NAND:
                    v = _NOT_T[_AND_T[va][vb]]
                elif code == _NOR:
                    v = _NOT_T[_OR_T[va][vb]]
                else:
                    v = _AND_T[va][_NOT_T[vb]]
            values[out] = v if fo is None else fo


class ScanRunner:
    """Drives the scan protocol on one netlist and accumulates toggles.

    One runner owns one simulation state; independent runs need independent
    runners. ``record_trace`` keeps a per-counted-settle snapshot of the
    combinational output nets for the toggle-conservation checks.
    """

    def __init__(self, netlist: Netlist, chain_map: ChainMap | None = None, *,
                 net_forces=None, pin_forces=None, virtual_freezes=(),
                 record_trace: bool = False):
        self.nl = netlist
        self.cmap = chain_map
        self.e = _Engine(netlist, chain_map, net_forces=net_forces,
                         pin_forces=pin_forces, virtual_freezes=virtual_freezes)
        self.values = [X] * self.e.n_nets
        self.states = [X] * len(self.e.ffs)
        for nid, v in self.e.consts:
            self.values[nid] = self.e.force_by_id.get(nid, v)
        for pid in self.e.pi_ids.values():
            fv = self.e.force_by_id.get(pid)
            if fv is not None:
                self.values[pid] = fv
        self.shift_counts = [0] * self.e.n_nets
        self.capture_counts = [0] * self.e.n_nets
        self.trace: list[tuple[str, list[int]]] = []
        self.record_trace = record_trace
        self.e.settle(self.values, self.states)

    # -- elementary steps --------------------------------------------------

    def _set_pi(self, name: str, v: int) -> None:
        nid = self.e.pi_ids[name]
        self.values[nid] = self.e.force_by_id.get(nid, v)

    def _settle_counted(self, counts: list[int], label: str) -> None:
        prev = self.values[:]
        self.e.settle(self.values, self.states)
        for nid, _name in self.e.comb_outs:
            a, b = prev[nid], self.values[nid]
            if a != b and a != X and b != X:
                counts[nid] += 1
        if self.record_trace:
            self.trace.append((label, [self.values[nid]
                                       for nid, _ in self.e.comb_outs]))

    def set_mode(self, scan_enable: int) -> None:
        """Mode-change settle; establishes a baseline, counts nothing."""
        if self.nl.scan_en is not None:
            self._set_pi(self.nl.scan_en, scan_enable)
        self.e.settle(self.values, self.states)
        if self.record_trace:
            self.trace.append(("mode", [self.values[nid]
                                        for nid, _ in self.e.comb_outs]))

    def shift(self, inject: dict[str, int]) -> dict[str, int]:
        """One shift edge. Strobes the scan-out wires before the edge and
        returns them; ``inject`` maps chain name -> serial-in bit."""
        strobes = {}
        for name, si_id, out_id, _lc in self.e.chains:
            strobes[name] = self.values[out_id]
        for chain in (self.cmap.chains if self.cmap else []):
            self._set_pi(chain.scan_in, inject.get(chain.name, X))
        new_states = self.states[:]
        for _cell, i, _d, si, _q, _qb, _df in self.e.ffs:
            if si >= 0:
                new_states[i] = self.values[si]
        self.states = new_states
        self._settle_counted(self.shift_counts, "shift")
        return strobes

    def apply_pi(self, pi_bits: str) -> str:
        """Enter functional mode, force the PI vector, settle (uncounted)
        and return the functional PO values."""
        if self.nl.scan_en is not None:
            self._set_pi(self.nl.scan_en, 0)
        for name, bit in zip(self.nl.functional_inputs(), str_to_bits(pi_bits)):
            self._set_pi(name, bit)
        self.e.settle(self.values, self.states)
        if self.record_trace:
            self.trace.append(("pi", [self.values[nid]
                                      for nid, _ in self.e.comb_outs]))
        return "".join("01X"[self.values[nid]]
                       for _po, nid in self.e.functional_po_ids)

    def capture(self) -> None:
        """Capture edge: every FF loads its D value; counted as capture."""
        new_states = self.states[:]
        for _cell, i, d, _si, _q, _qb, d_force in self.e.ffs:
            v = self.values[d] if d >= 0 else X
            new_states[i] = v if d_force is None else d_force
        self.states = new_states
        self._settle_counted(self.capture_counts, "capture")

    # -- protocol ----------------------------------------------------------

    def _injection_stream(self, load: dict[str, str]) -> list[dict[str, int]]:
        """Per-cycle serial-in bits realizing the wanted chain states."""
        L = self.cmap.max_length
        per_cycle: list[dict[str, int]] = [dict() for _ in range(L)]
        for chain in self.cmap.chains:
            bits = load[chain.name]
            if self.cmap.stitch is Stitch.QB:
                bits = compensate_load(bits)
            lc = len(chain.cells)
            vals = str_to_bits(bits)
            for t in range(L):
                pad = L - lc
                per_cycle[t][chain.name] = X if t < pad else vals[L - 1 - t]
        return per_cycle

    def _decode_unload(self, strobes: list[dict[str, int]]) -> dict[str, str]:
        """Map per-cycle scan-out strobes back to per-position values."""
        out = {}
        for chain in self.cmap.chains:
            lc = len(chain.cells)
            raw = [strobes[t][chain.name] for t in range(lc)]
            # strobe t carries position lc-1-t
            by_pos = list(reversed(raw))
            if self.cmap.stitch is Stitch.QB:
                wire_flipped = "".join("01X"[_NOT_T[v]] for v in by_pos)
                out[chain.name] = compensate_unload(wire_flipped)
            else:
                out[chain.name] = "".join("01X"[v] for v in by_pos)
        return out

    def _shift_phase(self, load: dict[str, str]) -> dict[str, str]:
        self.set_mode(1)
        stream = self._injection_stream(load)
        strobes = [self.shift(stream[t]) for t in range(self.cmap.max_length)]
        return self._decode_unload(strobes)

    def _toggle_snapshot(self) -> tuple[list[int], list[int]]:
        return self.shift_counts[:], self.capture_counts[:]

    def _toggle_delta(self, snap) -> ToggleStats:
        s0, c0 = snap
        stats = ToggleStats()
        for nid, name in self.e.comb_outs:
            ds = self.shift_counts[nid] - s0[nid]
            dc = self.capture_counts[nid] - c0[nid]
            if ds:
                stats.shift[name] = stats.shift.get(name, 0) + ds
            if dc:
                stats.capture[name] = stats.capture.get(name, 0) + dc
        return stats

    def run_patterns(self, patterns: list[Pattern]) -> RunResult:
        """Overlapped schedule: each pattern's load shifts out its
        predecessor; a final X flush unloads the last pattern."""
        if not patterns:
            raise NetlistError("empty pattern list")
        for p in patterns:
            validate_pattern(p, self.nl, self.cmap)
        results: list[PatternResult] = []
        for k, pat in enumerate(patterns):
            snap = self._toggle_snapshot()
            unload = self._shift_phase(pat.load)
            if k > 0:
                results[k - 1].observed_unload = unload
            po = self.apply_pi(pat.pi)
            self.capture()
            # A pattern's delta covers its own load window and its capture;
            # its unload is counted in the next pattern's load window.
            results.append(PatternResult(po, toggles=self._toggle_delta(snap)))
        flush = self._shift_phase({c.name: "X" * len(c.cells)
                                   for c in self.cmap.chains})
        results[-1].observed_unload = flush

        stats = ToggleStats()
        for nid, name in self.e.comb_outs:
            if self.shift_counts[nid]:
                stats.shift[name] = self.shift_counts[nid]
            if self.capture_counts[nid]:
                stats.capture[name] = self.capture_counts[nid]
        mismatches = collect_mismatches(self.nl, patterns, results)
        return RunResult(stats, results, mismatches)

    # -- state import/export ------------------------------------------------

    def to_state(self) -> SimState:
        nets = {name: Logic3(self.values[nid]) for name, nid in self.e.ids.items()}
        ffs = {cell: Logic3(self.states[i]) for cell, i in self.e.ff_index.items()}
        return SimState(nets, ffs)

    def load_state(self, state: SimState) -> None:
        for pi, nid in self.e.pi_ids.items():
            v = state.nets.get(pi, X)
            self.values[nid] = self.e.force_by_id.get(nid, int(v))
        for cell, i in self.e.ff_index.items():
            self.states[i] = int(state.ffs.get(cell, X))
        self.e.settle(self.values, self.states)


def collect_mismatches(netlist: Netlist, patterns: list[Pattern],
                       results: list[PatternResult]) -> list[Mismatch]:
    """Definite-value disagreements between expected and observed."""
    out: list[Mismatch] = []
    po_ports = [po for po, _ in netlist.functional_outputs()]
    for k, (pat, res) in enumerate(zip(patterns, results)):
        if pat.expected_po:
            for port, e, o in zip(po_ports, pat.expected_po, res.observed_po):
                if e in "01" and o in "01" and e != o:
                    out.append(Mismatch(k, port, e, o))
        for chain, exp in pat.expected_unload.items():
            obs = res.observed_unload.get(chain, "")
            for i, (e, o) in enumerate(zip(exp, obs)):
                if e in "01" and o in "01" and e != o:
                    out.append(Mismatch(k, f"{chain}[{i}]", e, o))
    return out


# -- public operations -------------------------------------------------------


def settle(netlist: Netlist, state: SimState) -> SimState:
    """Zero-delay fixpoint of the combinational logic for the given PI
    values and FF states; unknown inputs are X."""
    runner = ScanRunner(netlist, None)
    runner.load_state(state)
    return runner.to_state()


def shift_cycle(netlist: Netlist, state: SimState,
                serial_in: dict[str, Logic3],
                chain_map: ChainMap | None = None) -> tuple[SimState, dict[str, int]]:
    """One shift clock: scan_en high, every SFF loads SI, settle. Returns
    the new state and per-net definite-toggle deltas (vs. the settled
    ``state``). ``serial_in`` maps scan-in port name -> bit."""
    if netlist.scan_en is None:
        raise NetlistError("netlist has no scan ports")
    runner = ScanRunner(netlist, chain_map)
    runner.load_state(state)
    runner._set_pi(netlist.scan_en, 1)
    for port, bit in serial_in.items():
        runner._set_pi(port, int(bit))
    new_states = runner.states[:]
    for _cell, i, _d, si, _q, _qb, _df in runner.e.ffs:
        if si >= 0:
            new_states[i] = runner.values[si]
    runner.states = new_states
    runner._settle_counted(runner.shift_counts, "shift")
    deltas = {name: runner.shift_counts[nid]
              for nid, name in runner.e.comb_outs if runner.shift_counts[nid]}
    return runner.to_state(), deltas


def run_pattern(netlist: Netlist, chain_map: ChainMap, state: SimState,
                pattern: Pattern, next_pattern: Pattern | None = None
                ) -> tuple[SimState, PatternResult]:
    """One-at-a-time protocol: load, force PIs, measure POs, capture, then
    unload (overlapped with loading ``next_pattern`` when given, else an X
    flush). The result carries this pattern's own unload."""
    validate_pattern(pattern, netlist, chain_map)
    runner = ScanRunner(netlist, chain_map)
    runner.load_state(state)
    snap = runner._toggle_snapshot()
    runner._shift_phase(pattern.load)
    po = runner.apply_pi(pattern.pi)
    runner.capture()
    if next_pattern is not None:
        validate_pattern(next_pattern, netlist, chain_map)
        unload = runner._shift_phase(next_pattern.load)
    else:
        unload = runner._shift_phase({c.name: "X" * len(c.cells)
                                      for c in chain_map.chains})
    result = PatternResult(po, unload, runner._toggle_delta(snap))
    return runner.to_state(), result


def run_patterns(netlist: Netlist, chain_map: ChainMap,
                 patterns: list[Pattern], **runner_kwargs) -> RunResult:
    """Overlapped application of a pattern sequence from the all-X state."""
    runner = ScanRunner(netlist, chain_map, **runner_kwargs)
    return runner.run_patterns(patterns)


def run_chain_test(netlist: Netlist, chain_map: ChainMap,
                   load: dict[str, str]) -> dict[str, str]:
    """Load the chains, then immediately unload (no capture): the flush
    observation for a known load."""
    runner = ScanRunner(netlist, chain_map)
    runner._shift_phase(load)
    return runner._shift_phase({c.name: "X" * len(c.cells)
                                for c in chain_map.chains})


def test_clocks(n_patterns: int, max_chain_len: int) -> int:
    """Clocks for the overlapped schedule: one load/unload window per
    pattern plus its capture, and a final flush."""
    if n_patterns < 0:
        raise ValueError("pattern count must be non-negative")
    if n_patterns == 0:
        return 0
    return n_patterns * (max_chain_len + 1) + max_chain_len
