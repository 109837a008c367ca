"""Pattern generation: seeded random phase with fault dropping, then PODEM
for the survivors. Deterministic for a fixed seed."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .faults import Fault, collapse_faults, enumerate_faults
from .faultsim import fault_simulate
from .netlist import Netlist, NetlistError
from .podem import PodemStatus, podem
from .scan import ChainMap, Stitch
from .sim import Pattern, ScanRunner


@dataclass
class FaultReport:
    total_uncollapsed: int
    total_collapsed: int
    detected: list[Fault]
    patterns_used: int
    redundant: list[Fault] = field(default_factory=list)
    aborted: list[Fault] = field(default_factory=list)

    @property
    def coverage(self) -> float:
        """Detected / collapsed, in percent."""
        if self.total_collapsed == 0:
            return 100.0
        return 100.0 * len(self.detected) / self.total_collapsed

    @property
    def detectable_coverage(self) -> float:
        """Detected / (collapsed minus proven-redundant), in percent."""
        detectable = self.total_collapsed - len(self.redundant)
        if detectable == 0:
            return 100.0
        return 100.0 * len(self.detected) / detectable

    def to_doc(self) -> dict:
        return {
            "total_uncollapsed": self.total_uncollapsed,
            "total_collapsed": self.total_collapsed,
            "detected": [str(f) for f in self.detected],
            "coverage_pct": round(self.coverage, 4),
            "detectable_coverage_pct": round(self.detectable_coverage, 4),
            "patterns_used": self.patterns_used,
            "redundant": [str(f) for f in self.redundant],
            "aborted": [str(f) for f in self.aborted],
        }


def random_pattern(rng: random.Random, netlist: Netlist,
                   chain_map: ChainMap) -> Pattern:
    load = {c.name: "".join(rng.choice("01") for _ in c.cells)
            for c in chain_map.chains}
    pi = "".join(rng.choice("01") for _ in netlist.functional_inputs())
    return Pattern(load, pi)


def fill_expected(netlist: Netlist, chain_map: ChainMap,
                  patterns: list[Pattern]) -> list[Pattern]:
    """Fault-free responses for the sequence, written into fresh patterns."""
    if not patterns:
        return []
    run = ScanRunner(netlist, chain_map).run_patterns(patterns)
    out = []
    for pat, res in zip(patterns, run.results):
        out.append(Pattern(dict(pat.load), pat.pi, res.observed_po,
                           dict(res.observed_unload)))
    return out


def _chain_exposed(netlist: Netlist, chain_map: ChainMap, fault: Fault) -> bool:
    """Is the fault site on a net that the shift path itself reads (Q-stitch
    chains shifting through a stuck Q pin)?"""
    if not fault.cell:
        return False
    cell = netlist.cells.get(fault.cell)
    if cell is None or fault.port != "Q":
        return False
    net = cell.pins.get("Q")
    if net is None:
        return False
    for r in netlist.readers().get(net, ()):
        if r[0] == "cell" and r[2] == "SI":
            return True
        if r[0] == "output" and r[1] in netlist.scan_out_ports():
            return True
    return False


def generate_patterns(netlist: Netlist, chain_map: ChainMap, seed: int = 0,
                      random_budget: int = 32, jobs: int = 1
                      ) -> tuple[list[Pattern], FaultReport]:
    """Two-phase ATPG with fault dropping.

    Phase 1 tries ``random_budget`` seeded random patterns, keeping those
    that detect something new. Phase 2 runs PODEM per surviving fault;
    every accepted pattern is fault-simulated against the survivors.
    Returned patterns carry fault-free expected values.
    """
    if not netlist.is_scan_inserted():
        raise NetlistError("pattern generation needs a scan-inserted netlist")
    uncollapsed = enumerate_faults(netlist)
    collapsed = collapse_faults(netlist, uncollapsed)
    if not collapsed:
        raise NetlistError("empty fault universe")
    rng = random.Random(seed)

    kept: list[Pattern] = []
    detected: list[Fault] = []
    remaining: list[Fault] = list(collapsed)

    def drop(new_detected: list[Fault]) -> None:
        nonlocal remaining
        got = set(new_detected)
        detected.extend(f for f in remaining if f in got)
        remaining = [f for f in remaining if f not in got]

    for _ in range(random_budget):
        if not remaining:
            break
        cand = random_pattern(rng, netlist, chain_map)
        newly = fault_simulate(netlist, chain_map, kept + [cand], remaining,
                               jobs=jobs)
        if newly:
            kept.append(cand)
            drop(newly)

    redundant: list[Fault] = []
    aborted: list[Fault] = []
    for fault in list(remaining):
        if fault not in remaining:
            continue
        outcome = podem(netlist, fault, chain_map)
        if outcome.status is PodemStatus.FOUND:
            cand = outcome.pattern
            newly = fault_simulate(netlist, chain_map, kept + [cand], remaining,
                                   jobs=jobs)
            if fault not in newly:
                # Should not happen: PODEM patterns are verified detectors.
                aborted.append(fault)
                remaining.remove(fault)
                continue
            kept.append(cand)
            drop(newly)
        elif outcome.status is PodemStatus.UNTESTABLE:
            if _chain_exposed(netlist, chain_map, fault):
                # Combinationally redundant but visible on the shift path:
                # a flush of the complement value exposes it.
                want = str(1 - fault.sa)
                cand = Pattern({c.name: want * len(c.cells)
                                for c in chain_map.chains},
                               "X" * len(netlist.functional_inputs()))
                newly = fault_simulate(netlist, chain_map, kept + [cand],
                                       remaining, jobs=jobs)
                if fault in newly:
                    kept.append(cand)
                    drop(newly)
                    continue
            redundant.append(fault)
            remaining.remove(fault)
        else:
            aborted.append(fault)
            remaining.remove(fault)

    patterns = fill_expected(netlist, chain_map, kept)
    report = FaultReport(len(uncollapsed), len(collapsed), detected,
                         len(patterns), redundant, aborted)
    return patterns, report
