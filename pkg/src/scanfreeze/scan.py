"""Scan insertion: DFF -> SFF conversion, chain stitching, scan ports.

Chains can be stitched through Q (the usual practice) or through QB, which
inverts the shifted data at every stage; the simulator compensates for QB
stitching when loading and unloading.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .netlist import Netlist, NetlistError, PrimitiveKind


class Stitch(str, Enum):
    Q = "Q"
    QB = "QB"


class Partition(str, Enum):
    CONTIGUOUS = "CONTIGUOUS"
    ROUND_ROBIN = "ROUND_ROBIN"


@dataclass
class ScanConfig:
    n_chains: int = 1
    stitch: Stitch = Stitch.Q
    order: list[str] | None = None  # None = cell declaration order
    partition: Partition = Partition.CONTIGUOUS


@dataclass
class Chain:
    name: str
    cells: list[str]

    @property
    def scan_in(self) -> str:
        return "scan_in" + self.name.removeprefix("chain")

    @property
    def scan_out(self) -> str:
        return "scan_out" + self.name.removeprefix("chain")


@dataclass
class ChainMap:
    stitch: Stitch
    chains: list[Chain] = field(default_factory=list)

    @property
    def max_length(self) -> int:
        return max((len(c.cells) for c in self.chains), default=0)

    def chain(self, name: str) -> Chain:
        for c in self.chains:
            if c.name == name:
                return c
        raise KeyError(name)

    def all_cells(self) -> list[str]:
        return [cell for c in self.chains for cell in c.cells]

    def to_json(self) -> str:
        doc = {"stitch": self.stitch.value,
               "chains": {c.name: c.cells for c in self.chains}}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ChainMap":
        doc = json.loads(text)
        chains = [Chain(name, list(cells))
                  for name, cells in sorted(doc["chains"].items())]
        return cls(Stitch(doc["stitch"]), chains)


def partition_chains(ff_list: list[str], n: int, policy: Partition) -> list[list[str]]:
    """Split an ordered FF list into n chains; deterministic for both
    policies, lengths differing by at most one."""
    if not 1 <= n <= len(ff_list):
        raise NetlistError(f"chain count {n} out of range for {len(ff_list)} FFs")
    if policy is Partition.ROUND_ROBIN:
        return [ff_list[i::n] for i in range(n)]
    base, extra = divmod(len(ff_list), n)
    out, at = [], 0
    for i in range(n):
        size = base + (1 if i < extra else 0)
        out.append(ff_list[at:at + size])
        at += size
    return out


def insert_scan(netlist: Netlist, config: ScanConfig) -> tuple[Netlist, ChainMap]:
    """Replace every DFF with an SFF and stitch scan chains.

    Functional logic is untouched; new ports are scan_in1..K, scan_out1..K
    and scan_en. Applying this to an already scan-inserted netlist is an
    error, not a second chain.
    """
    ffs = [c.name for c in netlist.ff_cells()]
    if not ffs:
        raise NetlistError("netlist has no flip-flops")
    if netlist.is_scan_inserted() or netlist.scan_en is not None \
            or any(c.kind is PrimitiveKind.SFF for c in netlist.cells.values()) \
            or netlist.scan_in_ports() or netlist.scan_out_ports():
        raise NetlistError("netlist already has scan structures")
    if config.n_chains > len(ffs):
        raise NetlistError(f"{config.n_chains} chains > {len(ffs)} FFs")

    order = list(ffs) if config.order is None else list(config.order)
    if sorted(order) != sorted(ffs):
        raise NetlistError("explicit order is not a permutation of the FF cells")

    out = netlist.copy()
    taken = set(out.net_names()) | set(out.inputs) | {p for p, _ in out.outputs}

    def fresh(base: str) -> str:
        name = base
        k = 0
        while name in taken:
            k += 1
            name = f"{base}{k}"
        taken.add(name)
        return name

    scan_en = fresh("scan_en")
    out.add_input(scan_en)
    out.scan_en = scan_en

    for name in ffs:
        cell = out.cells[name]
        pins = {"D": cell.pins["D"], "SI": None, "SE": scan_en,
                "CLK": cell.pins["CLK"], "Q": cell.pins["Q"], "QB": cell.pins["QB"]}
        del out.cells[name]
        out.add_cell(name, PrimitiveKind.SFF, pins)

    groups = partition_chains(order, config.n_chains, config.partition)
    cmap = ChainMap(config.stitch)
    tap_pin = "Q" if config.stitch is Stitch.Q else "QB"

    for k, cells in enumerate(groups, start=1):
        chain = Chain(f"chain{k}", cells)
        cmap.chains.append(chain)
        si_port = fresh(chain.scan_in)
        out.add_input(si_port)
        prev_net = si_port
        for name in cells:
            cell = out.cells[name]
            cell.pins["SI"] = prev_net
            if cell.pins[tap_pin] is None:
                cell.pins[tap_pin] = fresh(f"{name}_{tap_pin.lower()}")
            prev_net = cell.pins[tap_pin]
        out.add_output(fresh(chain.scan_out), prev_net)

    out.invalidate()
    return out, cmap
