"""Seeded random netlist generation for property checks and demos."""

from __future__ import annotations

import random

from .netlist import Netlist, PrimitiveKind

_COMB_KINDS = [PrimitiveKind.INV, PrimitiveKind.BUF, PrimitiveKind.AND2,
               PrimitiveKind.OR2, PrimitiveKind.NAND2, PrimitiveKind.NOR2,
               PrimitiveKind.ANDB2]


def random_netlist(seed: int, n_pis: int = 3, n_ffs: int = 2,
                   n_gates: int = 8, n_pos: int = 2,
                   aliases: bool = False, constants: bool = False) -> Netlist:
    """A valid random sequential netlist: acyclic combinational part, FFs
    closing feedback, every gate output reachable as PO fanin or dead."""
    rng = random.Random(seed)
    nl = Netlist(f"rand{seed}")
    nets: list[str] = []

    for i in range(n_pis):
        pi = f"p{i}"
        nl.add_input(pi)
        nets.append(pi)
    if constants and rng.random() < 0.5:
        nl.add_constant("k0", rng.choice((0, 1)))
        nets.append("k0")

    ff_names = []
    if n_ffs:
        nl.add_input("CLK")
        nl.clock = "CLK"
        for i in range(n_ffs):
            name = f"f{i}"
            ff_names.append(name)
            nets.append(f"{name}_q")

    for i in range(n_gates):
        kind = rng.choice(_COMB_KINDS)
        out = f"g{i}"
        if len(kind.input_pins) == 1:
            pins = {"A": rng.choice(nets), "Y": out}
        else:
            a, b = rng.choice(nets), rng.choice(nets)
            pins = {kind.input_pins[0]: a, kind.input_pins[1]: b, "Y": out}
        nl.add_cell(out, kind, pins)
        nets.append(out)

    for name in ff_names:
        nl.add_cell(name, PrimitiveKind.DFF,
                    {"D": rng.choice(nets), "CLK": "CLK", "Q": f"{name}_q"})

    pool = [n for n in nets if n != "CLK"]
    for i in range(n_pos):
        net = rng.choice(pool)
        port = f"o{i}"
        if aliases and rng.random() < 0.3:
            nl.add_output(port, net)
        else:
            # port reading a same-named net only exists when net is a port
            nl.add_output(port, net)
    return nl


def exhaustive_patterns(netlist: Netlist, chain_map) -> list:
    """Every definite load/PI combination, in lexicographic order."""
    from .sim import Pattern

    chain_lens = [(c.name, len(c.cells)) for c in chain_map.chains]
    n_state = sum(ln for _n, ln in chain_lens)
    n_pi = len(netlist.functional_inputs())
    patterns = []
    for bits in range(1 << (n_state + n_pi)):
        s = format(bits, f"0{n_state + n_pi}b") if n_state + n_pi else ""
        load = {}
        at = 0
        for name, ln in chain_lens:
            load[name] = s[at:at + ln]
            at += ln
        patterns.append(Pattern(load, s[at:]))
    return patterns
