import random

import pytest

from scanfreeze import (ChainMap, Netlist, NetlistError, Partition,
                        PrimitiveKind, ScanConfig, ScanRunner, SimState,
                        Stitch, insert_scan, isomorphic, partition_chains,
                        run_chain_test, settle)
from scanfreeze.logic import Logic3
from scanfreeze.scan import Chain


def test_partition_singletons():
    for policy in Partition:
        assert partition_chains(["a", "b", "c"], 3, policy) == [["a"], ["b"], ["c"]]


def test_partition_contiguous():
    assert partition_chains(list("abcde"), 2, Partition.CONTIGUOUS) == \
        [["a", "b", "c"], ["d", "e"]]


def test_partition_round_robin():
    assert partition_chains(list("abcde"), 2, Partition.ROUND_ROBIN) == \
        [["a", "c", "e"], ["b", "d"]]


def test_partition_range_errors():
    with pytest.raises(NetlistError):
        partition_chains(["a"], 2, Partition.CONTIGUOUS)
    with pytest.raises(NetlistError):
        partition_chains(["a"], 0, Partition.CONTIGUOUS)


def test_insert_scan_matches_golden(s27, golden):
    scanned, cmap = insert_scan(s27, ScanConfig(
        n_chains=1, stitch=Stitch.QB, order=["G7", "G6", "G5"]))
    assert isomorphic(scanned, golden)
    assert cmap.chains[0].cells == ["G7", "G6", "G5"]
    assert cmap.stitch is Stitch.QB


def test_insert_scan_single_ff_q_stitch():
    nl = Netlist("one")
    nl.add_input("d")
    nl.add_input("CLK")
    nl.clock = "CLK"
    nl.add_cell("f", PrimitiveKind.DFF, {"D": "d", "CLK": "CLK", "Q": "q"})
    nl.add_output("q")
    scanned, cmap = insert_scan(nl, ScanConfig(stitch=Stitch.Q))
    ff = scanned.cells["f"]
    assert ff.kind is PrimitiveKind.SFF
    assert ff.pins["SI"] == "scan_in1"
    # Q drives both the functional PO and scan_out1
    assert ("q", "q") in scanned.outputs
    assert ("scan_out1", "q") in scanned.outputs


def test_three_chains_of_one(s27):
    scanned, cmap = insert_scan(s27, ScanConfig(n_chains=3, stitch=Stitch.Q))
    assert [len(c.cells) for c in cmap.chains] == [1, 1, 1]
    assert scanned.scan_in_ports() == ["scan_in1", "scan_in2", "scan_in3"]
    assert scanned.scan_out_ports() == ["scan_out1", "scan_out2", "scan_out3"]


def test_insert_scan_errors(s27):
    comb = Netlist("comb")
    comb.add_input("a")
    comb.add_cell("g", PrimitiveKind.INV, {"A": "a", "Y": "y"})
    comb.add_output("y")
    with pytest.raises(NetlistError):
        insert_scan(comb, ScanConfig())
    with pytest.raises(NetlistError):
        insert_scan(s27, ScanConfig(n_chains=4))
    with pytest.raises(NetlistError):
        insert_scan(s27, ScanConfig(order=["G5", "G6"]))


def test_insert_scan_rejects_reinsertion(s27):
    scanned, _ = insert_scan(s27, ScanConfig())
    with pytest.raises(NetlistError):
        insert_scan(scanned, ScanConfig())


def test_functional_preservation(s27):
    """With scan_en held 0 the scanned netlist tracks the original on
    random functional cycles."""
    scanned, _ = insert_scan(s27, ScanConfig(n_chains=2, stitch=Stitch.QB))
    rng = random.Random(5)
    plain = ScanRunner(s27)
    dft = ScanRunner(scanned)
    plain.load_state(SimState(ffs={f: Logic3.ZERO for f in ["G5", "G6", "G7"]}))
    dft.load_state(SimState(nets={"scan_en": Logic3.ZERO},
                            ffs={f: Logic3.ZERO for f in ["G5", "G6", "G7"]}))
    for _ in range(1000):
        pi = "".join(rng.choice("01") for _ in range(4))
        po_a = plain.apply_pi(pi)
        po_b = dft.apply_pi(pi)
        assert po_a == po_b
        plain.capture()
        dft.capture()
        assert plain.to_state().ffs == dft.to_state().ffs


@pytest.mark.parametrize("stitch", [Stitch.Q, Stitch.QB])
def test_chain_reachability(s27, stitch):
    """Shifting an L-bit marker for L cycles fully determines every cell."""
    scanned, cmap = insert_scan(s27, ScanConfig(n_chains=1, stitch=stitch))
    runner = ScanRunner(scanned, cmap)
    runner._shift_phase({"chain1": "101"})
    states = runner.to_state().ffs
    got = [states[c] for c in cmap.chains[0].cells]
    assert got == [Logic3.ONE, Logic3.ZERO, Logic3.ONE]


def test_chainmap_json_roundtrip():
    cmap = ChainMap(Stitch.QB, [Chain("chain1", ["a", "b"]),
                                Chain("chain2", ["c"])])
    again = ChainMap.from_json(cmap.to_json())
    assert again.stitch is Stitch.QB
    assert [(c.name, c.cells) for c in again.chains] == \
        [("chain1", ["a", "b"]), ("chain2", ["c"])]
    assert again.max_length == 2
    assert cmap.chains[0].scan_in == "scan_in1"
    assert cmap.chains[1].scan_out == "scan_out2"
