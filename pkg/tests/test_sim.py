import pytest

from scanfreeze import (ChainMap, Netlist, NetlistError, Pattern,
                        PrimitiveKind, ScanRunner, SimState, Stitch,
                        compensate_load, compensate_unload, run_chain_test,
                        run_pattern, run_patterns, settle, shift_cycle)
from scanfreeze import test_clocks as clock_count
from scanfreeze.logic import Logic3, ONE, X, ZERO
from scanfreeze.scan import Chain

ALL_ZERO = {"G0": ZERO, "G1": ZERO, "G2": ZERO, "G3": ZERO}


def test_settle_s27_all_zero(s27):
    st = settle(s27, SimState(nets=dict(ALL_ZERO),
                              ffs={"G5": ZERO, "G6": ZERO, "G7": ZERO}))
    want = {"G14": 1, "G8": 0, "G12": 1, "G15": 1, "G16": 0,
            "G9": 1, "G11": 0, "G10": 0, "G13": 0, "G17": 1}
    assert {k: int(st.nets[k]) for k in want} == want


def test_settle_all_x(s27):
    st = settle(s27, SimState())
    for net in ["G8", "G9", "G10", "G11", "G17"]:
        assert st.nets[net] is X


def test_settle_constant_net():
    nl = Netlist("k")
    nl.add_constant("k1", 1)
    nl.add_cell("g", PrimitiveKind.INV, {"A": "k1", "Y": "y"})
    nl.add_output("y")
    st = settle(nl, SimState())
    assert st.nets["k1"] is ONE
    assert st.nets["y"] is ZERO


def test_shift_cycle_single_cell():
    nl = Netlist("one")
    nl.add_input("d")
    nl.add_input("CLK")
    nl.add_input("scan_in1")
    nl.add_input("scan_en")
    nl.clock = "CLK"
    nl.scan_en = "scan_en"
    nl.add_cell("f", PrimitiveKind.SFF,
                {"D": "d", "SI": "scan_in1", "SE": "scan_en",
                 "CLK": "CLK", "Q": "q", "QB": None})
    nl.add_output("q")
    st = SimState(ffs={"f": ZERO})
    st2, deltas = shift_cycle(nl, st, {"scan_in1": ONE})
    assert st2.ffs["f"] is ONE
    assert deltas == {}


def test_shift_cycle_x_stream_counts_nothing(golden):
    st = SimState()  # everything X
    _st2, deltas = shift_cycle(golden, st, {"scan_in1": X})
    assert deltas == {}


def test_qb_load_states(golden, golden_cmap):
    runner = ScanRunner(golden, golden_cmap)
    runner._shift_phase({"chain1": "010"})
    st = runner.to_state()
    assert (st.ffs["reg_d_out_2_"], st.ffs["reg_d_out_1_"],
            st.ffs["reg_d_out_0_"]) == (ZERO, ONE, ZERO)


def test_chain_test_qb_compensation(golden, golden_cmap):
    assert run_chain_test(golden, golden_cmap, {"chain1": "010"}) == \
        {"chain1": "101"}


def test_chain_test_q_identity(s27_scanned_q):
    scanned, cmap = s27_scanned_q
    assert run_chain_test(scanned, cmap, {"chain1": "101"}) == \
        {"chain1": "101"}


def test_compensation_involution():
    for bits in ["0", "1", "01X", "1010", "XXXXX", "110X1"]:
        assert compensate_load(compensate_load(bits)) == bits
        assert compensate_unload(compensate_unload(bits)) == bits


def test_all_x_pattern(golden, golden_cmap):
    pat = Pattern({"chain1": "XXX"}, "XXXX")
    run = run_patterns(golden, golden_cmap, [pat])
    assert run.results[0].observed_po == "X"
    assert run.stats.total_shift == 0
    assert run.stats.total_capture == 0
    assert run.mismatches == []


def test_run_patterns_self_consistent(golden, golden_cmap, atpg_patterns):
    patterns, _report = atpg_patterns
    run = run_patterns(golden, golden_cmap, patterns)
    assert run.mismatches == []


def test_run_patterns_fault_detected(golden, golden_cmap, atpg_patterns):
    """With a stuck value forced on G11's driver output the expected values
    disagree somewhere."""
    patterns, _report = atpg_patterns
    run = run_patterns(golden, golden_cmap, patterns,
                       net_forces={"G11": 1})
    assert run.mismatches != []


def test_run_patterns_empty_rejected(golden, golden_cmap):
    with pytest.raises(NetlistError):
        run_patterns(golden, golden_cmap, [])


def test_run_pattern_unload_of_own_load(golden, golden_cmap):
    """One-at-a-time protocol: the pattern's unload reflects its own
    capture result."""
    pat = Pattern({"chain1": "010"}, "0000")
    state = SimState()
    _st, res = run_pattern(golden, golden_cmap, state, pat)
    assert len(res.observed_po) == 1
    assert set(res.observed_unload["chain1"]) <= {"0", "1"}


def test_overlap_equals_one_at_a_time(golden, golden_cmap, atpg_patterns):
    """Observed values agree between the overlapped schedule and isolated
    load/capture/flush runs; only the clock count differs."""
    patterns, _ = atpg_patterns
    overlapped = run_patterns(golden, golden_cmap, patterns)
    state = SimState()
    for k, pat in enumerate(patterns):
        state, res = run_pattern(golden, golden_cmap, state, pat)
        assert res.observed_po == overlapped.results[k].observed_po
        assert res.observed_unload == overlapped.results[k].observed_unload


def test_pattern_dimension_checks(golden, golden_cmap):
    with pytest.raises(NetlistError):
        run_patterns(golden, golden_cmap, [Pattern({"chain1": "01"}, "0000")])
    with pytest.raises(NetlistError):
        run_patterns(golden, golden_cmap, [Pattern({"chain1": "010"}, "00")])


def test_toggle_conservation(golden, golden_cmap, atpg_patterns):
    """Recomputing toggles from the recorded trace matches the counters."""
    patterns, _ = atpg_patterns
    runner = ScanRunner(golden, golden_cmap, record_trace=True)
    run = runner.run_patterns(patterns)
    shift_total = 0
    capture_total = 0
    prev = None
    for label, snapshot in runner.trace:
        if prev is not None and label in ("shift", "capture"):
            flips = sum(1 for a, b in zip(prev, snapshot)
                        if a != b and a != int(X) and b != int(X))
            if label == "shift":
                shift_total += flips
            else:
                capture_total += flips
        prev = snapshot
    assert shift_total == run.stats.total_shift
    assert capture_total == run.stats.total_capture


def test_per_pattern_toggle_sums(golden, golden_cmap, atpg_patterns):
    patterns, _ = atpg_patterns
    run = run_patterns(golden, golden_cmap, patterns)
    per_pattern = sum(r.toggles.total_shift for r in run.results)
    # totals additionally include the final flush window
    assert per_pattern <= run.stats.total_shift
    assert sum(r.toggles.total_capture for r in run.results) == \
        run.stats.total_capture


def test_test_clocks():
    assert clock_count(8, 3) == 35
    assert clock_count(8, 1) == 17
    assert clock_count(0, 99) == 0
    with pytest.raises(ValueError):
        clock_count(-1, 3)


@pytest.mark.parametrize("n", [1, 4, 8, 100])
def test_test_clocks_monotone_in_chain_len(n):
    values = [clock_count(n, L) for L in range(1, 8)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_multichain_unequal_lengths(s27):
    from scanfreeze import ScanConfig, insert_scan
    scanned, cmap = insert_scan(s27, ScanConfig(n_chains=2, stitch=Stitch.QB))
    assert sorted(len(c.cells) for c in cmap.chains) == [1, 2]
    obs = run_chain_test(scanned, cmap, {
        c.name: "10"[:len(c.cells)] for c in cmap.chains})
    for chain in cmap.chains:
        assert len(obs[chain.name]) == len(chain.cells)
        assert set(obs[chain.name]) <= {"0", "1"}
