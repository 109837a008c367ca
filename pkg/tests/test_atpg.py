import pytest

from scanfreeze import (Netlist, NetlistError, PrimitiveKind, ScanConfig,
                        Stitch, collapse_faults, enumerate_faults,
                        fault_simulate, generate_patterns, insert_scan,
                        write_scanpat)


def emit_pattern_file(netlist, cmap, patterns) -> str:
    return write_scanpat([(c.name, len(c.cells)) for c in cmap.chains],
                         netlist.functional_inputs(),
                         [po for po, _ in netlist.functional_outputs()],
                         patterns)


def test_full_coverage_any_seed(golden, golden_cmap):
    for seed in (0, 3, 99):
        patterns, report = generate_patterns(golden, golden_cmap, seed=seed)
        assert report.detectable_coverage == 100.0
        assert report.coverage == 100.0
        assert not report.aborted


def test_pure_podem_bounded(golden, golden_cmap):
    patterns, report = generate_patterns(golden, golden_cmap, seed=1,
                                         random_budget=0)
    assert len(patterns) <= 16
    assert report.coverage == 100.0


def test_expected_values_filled(golden, golden_cmap, atpg_patterns):
    patterns, _ = atpg_patterns
    for pat in patterns:
        assert len(pat.expected_po) == 1
        assert len(pat.expected_unload["chain1"]) == 3


def test_detected_set_verified_against_simulator(golden, golden_cmap,
                                                 atpg_patterns):
    patterns, report = atpg_patterns
    universe = collapse_faults(golden, enumerate_faults(golden))
    detected = fault_simulate(golden, golden_cmap, patterns, universe)
    assert set(detected) >= set(report.detected)


def test_determinism_byte_identical(golden, golden_cmap):
    runs = []
    for _ in range(2):
        patterns, _ = generate_patterns(golden, golden_cmap, seed=5,
                                        random_budget=16)
        runs.append(emit_pattern_file(golden, golden_cmap, patterns))
    assert runs[0] == runs[1]


def test_different_seeds_allowed_to_differ(golden, golden_cmap):
    a, _ = generate_patterns(golden, golden_cmap, seed=0)
    b, _ = generate_patterns(golden, golden_cmap, seed=123)
    # not required to differ, but both must be complete
    assert a and b


def test_redundant_only_circuit():
    """A circuit whose single interesting fault is redundant: vacuous 100%
    detectable coverage, redundancy listed."""
    nl = Netlist("red")
    nl.add_input("x")
    nl.add_input("CLK")
    nl.clock = "CLK"
    nl.add_cell("i", PrimitiveKind.INV, {"A": "x", "Y": "xn"})
    nl.add_cell("o", PrimitiveKind.OR2, {"A0": "x", "A1": "xn", "Y": "y"})
    nl.add_cell("f", PrimitiveKind.DFF, {"D": "y", "CLK": "CLK", "Q": "q"})
    nl.add_output("y")
    scanned, cmap = insert_scan(nl, ScanConfig())
    patterns, report = generate_patterns(scanned, cmap, seed=0,
                                         random_budget=4)
    assert report.detectable_coverage == 100.0
    # the y-stuck-1 class collapses to its smallest site, i/A SA0
    assert any(f.site == "i/A" and f.sa == 0 for f in report.redundant)
    assert report.coverage < 100.0


def test_report_doc_shape(atpg_patterns):
    _patterns, report = atpg_patterns
    doc = report.to_doc()
    assert doc["total_collapsed"] == report.total_collapsed
    assert doc["coverage_pct"] == round(report.coverage, 4)
    assert isinstance(doc["detected"], list)


def test_requires_scan_inserted(s27):
    from scanfreeze.scan import ChainMap
    with pytest.raises(NetlistError):
        generate_patterns(s27, ChainMap(Stitch.Q, []))
