from scanfreeze import (Netlist, PrimitiveKind, find_isomorphism, isomorphic,
                        structurally_equal)
from scanfreeze.randgen import random_netlist


def two_gate(swap: bool) -> Netlist:
    nl = Netlist("m")
    nl.add_input("a")
    nl.add_input("b")
    if swap:
        nl.add_cell("u1", PrimitiveKind.AND2, {"A0": "b", "A1": "a", "Y": "n"})
    else:
        nl.add_cell("g1", PrimitiveKind.AND2, {"A0": "a", "A1": "b", "Y": "m0"})
    nl.add_cell("g2", PrimitiveKind.INV,
                {"A": "n" if swap else "m0", "Y": "y"})
    nl.add_output("y")
    return nl


def test_symmetric_pin_swap_is_isomorphic():
    assert isomorphic(two_gate(False), two_gate(True))


def test_self_isomorphic(golden):
    m = find_isomorphism(golden, golden)
    assert m == {c: c for c in golden.cells}


def test_different_kind_not_isomorphic():
    a = two_gate(False)
    b = two_gate(False)
    del b.cells["g1"]
    b.add_cell("g1", PrimitiveKind.OR2, {"A0": "a", "A1": "b", "Y": "m0"})
    b.invalidate()
    assert not isomorphic(a, b)


def test_rewired_not_isomorphic():
    a = two_gate(False)
    b = two_gate(False)
    b.cells["g2"].pins["A"] = "a"  # bypass the AND gate
    b.invalidate()
    assert not isomorphic(a, b)


def test_port_names_anchor():
    a = two_gate(False)
    b = two_gate(False)
    b.inputs = ["a", "c"]
    b.cells["g1"].pins["A1"] = "c"
    b.invalidate()
    assert not isomorphic(a, b)


def test_structural_equality_ignores_cell_order(golden):
    other = golden.copy()
    other.cells = dict(sorted(other.cells.items(), reverse=True))
    assert structurally_equal(golden, other)


def test_random_netlists_self_isomorphic():
    for seed in range(8):
        nl = random_netlist(seed, n_pis=3, n_ffs=2, n_gates=9)
        assert isomorphic(nl, nl)
