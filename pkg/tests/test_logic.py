import itertools

import pytest

from scanfreeze import Logic3, NetlistError, PrimitiveKind, eval_gate
from scanfreeze.logic import ONE, X, ZERO

COMB = [PrimitiveKind.INV, PrimitiveKind.BUF, PrimitiveKind.AND2,
        PrimitiveKind.OR2, PrimitiveKind.NAND2, PrimitiveKind.NOR2,
        PrimitiveKind.ANDB2]


def test_controlling_values_dominate_x():
    assert eval_gate(PrimitiveKind.NAND2, (ZERO, X)) is ONE
    assert eval_gate(PrimitiveKind.AND2, (ZERO, X)) is ZERO
    assert eval_gate(PrimitiveKind.OR2, (ONE, X)) is ONE
    assert eval_gate(PrimitiveKind.NOR2, (ONE, X)) is ZERO


def test_x_propagates():
    assert eval_gate(PrimitiveKind.NOR2, (X, X)) is X
    assert eval_gate(PrimitiveKind.INV, (X,)) is X


def test_andb2_definition():
    assert eval_gate(PrimitiveKind.ANDB2, (ONE, ZERO)) is ONE
    assert eval_gate(PrimitiveKind.ANDB2, (ONE, ONE)) is ZERO
    assert eval_gate(PrimitiveKind.ANDB2, (X, ONE)) is ZERO
    assert eval_gate(PrimitiveKind.ANDB2, (ZERO, X)) is ZERO


def test_arity_mismatch():
    with pytest.raises(NetlistError):
        eval_gate(PrimitiveKind.AND2, (ONE,))
    with pytest.raises(NetlistError):
        eval_gate(PrimitiveKind.INV, (ONE, ZERO))


def test_ff_kinds_rejected():
    with pytest.raises(NetlistError):
        eval_gate(PrimitiveKind.DFF, (ONE, ONE))


def test_ternary_monotonicity_exhaustive():
    """Refining an X input to 0 or 1 never flips a definite output to the
    opposite definite value. Exhaustive over all kinds and input combos."""
    for kind in COMB:
        n = len(kind.input_pins)
        for combo in itertools.product(list(Logic3), repeat=n):
            base = eval_gate(kind, combo)
            for i, v in enumerate(combo):
                if v is not X:
                    continue
                for refined in (ZERO, ONE):
                    refined_combo = combo[:i] + (refined,) + combo[i + 1:]
                    out = eval_gate(kind, refined_combo)
                    if base is not X:
                        assert out is base, (kind, combo, refined_combo)
