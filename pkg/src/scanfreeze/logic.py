"""Three-valued logic: values and gate evaluation.

Controlling values dominate X (AND(0,X)=0, OR(1,X)=1); otherwise X
propagates. Values are plain ints (0, 1, 2=X) wrapped in an IntEnum so the
simulator can index tables directly.
"""

from __future__ import annotations

from enum import IntEnum

from .netlist import NetlistError, PrimitiveKind


class Logic3(IntEnum):
    ZERO = 0
    ONE = 1
    X = 2

    def __str__(self) -> str:
        return "01X"[self]


ZERO, ONE, X = Logic3.ZERO, Logic3.ONE, Logic3.X

NOT_TABLE = (1, 0, 2)
AND_TABLE = ((0, 0, 0), (0, 1, 2), (0, 2, 2))
OR_TABLE = ((0, 1, 2), (1, 1, 1), (2, 1, 2))


def l_not(a: int) -> int:
    return NOT_TABLE[a]


def l_and(a: int, b: int) -> int:
    return AND_TABLE[a][b]


def l_or(a: int, b: int) -> int:
    return OR_TABLE[a][b]


_COMB_EVAL = {
    PrimitiveKind.INV: lambda a: NOT_TABLE[a],
    PrimitiveKind.BUF: lambda a: a,
    PrimitiveKind.AND2: lambda a, b: AND_TABLE[a][b],
    PrimitiveKind.OR2: lambda a, b: OR_TABLE[a][b],
    PrimitiveKind.NAND2: lambda a, b: NOT_TABLE[AND_TABLE[a][b]],
    PrimitiveKind.NOR2: lambda a, b: NOT_TABLE[OR_TABLE[a][b]],
    PrimitiveKind.ANDB2: lambda a, b: AND_TABLE[a][NOT_TABLE[b]],
}


def eval_gate(kind: PrimitiveKind, inputs) -> Logic3:
    """Evaluate one combinational primitive on Logic3 inputs."""
    fn = _COMB_EVAL.get(kind)
    if fn is None:
        raise NetlistError(f"{kind.value} is not a combinational primitive")
    if len(inputs) != len(kind.input_pins):
        raise NetlistError(
            f"{kind.value} takes {len(kind.input_pins)} inputs, got {len(inputs)}")
    return Logic3(fn(*inputs))


def parse_bit(ch: str) -> Logic3:
    if ch == "0":
        return ZERO
    if ch == "1":
        return ONE
    if ch in ("X", "x"):
        return X
    raise ValueError(f"invalid logic character: {ch!r}")


def bits_to_str(bits) -> str:
    return "".join("01X"[b] for b in bits)


def str_to_bits(s: str) -> list[Logic3]:
    return [parse_bit(c) for c in s]
