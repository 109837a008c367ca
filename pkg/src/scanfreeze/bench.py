"""ISCAS89 BENCH format reader.

Accepted lines: ``INPUT(x)``, ``OUTPUT(x)``, ``x = KIND(a[, b])`` with KIND
in {NOT, BUFF, AND, OR, NAND, NOR, DFF}; ``#`` starts a comment. BENCH has
no clock or QB syntax, so DFFs are bound to a synthesized ``CLK`` input and
their QB outputs stay unconnected.
"""

from __future__ import annotations

import re

from .netlist import Netlist, NetlistError, PrimitiveKind, canonical_name


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        pos = f"line {line}" + (f", col {col}" if col else "")
        super().__init__(f"{pos}: {message}" if line else message)
        self.line = line
        self.col = col


_KIND_MAP = {
    "NOT": PrimitiveKind.INV,
    "BUFF": PrimitiveKind.BUF,
    "AND": PrimitiveKind.AND2,
    "OR": PrimitiveKind.OR2,
    "NAND": PrimitiveKind.NAND2,
    "NOR": PrimitiveKind.NOR2,
    "DFF": PrimitiveKind.DFF,
}

_IO_RE = re.compile(r"^(INPUT|OUTPUT)\s*\(\s*([^)\s]+)\s*\)$")
_GATE_RE = re.compile(r"^([^=\s]+)\s*=\s*([A-Za-z]+)\s*\(([^)]*)\)$")

CLOCK_NAME = "CLK"


def parse_bench(text: str, name: str = "top") -> Netlist:
    nl = Netlist(name)
    defined: dict[str, int] = {}  # signal -> defining line
    used: dict[str, int] = {}  # signal -> first referencing line
    outputs: list[tuple[str, int]] = []
    has_dff = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _IO_RE.match(line)
        if m:
            which, sig = m.group(1), canonical_name(m.group(2))
            if which == "INPUT":
                if sig in defined:
                    raise ParseError(f"redefinition of {sig}", lineno)
                defined[sig] = lineno
                nl.add_input(sig)
            else:
                outputs.append((sig, lineno))
                used.setdefault(sig, lineno)
            continue
        m = _GATE_RE.match(line)
        if m:
            out, kind_name, args_text = m.groups()
            out = canonical_name(out)
            kind = _KIND_MAP.get(kind_name.upper())
            if kind is None:
                raise ParseError(f"unknown gate kind {kind_name}", lineno)
            args = [a.strip() for a in args_text.split(",")] if args_text.strip() else []
            try:
                args = [canonical_name(a) for a in args]
            except NetlistError as exc:
                raise ParseError(str(exc), lineno) from exc
            want = 1 if kind in (PrimitiveKind.INV, PrimitiveKind.BUF, PrimitiveKind.DFF) else 2
            if len(args) != want:
                raise ParseError(
                    f"{kind_name} takes {want} input(s), got {len(args)}", lineno)
            if out in defined:
                raise ParseError(f"redefinition of {out}", lineno)
            defined[out] = lineno
            for a in args:
                used.setdefault(a, lineno)
            if kind is PrimitiveKind.DFF:
                has_dff = True
                nl.add_cell(out, kind, {"D": args[0], "CLK": CLOCK_NAME, "Q": out})
            elif want == 1:
                nl.add_cell(out, kind, {"A": args[0], "Y": out})
            else:
                nl.add_cell(out, kind, {"A0": args[0], "A1": args[1], "Y": out})
            continue
        raise ParseError(f"cannot parse: {line!r}", lineno)

    if has_dff:
        if CLOCK_NAME in defined:
            raise ParseError(f"{CLOCK_NAME} is reserved for the synthesized clock",
                             defined[CLOCK_NAME])
        nl.add_input(CLOCK_NAME)
        nl.clock = CLOCK_NAME

    for sig, lineno in used.items():
        if sig not in defined and sig != CLOCK_NAME:
            raise ParseError(f"undefined signal {sig}", lineno)
    for sig, _lineno in outputs:
        nl.add_output(sig, sig)
    return nl


def parse_bench_file(path) -> Netlist:
    from pathlib import Path

    p = Path(path)
    return parse_bench(p.read_text(), name=p.stem)
