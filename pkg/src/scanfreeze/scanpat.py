"""SCANPAT v1: the line-oriented pattern file format.

Bit-exact grammar (single spaces, no trailing whitespace):

    SCANPAT 1
    CHAINS chain1:3,chain2:2
    INPUTS G0 G1 G2 G3
    OUTPUTS G17
    PATTERN 0
    LOAD chain1 010
    PI 0100
    PO 1
    UNLOAD chain1 101
    END

Bits are 0/1/X. LOAD/UNLOAD strings use Q-state semantics, index 0 being
the cell nearest scan-in. ``#`` comments are allowed on their own lines.
"""

from __future__ import annotations

import re

from .bench import ParseError
from .sim import Pattern

_BITS_RE = re.compile(r"^[01X]+$")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def write_scanpat(chains: list[tuple[str, int]], inputs: list[str],
                  outputs: list[str], patterns: list[Pattern]) -> str:
    lines = ["SCANPAT 1"]
    lines.append("CHAINS " + ",".join(f"{n}:{ln}" for n, ln in chains))
    lines.append("INPUTS" + ("" if not inputs else " " + " ".join(inputs)))
    lines.append("OUTPUTS" + ("" if not outputs else " " + " ".join(outputs)))
    chain_names = [n for n, _ in chains]
    for idx, pat in enumerate(patterns):
        lines.append(f"PATTERN {idx}")
        for name in chain_names:
            lines.append(f"LOAD {name} {pat.load[name]}")
        lines.append(f"PI {pat.pi if pat.pi else ''}".rstrip())
        lines.append(f"PO {pat.expected_po}".rstrip())
        for name in chain_names:
            lines.append(f"UNLOAD {name} {pat.expected_unload.get(name, '')}".rstrip())
        lines.append("END")
    return "\n".join(lines) + "\n"


def read_scanpat(text: str) -> tuple[list[tuple[str, int]], list[str],
                                     list[str], list[Pattern]]:
    """Parse a pattern file; strict about the grammar, every rejection
    carries a line number."""
    lines = text.splitlines()
    pos = 0

    def next_line() -> tuple[int, str]:
        nonlocal pos
        while pos < len(lines):
            lineno = pos + 1
            raw = lines[pos]
            pos += 1
            if raw.startswith("#") or raw.strip() == "":
                continue
            return lineno, raw
        return len(lines) + 1, ""

    lineno, line = next_line()
    if line != "SCANPAT 1":
        raise ParseError("expected header 'SCANPAT 1'", lineno)

    lineno, line = next_line()
    if not line.startswith("CHAINS "):
        raise ParseError("expected CHAINS line", lineno)
    chains: list[tuple[str, int]] = []
    for part in line[7:].split(","):
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*):(\d+)", part)
        if not m:
            raise ParseError(f"bad chain spec {part!r}", lineno)
        chains.append((m.group(1), int(m.group(2))))
    lengths = dict(chains)

    def name_list(line: str, keyword: str, lineno: int) -> list[str]:
        if line == keyword:
            return []
        if not line.startswith(keyword + " "):
            raise ParseError(f"expected {keyword} line", lineno)
        names = line[len(keyword) + 1:].split(" ")
        for n in names:
            if not _NAME_RE.match(n):
                raise ParseError(f"bad name {n!r} in {keyword}", lineno)
        return names

    lineno, line = next_line()
    inputs = name_list(line, "INPUTS", lineno)
    lineno, line = next_line()
    outputs = name_list(line, "OUTPUTS", lineno)

    patterns: list[Pattern] = []
    expected_idx = 0
    while True:
        lineno, line = next_line()
        if line == "":
            break
        m = re.fullmatch(r"PATTERN (\d+)", line)
        if not m:
            raise ParseError(f"expected PATTERN <n>, found {line!r}", lineno)
        if int(m.group(1)) != expected_idx:
            raise ParseError(f"pattern index {m.group(1)}, expected {expected_idx}",
                             lineno)
        expected_idx += 1

        load: dict[str, str] = {}
        for name, ln in chains:
            lineno, line = next_line()
            m = re.fullmatch(r"LOAD ([A-Za-z_][A-Za-z0-9_]*) ([01X]+)", line)
            if not m or m.group(1) != name:
                raise ParseError(f"expected 'LOAD {name} <bits>'", lineno)
            if len(m.group(2)) != ln:
                raise ParseError(f"LOAD {name} needs {ln} bits", lineno)
            load[name] = m.group(2)

        lineno, line = next_line()
        m = re.fullmatch(r"PI(?: ([01X]*))?", line)
        if not m:
            raise ParseError("expected PI line", lineno)
        pi = m.group(1) or ""
        if len(pi) != len(inputs):
            raise ParseError(f"PI needs {len(inputs)} bits", lineno)

        lineno, line = next_line()
        m = re.fullmatch(r"PO(?: ([01X]*))?", line)
        if not m:
            raise ParseError("expected PO line", lineno)
        po = m.group(1) or ""
        if len(po) != len(outputs):
            raise ParseError(f"PO needs {len(outputs)} bits", lineno)

        unload: dict[str, str] = {}
        for name, ln in chains:
            lineno, line = next_line()
            m = re.fullmatch(r"UNLOAD ([A-Za-z_][A-Za-z0-9_]*)(?: ([01X]*))?", line)
            if not m or m.group(1) != name:
                raise ParseError(f"expected 'UNLOAD {name} <bits>'", lineno)
            bits = m.group(2) or ""
            if bits and len(bits) != ln:
                raise ParseError(f"UNLOAD {name} needs {ln} bits", lineno)
            unload[name] = bits

        lineno, line = next_line()
        if line != "END":
            raise ParseError("expected END", lineno)
        patterns.append(Pattern(load, pi, po, unload))

    return chains, inputs, outputs, patterns
