"""Structural Verilog subset: parser and deterministic emitter.

The accepted grammar covers exactly what the toolkit emits: one module,
scalar and ranged wire declarations, primitive instances with named port
connections over the inv02/buf02/and02/or02/nand02/nor02/andb02/dff/sff
library, and ``assign`` statements that alias one net to another (or to a
1'b0/1'b1 literal). No expressions, no behavioral constructs.
"""

from __future__ import annotations

import re

from .bench import ParseError
from .netlist import Netlist, NetlistError, PrimitiveKind, canonical_name, validate

KIND_TO_VLOG = {
    PrimitiveKind.INV: "inv02",
    PrimitiveKind.BUF: "buf02",
    PrimitiveKind.AND2: "and02",
    PrimitiveKind.OR2: "or02",
    PrimitiveKind.NAND2: "nand02",
    PrimitiveKind.NOR2: "nor02",
    PrimitiveKind.ANDB2: "andb02",
    PrimitiveKind.DFF: "dff",
    PrimitiveKind.SFF: "sff",
}
VLOG_TO_KIND = {v: k for k, v in KIND_TO_VLOG.items()}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<escaped>\\[^\s]+)
  | (?P<literal>1'b[01])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>\d+)
  | (?P<punct>[()\[\]:;,=.])
  | (?P<op>[&|^~+\-*/?!<>%])
    """,
    re.VERBOSE | re.DOTALL,
)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "lcomment", "bcomment"):
            toks.append(_Tok(kind, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def expect_ident(self) -> _Tok:
        t = self.next()
        if t.kind not in ("ident", "escaped"):
            raise ParseError(f"expected identifier, found {t.text!r}", t.line, t.col)
        return t

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)


def parse_vlog(text: str) -> Netlist:
    p = _Parser(text)
    p.expect("module")
    name_tok = p.expect_ident()
    nl = Netlist(canonical_name(name_tok.text))

    header_ports: list[str] = []
    p.expect("(")
    if p.peek().text != ")":
        while True:
            header_ports.append(_net_ref(p, allow_select=False))
            if p.peek().text == ",":
                p.next()
            else:
                break
    p.expect(")")
    p.expect(";")

    declared: set[str] = set()  # every name a reference may resolve to
    vector_bases: dict[str, tuple[int, int]] = {}
    inputs: list[str] = []
    outputs: list[str] = []
    assigns: list[tuple[str, str | int, int, int]] = []  # lhs, rhs, line, col

    def declare(names, direction):
        # A name may be both input and output (a PI wired straight to a PO);
        # any other re-declaration is an error.
        for n in names:
            if n in inputs and direction != "output" or \
               n in outputs and direction != "input" or \
               n in declared and n not in inputs and n not in outputs:
                raise ParseError(f"redeclaration of {n}", tok.line, tok.col)
            declared.add(n)
        if direction == "input":
            inputs.extend(names)
        elif direction == "output":
            outputs.extend(names)

    while True:
        tok = p.peek()
        if tok.text == "endmodule":
            p.next()
            break
        if tok.kind == "eof":
            p.fail("missing endmodule")
        if tok.text in ("input", "output", "wire"):
            direction = p.next().text
            names = _decl_names(p, vector_bases)
            for base_names in names:
                declare(base_names if isinstance(base_names, list) else [base_names],
                        direction)
            p.expect(";")
            continue
        if tok.text == "assign":
            p.next()
            lhs_tok = p.peek()
            lhs = _net_ref(p)
            p.expect("=")
            rhs_tok = p.peek()
            if rhs_tok.kind == "literal":
                p.next()
                rhs: str | int = int(rhs_tok.text[-1])
            elif rhs_tok.kind in ("ident", "escaped"):
                rhs = _net_ref(p)
            else:
                raise ParseError("assign supports net aliases and 1'b0/1'b1 only",
                                 rhs_tok.line, rhs_tok.col)
            nxt = p.peek()
            if nxt.text != ";":
                raise ParseError("expressions are not supported in assign",
                                 nxt.line, nxt.col)
            p.expect(";")
            assigns.append((lhs, rhs, lhs_tok.line, lhs_tok.col))
            continue
        # instance statement
        kind_tok = p.expect_ident()
        kind = VLOG_TO_KIND.get(kind_tok.text)
        if kind is None:
            raise ParseError(f"unknown cell kind {kind_tok.text}",
                             kind_tok.line, kind_tok.col)
        inst_tok = p.expect_ident()
        inst = canonical_name(inst_tok.text)
        pins: dict[str, str] = {}
        p.expect("(")
        while True:
            dot = p.next()
            if dot.text != ".":
                raise ParseError("expected .PORT ( net ) connection",
                                 dot.line, dot.col)
            port_tok = p.expect_ident()
            port = port_tok.text
            if port not in kind.pins:
                raise ParseError(f"{kind_tok.text} has no port {port}",
                                 port_tok.line, port_tok.col)
            if port in pins:
                raise ParseError(f"port {port} connected twice",
                                 port_tok.line, port_tok.col)
            p.expect("(")
            net_tok = p.peek()
            net = _net_ref(p)
            if net not in declared:
                raise ParseError(f"undeclared net {net}", net_tok.line, net_tok.col)
            p.expect(")")
            pins[port] = net
            if p.peek().text == ",":
                p.next()
                continue
            break
        p.expect(")")
        p.expect(";")
        for port in kind.input_pins:
            if port not in pins:
                raise ParseError(f"instance {inst}: input port {port} unbound",
                                 inst_tok.line, inst_tok.col)
        try:
            nl.add_cell(inst, kind, pins)
        except NetlistError as exc:
            raise ParseError(str(exc), inst_tok.line, inst_tok.col) from exc

    # Resolve directions against the header.
    for port in inputs + outputs:
        if port not in header_ports:
            raise ParseError(f"{port} declared but not a module port")
    for port in header_ports:
        if port not in inputs and port not in outputs:
            raise ParseError(f"module port {port} has no direction")

    # Apply assigns: output-port bindings and general aliases.
    alias: dict[str, str] = {}
    po_binding: dict[str, str] = {}
    for lhs, rhs, line, col in assigns:
        if isinstance(rhs, int):
            nl.add_constant(lhs, rhs)
            continue
        if lhs in outputs:
            po_binding[lhs] = rhs
        elif lhs in inputs:
            raise ParseError(f"assign to input port {lhs}", line, col)
        else:
            alias[lhs] = rhs

    def resolve(net: str) -> str:
        seen = set()
        while net in alias:
            if net in seen:
                raise ParseError(f"alias cycle through {net}")
            seen.add(net)
            net = alias[net]
        return net

    if alias:
        for cell in nl.cells.values():
            for port, net in cell.pins.items():
                if net is not None:
                    cell.pins[port] = resolve(net)
        po_binding = {po: resolve(n) for po, n in po_binding.items()}
        nl.invalidate()

    for pi in inputs:
        nl.add_input(pi)
    for po in outputs:
        nl.add_output(po, resolve(po_binding.get(po, po)))

    # Designated clock / scan-enable from FF pin bindings.
    clocks = {c.pins["CLK"] for c in nl.ff_cells() if c.pins.get("CLK")}
    if len(clocks) > 1:
        raise ParseError(f"multiple clock nets: {sorted(clocks)}")
    nl.clock = next(iter(clocks), None)
    scan_ens = {c.pins["SE"] for c in nl.cells.values()
                if c.kind is PrimitiveKind.SFF and c.pins.get("SE")}
    if len(scan_ens) > 1:
        raise ParseError(f"multiple scan-enable nets: {sorted(scan_ens)}")
    nl.scan_en = next(iter(scan_ens), None)
    return nl


def _decl_names(p: _Parser, vector_bases: dict) -> list:
    """Parse the name list of input/output/wire, flattening vector ranges."""
    rng = None
    if p.peek().text == "[":
        p.next()
        hi_tok = p.next()
        p.expect(":")
        lo_tok = p.next()
        p.expect("]")
        if hi_tok.kind != "number" or lo_tok.kind != "number":
            raise ParseError("vector range must be numeric", hi_tok.line, hi_tok.col)
        rng = (int(hi_tok.text), int(lo_tok.text))
    groups = []
    while True:
        t = p.expect_ident()
        base = canonical_name(t.text)
        if rng is None:
            groups.append([base])
        else:
            hi, lo = max(rng), min(rng)
            vector_bases[base] = (hi, lo)
            groups.append([f"{base}_{i}_" for i in range(lo, hi + 1)])
        if p.peek().text == ",":
            p.next()
            continue
        break
    return groups


def _net_ref(p: _Parser, allow_select: bool = True) -> str:
    """One net reference: identifier with optional bit select."""
    t = p.expect_ident()
    name = t.text
    if t.kind == "escaped":
        name = name[1:]
    if allow_select and p.peek().text == "[":
        p.next()
        idx = p.next()
        if idx.kind != "number":
            raise ParseError("bit select must be numeric", idx.line, idx.col)
        p.expect("]")
        name = f"{name}[{idx.text}]"
    try:
        return canonical_name(name)
    except NetlistError as exc:
        raise ParseError(str(exc), t.line, t.col) from exc


def parse_vlog_file(path) -> Netlist:
    from pathlib import Path

    return parse_vlog(Path(path).read_text())


# -- emitter ----------------------------------------------------------------


def emit_vlog(netlist: Netlist) -> str:
    """Deterministic emission: ports in declaration order, cells sorted by
    name, one instance per line. ``parse_vlog(emit_vlog(n))`` reconstructs
    an isomorphic netlist."""
    errors = [d for d in validate(netlist) if d.severity == "error"]
    if errors:
        raise NetlistError("cannot emit invalid netlist: " + "; ".join(map(str, errors)))

    ports = list(dict.fromkeys(
        list(netlist.inputs) + [po for po, _ in netlist.outputs]))
    po_names = {po for po, _ in netlist.outputs}
    internal = [n for n in sorted(netlist.net_names())
                if n not in netlist.inputs and n not in po_names]

    lines = [f"module {netlist.name} ( " + " , ".join(ports) + " );"]
    if netlist.inputs:
        lines.append("input " + " , ".join(netlist.inputs) + " ;")
    if netlist.outputs:
        lines.append("output " + " , ".join(po for po, _ in netlist.outputs) + " ;")
    if internal:
        lines.append("wire " + " , ".join(internal) + " ;")
    for name in sorted(netlist.cells):
        cell = netlist.cells[name]
        conns = [f".{port} ( {cell.pins[port]} )" for port in cell.kind.pins
                 if cell.pins[port] is not None]
        lines.append(f"{KIND_TO_VLOG[cell.kind]} {name} ( " + " , ".join(conns) + " );")
    for net, value in sorted(netlist.constants.items()):
        lines.append(f"assign {net} = 1'b{value} ;")
    for po, net in netlist.outputs:
        if po != net:
            lines.append(f"assign {po} = {net} ;")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"
