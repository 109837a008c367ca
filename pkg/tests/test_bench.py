import pytest

from scanfreeze import ParseError, PrimitiveKind, parse_bench
from scanfreeze.data import s27_bench_text


def test_s27_counts(s27):
    assert len(s27.cells) == 13
    kinds = [c.kind for c in s27.cells.values()]
    assert kinds.count(PrimitiveKind.DFF) == 3
    assert s27.inputs == ["G0", "G1", "G2", "G3", "CLK"]
    assert s27.outputs == [("G17", "G17")]
    assert s27.clock == "CLK"


def test_dff_bindings(s27):
    ff = s27.cells["G5"]
    assert ff.kind is PrimitiveKind.DFF
    assert ff.pins == {"D": "G10", "CLK": "CLK", "Q": "G5", "QB": None}


def test_input_feeding_output():
    nl = parse_bench("INPUT(a)\nOUTPUT(a)\n")
    assert nl.cells == {}
    assert nl.inputs == ["a"]
    assert nl.outputs == [("a", "a")]
    assert nl.clock is None


def test_arity_error_has_line():
    with pytest.raises(ParseError) as err:
        parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nx = AND(a, b, c)\n")
    assert err.value.line == 4
    assert "2 input" in str(err.value)


def test_not_arity():
    with pytest.raises(ParseError):
        parse_bench("INPUT(a)\nINPUT(b)\nx = NOT(a, b)\n")


def test_unknown_kind():
    with pytest.raises(ParseError) as err:
        parse_bench("INPUT(a)\nx = XOR(a, a)\n")
    assert "unknown gate kind" in str(err.value)


def test_redefinition():
    with pytest.raises(ParseError) as err:
        parse_bench("INPUT(a)\nx = NOT(a)\nx = BUFF(a)\n")
    assert "redefinition" in str(err.value)
    assert err.value.line == 3


def test_undefined_signal():
    with pytest.raises(ParseError) as err:
        parse_bench("INPUT(a)\nx = AND(a, ghost)\nOUTPUT(x)\n")
    assert "undefined signal ghost" in str(err.value)


def test_comments_and_blanks():
    text = "# header\n\nINPUT(a)  # trailing\nOUTPUT(y)\ny = BUFF(a)\n"
    nl = parse_bench(text)
    assert len(nl.cells) == 1


def test_clk_reserved():
    with pytest.raises(ParseError):
        parse_bench("INPUT(CLK)\nINPUT(d)\nq = DFF(d)\nOUTPUT(q)\n")


def test_bundled_text_parses():
    nl = parse_bench(s27_bench_text(), name="s27")
    assert nl.name == "s27"
    assert len(nl.comb_cells()) == 10
