import pytest

from scanfreeze import ParseError, Pattern, read_scanpat, write_scanpat


def sample():
    chains = [("chain1", 3), ("chain2", 2)]
    inputs = ["G0", "G1"]
    outputs = ["G17"]
    patterns = [
        Pattern({"chain1": "010", "chain2": "1X"}, "01", "1",
                {"chain1": "101", "chain2": "00"}),
        Pattern({"chain1": "XXX", "chain2": "00"}, "XX", "X",
                {"chain1": "010", "chain2": "11"}),
    ]
    return chains, inputs, outputs, patterns


def test_roundtrip():
    chains, inputs, outputs, patterns = sample()
    text = write_scanpat(chains, inputs, outputs, patterns)
    c2, i2, o2, p2 = read_scanpat(text)
    assert (c2, i2, o2) == (chains, inputs, outputs)
    assert p2 == patterns


def test_exact_format():
    chains, inputs, outputs, patterns = sample()
    text = write_scanpat(chains, inputs, outputs, patterns[:1])
    assert text == (
        "SCANPAT 1\n"
        "CHAINS chain1:3,chain2:2\n"
        "INPUTS G0 G1\n"
        "OUTPUTS G17\n"
        "PATTERN 0\n"
        "LOAD chain1 010\n"
        "LOAD chain2 1X\n"
        "PI 01\n"
        "PO 1\n"
        "UNLOAD chain1 101\n"
        "UNLOAD chain2 00\n"
        "END\n"
    )


def test_comments_allowed():
    chains, inputs, outputs, patterns = sample()
    text = write_scanpat(chains, inputs, outputs, patterns)
    text = "# preamble\n" + text.replace("PATTERN 0", "# note\nPATTERN 0")
    _c, _i, _o, p2 = read_scanpat(text)
    assert p2 == patterns


def test_bad_header():
    with pytest.raises(ParseError) as err:
        read_scanpat("SCANPAT 2\n")
    assert err.value.line == 1


def test_truncated_pattern_has_line_number():
    chains, inputs, outputs, patterns = sample()
    text = write_scanpat(chains, inputs, outputs, patterns[:1])
    truncated = "\n".join(text.splitlines()[:7]) + "\n"
    with pytest.raises(ParseError) as err:
        read_scanpat(truncated)
    assert err.value.line == 8


def test_wrong_bit_count():
    text = ("SCANPAT 1\nCHAINS chain1:3\nINPUTS\nOUTPUTS\n"
            "PATTERN 0\nLOAD chain1 01\nPI\nPO\nUNLOAD chain1\nEND\n")
    with pytest.raises(ParseError) as err:
        read_scanpat(text)
    assert "needs 3 bits" in str(err.value)


def test_bad_bits_rejected():
    text = ("SCANPAT 1\nCHAINS chain1:1\nINPUTS\nOUTPUTS\n"
            "PATTERN 0\nLOAD chain1 2\nPI\nPO\nUNLOAD chain1\nEND\n")
    with pytest.raises(ParseError):
        read_scanpat(text)


def test_wrong_pattern_index():
    text = ("SCANPAT 1\nCHAINS chain1:1\nINPUTS\nOUTPUTS\n"
            "PATTERN 1\nLOAD chain1 0\nPI\nPO\nUNLOAD chain1\nEND\n")
    with pytest.raises(ParseError) as err:
        read_scanpat(text)
    assert "expected 0" in str(err.value)
