import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from npbrane.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from npbrane.dorfman import Section
from npbrane.errors import ParseError
from npbrane.exterior import FORM, VECTOR, AltTensor
from npbrane.fileio import dump_section, dump_tensor, load_tensor, parse_section, parse_tensor
from npbrane.randgen import Gen
from npbrane.scalarfield import Chart

GOLDEN = Path(__file__).parent / "golden"


def tensor_file(tmp_path, name, dim, degree, variance, terms):
    obj = {"dim": dim, "degree": degree, "variance": variance,
           "terms": [{"index": list(i), "coeff": c} for i, c in terms]}
    path = tmp_path / name
    path.write_text(json.dumps(obj, indent=1))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ----- file formats -----------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 4), st.sampled_from([FORM, VECTOR]))
def test_tensor_round_trip(seed, degree, variance):
    T = Gen(seed).tensor(Chart(4), degree, variance)
    text = dump_tensor(T)
    assert parse_tensor(text) == T
    assert dump_tensor(parse_tensor(text)) == text


def test_section_round_trip():
    G = Gen(2)
    ch = Chart(3)
    e = Section(G.vector(ch, 1), G.form(ch, 2), 3)
    assert parse_section(dump_section(e)) == e


@pytest.mark.parametrize("body,line", [
    ('{"dim": 3, "degree": 2, "variance": "vector",\n "terms": [{"index": [2, 1], "coeff": "1"}]}', 2),
    ('{"dim": 3, "degree": 2, "variance": "vector",\n "terms": [{"index": [1, 4], "coeff": "1"}]}', 2),
    ('{"dim": 3, "degree": 2, "variance": "vector",\n "terms": [{"index": [1], "coeff": "1"}]}', 2),
    ('{"dim": 3, "degree": 2, "variance": "sideways",\n "terms": []}', 1),
    ('{"dim": 3, "degree": 1, "variance": "form",\n "terms": [{"index": [1], "coeff": "x1 +"}]}', 2),
    ('{"dim": 3,\n "degree": 1 "variance": "form"}', 2),
])
def test_parse_errors_have_positions(body, line):
    with pytest.raises(ParseError) as err:
        parse_tensor(body)
    assert err.value.line == line and err.value.column is not None


def test_duplicate_index_rejected():
    body = ('{"dim": 3, "degree": 1, "variance": "form", "terms": '
            '[{"index": [1], "coeff": "1"}, {"index": [1], "coeff": "2"}]}')
    with pytest.raises(ParseError):
        parse_tensor(body)


# ----- subcommands ------------------------------------------------------------------

def test_check_np(tmp_path, capsys):
    good = tensor_file(tmp_path, "g.json", 4, 3, "vector", [((1, 2, 3), "1")])
    code, out, _ = run(capsys, "check-np", good)
    assert code == EXIT_OK and "PASS" in out
    bad = tensor_file(tmp_path, "b.json", 6, 3, "vector", [((1, 2, 3), "1"), ((4, 5, 6), "1")])
    code, out, _ = run(capsys, "--format", "json", "check-np", bad)
    assert code == EXIT_FAIL
    rec = json.loads(out.splitlines()[0])
    assert rec["failures"] and rec["first_witness"]
    broken = tmp_path / "x.json"
    broken.write_text('{"dim": 4, "degree": 3, "variance": "vector",\n "terms": [{"index": [3, 2, 1], "coeff": "1"}]}')
    code, _, err = run(capsys, "check-np", str(broken))
    assert code == EXIT_INPUT and "line 2" in err


def test_check_decomposable(tmp_path, capsys):
    good = tensor_file(tmp_path, "g.json", 4, 3, "vector", [((1, 2, 3), "x4")])
    assert run(capsys, "check-decomposable", good)[0] == EXIT_OK
    bad = tensor_file(tmp_path, "b.json", 6, 3, "vector", [((1, 2, 3), "1"), ((4, 5, 6), "1")])
    assert run(capsys, "check-decomposable", bad)[0] == EXIT_FAIL


def test_gauge(tmp_path, capsys):
    pi = tensor_file(tmp_path, "pi.json", 4, 3, "vector", [((1, 2, 3), "1")])
    b = tensor_file(tmp_path, "b.json", 4, 3, "form", [((1, 2, 3), "x4")])
    out_path = tmp_path / "out.json"
    code, _, _ = run(capsys, "gauge", pi, b, "--out", str(out_path))
    assert code == EXIT_OK
    ch = Chart(4)
    assert load_tensor(out_path) == AltTensor.basis(ch, (1, 2, 3), VECTOR, 1 / (1 + ch.coord(4)))
    sing = tensor_file(tmp_path, "s.json", 4, 3, "form", [((1, 2, 3), "-1")])
    code, _, err = run(capsys, "gauge", pi, sing)
    assert code == EXIT_FAIL and "singular" in err.lower()


def test_gauge_zero_is_byte_identical(tmp_path, capsys):
    ch = Chart(4)
    pi_path = tmp_path / "pi.json"
    pi_path.write_text(dump_tensor(AltTensor.basis(ch, (1, 2, 3), VECTOR, ch.coord(4) + 2)))
    zero = tensor_file(tmp_path, "z.json", 4, 3, "form", [])
    out_path = tmp_path / "out.json"
    assert run(capsys, "gauge", str(pi_path), zero, "--out", str(out_path))[0] == EXIT_OK
    assert out_path.read_bytes() == pi_path.read_bytes()


def test_sw_flow(tmp_path, capsys):
    pi = tensor_file(tmp_path, "pi.json", 4, 3, "vector", [((1, 2, 3), "1")])
    a = tensor_file(tmp_path, "a.json", 4, 2, "form", [((2, 3), "x1*x4")])
    samples = tmp_path / "s.json"
    samples.write_text(json.dumps([[0.1, 0.2, 0.3, 0.4], ["1/2", 0, 0, "1/3"]]))
    code, out, _ = run(capsys, "sw-flow", "--pi", pi, "--a", a, "--samples", str(samples), "--step", "1/200")
    assert code == EXIT_OK and "max defect" in out
    samples.write_text(json.dumps([[1, 0, 0, -2]]))
    code, _, err = run(capsys, "sw-flow", "--pi", pi, "--a", a, "--samples", str(samples), "--step", "1/200")
    assert code == EXIT_FAIL and err


def test_bv_check(tmp_path, capsys):
    closed = tensor_file(tmp_path, "c.json", 4, 3, "form", [((1, 2, 3), "1")])
    assert run(capsys, "bv-check", "--space", "membrane", "--p", "2", "--c", closed)[0] == EXIT_OK
    bad = tensor_file(tmp_path, "d.json", 4, 3, "form", [((2, 3, 4), "x1")])
    code, out, _ = run(capsys, "bv-check", "--space", "membrane", "--p", "2", "--c", bad, "--emit", "defect")
    assert code == EXIT_FAIL and "dc" in out
    pi = tensor_file(tmp_path, "pi.json", 4, 3, "vector", [((1, 2, 3), "1")])
    code, out, _ = run(capsys, "bv-check", "--space", "pbrane", "--p", "3", "--pi", pi)
    assert code == EXIT_OK and out.count("PASS") == 2


def test_derived_bracket(tmp_path, capsys):
    ch = Chart(3)
    e1 = tmp_path / "e1.json"
    e2 = tmp_path / "e2.json"
    e1.write_text(dump_section(Section.make(ch, 2, vec=AltTensor.basis(ch, (1,), VECTOR, 1))))
    e2.write_text(dump_section(Section.make(ch, 2, vec=AltTensor.basis(ch, (2,), VECTOR, ch.coord(1)))))
    c = tensor_file(tmp_path, "c.json", 3, 3, "form", [((1, 2, 3), "x2")])
    code, out, _ = run(capsys, "derived-bracket", "--e1", str(e1), "--e2", str(e2), "--c", c)
    assert code == EXIT_OK and "PASS" in out


def test_emit_action_matches_golden(tmp_path, capsys):
    pi = tensor_file(tmp_path, "pi.json", 4, 3, "vector", [((1, 2, 3), "x4")])
    c = tensor_file(tmp_path, "c.json", 4, 4, "form", [((1, 2, 3, 4), "1")])
    for style, suffix in (("plain", "txt"), ("latex", "tex")):
        code, out, _ = run(capsys, "emit-action", "--model", "np-sigma", "--p", "3", "--pi", pi, "--c", c,
                           "--style", style)
        assert code == EXIT_OK and out == (GOLDEN / f"np-sigma.{suffix}").read_text()


def test_proptest_and_reproducibility(capsys):
    code, out, _ = run(capsys, "--seed", "42", "--format", "json", "proptest", "dorfman-leibniz", "--instances", "100")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["failures"] == 0 and rec["instances"] == 100
    again = run(capsys, "--seed", "42", "--format", "json", "proptest", "dorfman-leibniz", "--instances", "100")[1]
    assert again == out
    assert run(capsys, "proptest", "no-such-suite")[0] == EXIT_INPUT
    with pytest.raises(SystemExit) as err:
        main(["--seed", str(2**64), "proptest", "all"])
    assert err.value.code == EXIT_INPUT


def test_console_script(tmp_path):
    pi = tensor_file(tmp_path, "g.json", 4, 3, "vector", [((1, 2, 3), "1")])
    res = subprocess.run([sys.executable, "-m", "npbrane.cli", "check-np", pi], capture_output=True, text=True)
    assert res.returncode == 0 and "PASS" in res.stdout
