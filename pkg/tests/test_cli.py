import json
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest

from fixedconic import trace
from fixedconic.cli import main
from fixedconic.conic import ConicImplicit
from fixedconic.errors import MalformedProgram
from fixedconic.executor import report_for
from fixedconic.expr import eval as eval_expr
from fixedconic.expr import parse
from fixedconic.numeric import Precision
from fixedconic.planner import compile, compile_trisection
from fixedconic.render import render

P = Precision(192)
CONICS = [
    ConicImplicit(1, 0, 4, 0, 0, -4),
    ConicImplicit(0, 0, 1, -1, 0, 0),
    ConicImplicit(0, 1, 0, 0, 0, -1),
    ConicImplicit(-1, 0, 4, 0, 0, -4),
    ConicImplicit(Fraction(3, 2), 1, Fraction(-1, 3), 2, -1, Fraction(-5, 7)),
]
SVG = "{http://www.w3.org/2000/svg}"


# --- traces -----------------------------------------------------------------

@pytest.mark.parametrize("mode", ["fixed", "lemma"])
@pytest.mark.parametrize("conic", CONICS)
def test_trace_round_trip(conic, mode):
    e = parse("cbrt(1/2+i/3) + sqrt(cbrt(-3))")
    p = compile(e, conic, mode, P)
    back = trace.loads(trace.dumps(p))
    assert back == p
    oracle = eval_expr(e, P)
    a, b = report_for(p, oracle, P), report_for(back, oracle, P)
    assert trace.report_dict(a) == trace.report_dict(b)
    assert a.constructed == b.constructed


def test_trisection_trace_keeps_its_oracle(tmp_path):
    p = compile_trisection(Fraction(1, 2), CONICS[2], "lemma", P)
    path = tmp_path / "t.json"
    trace.save(p, path)
    assert trace.load(path) == p
    assert trace.load(path).metadata.expression == p.metadata.expression


def test_trace_is_json_with_one_step_per_line():
    p = compile(parse("cbrt(2)"), CONICS[0], "fixed", P)
    text = trace.dumps(p)
    d = json.loads(text)
    assert d["fixed_conic"] == ["1", "0", "4", "0", "0", "-4"]
    assert len(d["steps"]) == len(p.steps)
    assert sum(1 for line in text.splitlines() if '"kind"' in line) == len(p.steps)


@pytest.mark.parametrize(
    "edit",
    [
        lambda d: d.pop("steps"),
        lambda d: d["steps"][0].update(kind="spline"),
        lambda d: d["steps"][-1].update(args=[10**6]),
        lambda d: d.update(fixed_conic=["1", "0"]),
        lambda d: d.update(version="99"),
    ],
)
def test_malformed_traces_are_rejected(edit):
    d = json.loads(trace.dumps(compile(parse("cbrt(2)"), CONICS[0], "fixed", P)))
    edit(d)
    with pytest.raises(MalformedProgram):
        trace.loads(json.dumps(d))


def test_not_json_is_rejected():
    with pytest.raises(MalformedProgram):
        trace.loads("{not json")


# --- rendering ---------------------------------------------------------------

@pytest.mark.parametrize("mode", ["fixed", "lemma"])
@pytest.mark.parametrize("conic", CONICS)
def test_render_is_total(conic, mode):
    p = compile(parse("cbrt(2) + cbrt(1/2+i/3)"), conic, mode, P)
    root = ET.fromstring(render(p))
    assert root.tag == SVG + "svg"
    assert root.findall(f".//{SVG}circle")
    assert root.findall(f".//{SVG}polyline")


def test_render_degenerate_viewport():
    # a single rational point: nothing to fit but the point itself
    p = compile(parse("0"), CONICS[0], "fixed", P)
    root = ET.fromstring(render(p))
    w, h = (float(v) for v in root.get("viewBox").split()[2:])
    assert w > 0 and h > 0


# --- command line ------------------------------------------------------------

def test_cli_verify_passes(capsys):
    assert main(["verify", "cbrt(2)", "--conic", "0,1,0,0,0,-1", "--precision", "128"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "conic_depth 1" in out


def test_cli_verify_json(capsys):
    assert main(["verify", "cbrt(-8)", "--conic", "1,0,4,0,0,-4", "--json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["passed"] is True
    assert float(d["constructed"]["re"]) == pytest.approx(1.0)
    assert float(d["constructed"]["im"]) == pytest.approx(3 ** 0.5)


def test_cli_compile_run_verify_render(tmp_path, capsys):
    path = tmp_path / "p.json"
    svg = tmp_path / "p.svg"
    assert main(["compile", "cbrt(cbrt(2))", "--conic=-1,0,4,0,0,-4", "--output", str(path)]) == 0
    assert main(["run", str(path)]) == 0
    assert capsys.readouterr().out.splitlines()[-1].startswith("1.080059738892306")
    assert main(["verify", "--trace", str(path)]) == 0
    assert main(["render", str(path), "--output", str(svg)]) == 0
    ET.parse(svg)


def test_cli_presets(capsys):
    assert main(["trisect", "--cos", "1/2"]) == 0
    assert "0.9396926207859084" in capsys.readouterr().out
    assert main(["double-cube", "--focus", "0,0", "--directrix", "1,0,2", "--ecc", "3/2"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_cli_classify(capsys):
    assert main(["classify", "1,1,1,0,0,-1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("ellipse") and "0.816496580927726" in out
    assert main(["classify", "1,0,1,0,0,-1"]) == 0
    assert "not usable" in capsys.readouterr().out


def test_cli_verify_failure_exit_code(tmp_path, capsys):
    p = compile(parse("cbrt(2)"), CONICS[0], "fixed", P)
    d = json.loads(trace.dumps(p))
    d["metadata"]["expression"] = "cbrt(3)"
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(d))
    assert main(["verify", "--trace", str(path)]) == 1
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "cbrt(2", "--conic", "1,0,4,0,0,-4"],
        ["verify", "cbrt(2)", "--conic", "1,0,1,0,0,-1"],
        ["verify", "cbrt(2)", "--conic", "1,2,3"],
        ["verify", "cbrt(2)"],
        ["verify", "cbrt(2)", "--conic", "1,0,4,0,0,-4", "--precision", "32"],
        ["trisect", "--cos", "3/2"],
        ["run", "/nonexistent/trace.json"],
        ["double-cube", "--focus", "0,0"],
    ],
)
def test_cli_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_unknown_command_exits_two():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
