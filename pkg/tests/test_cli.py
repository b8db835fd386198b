import io
import json
import subprocess
import sys

import pytest

from gaugeparam.cli import run
from gaugeparam.data import graph_text
from gaugeparam.expr import from_json


@pytest.fixture
def graph_file(tmp_path):
    def make(name="one_loop", text=None):
        p = tmp_path / f"{name}.graph"
        p.write_text(text if text is not None else graph_text(name))
        return str(p)

    return make


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_symanzik_text(graph_file):
    code, out, _ = _run("symanzik", graph_file())
    assert code == 0
    assert out.splitlines() == ["psi = A1 + A2", "phi = (xi1 - xi2)^2 A1 A2"]


def test_symanzik_json_round_trip(graph_file):
    code, out, _ = _run("symanzik", graph_file(), "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"psi", "phi"}
    assert len(from_json(data["phi"])) == 3


def test_corolla_ghost_orders(graph_file):
    path = graph_file()
    assert _run("corolla", path, "--ghost-order", "1")[1].strip() == "a_{(a,3)+} a_{(b,4)+} + a_{(a,3)-} a_{(b,4)-}"
    assert _run("corolla", path, "--ghost-order", "2")[1].strip() == "0"


def test_enumerate(graph_file):
    code, out, _ = _run("enumerate", graph_file())
    assert code == 0
    assert "spanning trees: 2" in out
    assert "spanning 2-forests: 1" in out
    assert "2-factors: 3" in out
    assert "cycles: 1" in out


def test_ew_gauge_table(graph_file):
    code, out, _ = _run("ew-gauge", graph_file())
    assert code == 0
    assert "labelings: 8" in out
    assert out.count("ratio=1") == 8


def test_ew_scalar_json(graph_file):
    code, out, _ = _run("ew-scalar", graph_file(), "--format", "json")
    assert code == 0
    items = json.loads(out)
    assert len({tuple(i["P"]) for i in items}) == 16


def test_diff_and_resreg(graph_file):
    path = graph_file()
    code, out, _ = _run("diff", path, "--color", "f1,f2")
    assert code == 0 and "eta^{mu3 mu4}" in out and "f1 f2" in out
    code, out, _ = _run("resreg", path, "--shrink", "1")
    assert code == 0 and out.strip() == "0"


def test_routing_file(graph_file, tmp_path):
    r = tmp_path / "r.routing"
    r.write_text("route 3 = p\nroute 4 = -p\n")
    code, out, _ = _run("integrand", graph_file(), "--routing", str(r))
    assert code == 0
    assert "p^2" in out and "xi" not in out


def test_output_is_deterministic(graph_file):
    path = graph_file()
    first = _run("diff", path)[1]
    assert all(_run("diff", path)[1] == first for _ in range(2))


def test_parse_error_exit_code(graph_file):
    code, _, err = _run("symanzik", graph_file("bad", "v a\nzz 1\n"))
    assert code == 2
    assert ":2:1:" in err and err.startswith("error: parse:")


def test_validation_exit_code(graph_file):
    code, _, err = _run("symanzik", graph_file("bad", "v a\nv b\ne 1 a b\n"))
    assert code == 3
    assert err.count("regularity") == 2


def test_computation_exit_code(graph_file):
    code, _, err = _run("resreg", graph_file(), "--shrink", "3")
    assert code == 4
    assert "not internal" in err


def test_missing_file_and_bad_option(graph_file, capsys):
    assert _run("symanzik", "/nonexistent.graph")[0] == 1
    with pytest.raises(SystemExit) as info:
        run(["symanzik", graph_file(), "--format", "xml"])
    assert info.value.code == 1
    assert _run("corolla", graph_file(), "--ghost-order", "-1")[0] == 1


def test_rules_parse_error(graph_file, tmp_path):
    r = tmp_path / "bad.rules"
    r.write_text("rule 3 W,W = e\n")
    code, _, err = _run("ew-scalar", graph_file(), "--rules", str(r))
    assert code == 2
    assert "bad.rules:1:" in err


def test_module_entry_point(graph_file):
    proc = subprocess.run(
        [sys.executable, "-m", "gaugeparam", "symanzik", graph_file()],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("psi = A1 + A2")
