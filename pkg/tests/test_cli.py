import io
import json
import subprocess
import sys

import pytest

from helpers import DATA
from probe_interval.cli import bench_instance, main, parse_sizes, run_bench
from probe_interval.errors import InvalidInput

PX = "p p\nn x\ne p x\n"
NEGATIVE = "p a\np b\np c\np d\nn x\ne a b\ne b c\ne c d\ne a x\ne c x\n"


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_recognize_single_edge(write, capsys):
    code, out, _ = run(["recognize", write("px.graph", PX)], capsys)
    assert code == 0
    assert "accepted: 1 columns" in out


def test_recognize_json(write, capsys):
    code, out, _ = run(["recognize", write("px.graph", PX), "--json", "--unique", "--verify"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["verdict"] == "accepted"
    assert data["columns"] == [{"index": 0, "class": "clique", "vertices": ["p", "x"]}]
    assert data["unique"] is True and data["failing_test"] is None and data["verified"] is True


def test_recognize_rejects(write, capsys):
    path = write("neg.graph", NEGATIVE)
    code, out, _ = run(["recognize", path], capsys)
    assert code == 1 and out.startswith("rejected at ")
    code, out, _ = run(["recognize", path, "--json"], capsys)
    data = json.loads(out)
    assert code == 1 and data["verdict"] == "rejected"
    assert set(data["reject"]) == {"stage", "detail"}


def test_recognize_unique_text(capsys):
    code, out, _ = run(["recognize", str(DATA / "five_cliques.graph"), "--unique"], capsys)
    assert code == 0
    assert "uniqueness: not unique (test A" in out


def test_recognize_stdin(monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO(PX))
    code, out, _ = run(["recognize", "-"], capsys)
    assert code == 0


def test_input_errors(write, capsys):
    code, _, err = run(["recognize", write("bad.graph", "n x\nn y\ne x y\n")], capsys)
    assert code == 2 and "probe-interval:" in err
    code, _, err = run(["recognize", "/nonexistent/file.graph"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    capsys.readouterr()


def test_json_round_trips_through_verify(write, capsys):
    graph = str(DATA / "bound_pairs.graph")
    code, out, _ = run(["recognize", graph, "--json"], capsys)
    model = write("m.json", out)
    code, out, _ = run(["verify", graph, model], capsys)
    assert code == 0 and out.strip() == "valid normal model"


def test_verify_normal_and_non_taut(capsys):
    graph = str(DATA / "taut.graph")
    code, out, _ = run(["verify", graph, str(DATA / "taut_normal.json")], capsys)
    assert (code, out.strip()) == (0, "valid normal model")
    code, out, _ = run(["verify", graph, str(DATA / "taut_reordered.json")], capsys)
    assert (code, out.strip()) == (0, "valid model, not normal")


def test_verify_invalid(write, capsys):
    model = write("m.json", json.dumps({"columns": [
        {"index": 0, "class": "clique", "vertices": ["p"]},
        {"index": 1, "class": "clique", "vertices": ["x"]}]}))
    code, out, _ = run(["verify", write("px.graph", PX), model], capsys)
    assert code == 1 and out.startswith("invalid")
    code, _, _ = run(["verify", write("px2.graph", PX), write("junk.json", "{")], capsys)
    assert code == 2


def test_gen_then_recognize(write, tmp_path, capsys):
    model_path = str(tmp_path / "gen.json")
    code, out, _ = run(["gen", "--seed", "7", "--probes", "15", "--nonprobes", "8",
                        "--model", model_path], capsys)
    assert code == 0 and out.startswith("# seed 7 probes 15 nonprobes 8")
    graph = write("gen.graph", out)
    code, out, _ = run(["recognize", graph, "--verify"], capsys)
    assert code == 0 and "verify: passed" in out
    code, out, _ = run(["verify", graph, model_path], capsys)
    assert out.strip() == "valid normal model"


def test_gen_requires_seed(capsys):
    with pytest.raises(SystemExit):
        main(["gen"])
    capsys.readouterr()


def test_gen_refused_params(capsys):
    code, _, err = run(["gen", "--seed", "1", "--probes", "0"], capsys)
    assert code == 2 and err


def test_deterministic_output(write, capsys):
    outs = [run(["gen", "--seed", "3", "--probes", "30"], capsys)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    graph = write("g.graph", outs[0])
    a = run(["recognize", graph, "--json", "--unique"], capsys)[1]
    b = run(["recognize", graph, "--json", "--unique"], capsys)[1]
    assert a == b


def test_pq_subcommand(write, capsys):
    m = write("m.matrix", "rows 2 cols 3\nr1: a b\nr2: b c\norder: a b c\n")
    code, out, _ = run(["pq", m], capsys)
    assert code == 0 and out.splitlines() == ["Q(a b c)", "order: a b c"]
    code, out, _ = run(["pq", m, "--restrict", "a,c"], capsys)
    assert out.splitlines()[0] == "P(a c)"
    other = write("o.matrix", "rows 1 cols 3\nr: a c\norder: a b c\n")
    code, out, _ = run(["pq", m, "--intersect", other], capsys)
    assert code == 1 and out.strip() == "empty intersection"
    code, _, _ = run(["pq", m, "--restrict", "z"], capsys)
    assert code == 2
    bad = write("bad.matrix", "rows 3 cols 3\nr1: a b\nr2: b c\nr3: a c\norder: a b c\n")
    code, out, _ = run(["pq", bad], capsys)
    assert code == 1


def test_parse_sizes():
    assert parse_sizes("2^3..2^5") == [8, 16, 32]
    assert parse_sizes("4096, 2^13") == [4096, 8192]
    for bad in ("2^5..2^3", "abc", "1", ""):
        with pytest.raises(InvalidInput):
            parse_sizes(bad)


def test_bench_small(capsys):
    code, out, _ = run(["bench", "--sizes", "2^8..2^10", "--repeats", "1"], capsys)
    assert code == 0
    assert len(out.splitlines()) == 5
    assert "median doubling ratio" in out


def test_bench_instance_size():
    g = bench_instance(4096, 0)
    assert abs(g.n + g.m - 4096) <= 0.1 * 4096
    rows = run_bench([512, 1024], repeats=1)
    assert rows[0][4] is None and rows[1][4] > 0


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "probe_interval.cli", "recognize", "--help"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "--unique" in out.stdout
