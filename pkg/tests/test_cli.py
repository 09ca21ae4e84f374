import json
import subprocess
import sys

import pytest

from cospectral.census import CensusReport, MatePair
from cospectral.cli import render_report, run
from cospectral.graph import enumerate_graphs, write_graph6_file


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCensus:
    def test_order_seven(self, capsys):
        code, out, _ = call(capsys, "census", "--n", "7", "--jobs", "1")
        assert code == 0
        assert out.splitlines() == ["n,classes,controllable,pairs,l_max,h_max", "7,1044,92,0,NaN,NaN"]

    def test_order_eight_files(self, tmp_path, capsys):
        target = tmp_path / "r8.csv"
        code, _, _ = call(capsys, "census", "--n", "8", "--output", str(target))
        assert code == 0
        assert target.read_text().splitlines()[1] == "8,12346,2332,108,3,3"
        dump = json.loads((tmp_path / "r8.pairs.json").read_text())
        assert dump["n"] == 8 and len(dump["pairs"]) == 108
        for rec in dump["pairs"]:
            assert all("/" in x for row in rec["q"] for x in row)
            assert MatePair.from_json(rec).verify()

    def test_deterministic_bytes(self, tmp_path, capsys):
        outs = []
        for jobs in ("1", "3"):
            target = tmp_path / f"r{jobs}.csv"
            assert call(capsys, "census", "--n", "8", "--jobs", jobs, "--output", str(target))[0] == 0
            outs.append((target.read_bytes(), target.with_suffix(".pairs.json").read_bytes()))
        assert outs[0] == outs[1]

    def test_stream_pairs(self, tmp_path, capsys):
        target = tmp_path / "r8.csv"
        assert call(capsys, "census", "--n", "8", "--stream-pairs", "--output", str(target))[0] == 0
        assert target.read_text().splitlines()[1] == "8,12346,2332,108,3,3"
        lines = (tmp_path / "r8.pairs.jsonl").read_text().splitlines()
        assert len(lines) == 108
        assert all(MatePair.from_json(json.loads(x)).verify() for x in lines[:10])
        assert call(capsys, "census", "--n", "8", "--stream-pairs")[0] == 2

    def test_env_jobs(self, monkeypatch, capsys):
        monkeypatch.setenv("COSPECTRAL_CENSUS_JOBS", "2")
        assert call(capsys, "census", "--n", "6")[1].endswith("6,156,8,0,NaN,NaN\n")

    def test_merge(self, tmp_path, capsys):
        gs = list(enumerate_graphs(8))
        a, b = tmp_path / "a.g6", tmp_path / "b.g6"
        write_graph6_file(a, gs[:5000])
        write_graph6_file(b, gs[5000:])
        for src in (a, b):
            code, _, _ = call(capsys, "census", "--n", "8", "--input", str(src), "--emit-shard",
                              "--output", str(src.with_suffix(".json")))
            assert code == 0
        merged = tmp_path / "m.csv"
        code, _, _ = call(capsys, "census", "--merge", str(a.with_suffix(".json")), str(b.with_suffix(".json")),
                          "--output", str(merged))
        assert code == 0
        single = tmp_path / "s.csv"
        assert call(capsys, "census", "--n", "8", "--input", str(a), str(b), "--output", str(single))[0] == 0
        assert merged.read_bytes() == single.read_bytes()
        assert merged.with_suffix(".pairs.json").read_bytes() == single.with_suffix(".pairs.json").read_bytes()

    def test_order_mismatch_is_domain_error(self, tmp_path, capsys):
        f = tmp_path / "g5.g6"
        write_graph6_file(f, enumerate_graphs(5))
        code, _, err = call(capsys, "census", "--n", "6", "--input", str(f))
        assert code == 1 and "order 5" in err

    def test_missing_input_file(self, capsys):
        code, _, err = call(capsys, "census", "--n", "6", "--input", "/nonexistent.g6")
        assert code == 1 and err.count("\n") == 1


class TestRender:
    def test_nan(self):
        csv, pairs = render_report(CensusReport(5, 34, 0, 0, None, None))
        assert csv.splitlines()[1] == "5,34,0,0,NaN,NaN"
        assert json.loads(pairs) == {"n": 5, "pairs": []}

    def test_rejects_low_level(self, census8):
        p = census8.pairs[0]
        fake = object.__new__(MatePair)
        for k, v in vars(p).items():
            object.__setattr__(fake, k, v)
        object.__setattr__(fake, "level", 1)
        r = CensusReport(8, 1, 1, 1, 3, 3, [fake])
        with pytest.raises(ValueError):
            render_report(r)


class TestOtherCommands:
    def test_tail(self, capsys):
        code, out, _ = call(capsys, "tail", "--h", "2", "--p", "0.5", "--n", "1000000")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "n,h,p,log_tail" and len(lines) == 2
        assert float(lines[1].split(",")[3]) < 0

    def test_switch_primes(self, capsys):
        code, out, _ = call(capsys, "switch", "--primes", "4")
        assert code == 0 and out.splitlines()[-1] == "4,34,210,7"

    def test_switch_partition(self, capsys):
        code, out, _ = call(capsys, "switch", "--graph", "G?BDb_", "--partition", "[[0,1,2,4]]")
        rec = json.loads(out)
        assert code == 0 and rec["isomorphic"] is False and (rec["level"], rec["height"]) == (2, 2)

    def test_switch_search(self, capsys):
        code, out, _ = call(capsys, "switch", "--graph", "G?BDb_", "--max-block", "4")
        assert code == 0 and any(not r["isomorphic"] for r in json.loads(out)["partitions"])

    def test_switch_invalid_partition(self, capsys):
        assert call(capsys, "switch", "--graph", "C^", "--partition", "[[0,1,2,3]]")[0] == 1

    def test_canon(self, capsys):
        m = json.dumps([["1", "0", "0"], ["0", "3/5", "-4/5"], ["0", "4/5", "3/5"]])
        code, out, _ = call(capsys, "canon", "--matrix", m)
        rec = json.loads(out)
        assert code == 0 and (rec["s"], rec["h"]) == (2, 5)

    def test_enum_ortho(self, capsys):
        code, out, _ = call(capsys, "enum-ortho", "--s", "2", "--h", "5")
        rec = json.loads(out)
        assert code == 0 and rec["count"] == 16 and rec["bound"] == str(100 ** 50)
        assert call(capsys, "enum-ortho", "--s", "5", "--h", "2")[0] == 1

    def test_mc(self, capsys, tmp_path):
        argv = ["mc", "--n", "6", "--fixture", "gm4", "--p", "0.5", "--trials", "20000", "--seed", "3"]
        code, out, _ = call(capsys, *argv)
        header, row = out.splitlines()
        assert code == 0 and header == "n,s,h,p,trials,estimate,lo,hi,bound,exact"
        fields = row.split(",")
        assert fields[:5] == ["6", "4", "2", "0.5", "20000"] and float(fields[-1]) == 1 / 32
        assert call(capsys, *argv)[1] == out

    def test_mc_requires_seed(self, capsys):
        code, _, err = call(capsys, "mc", "--n", "6", "--p", "0.5", "--trials", "10")
        assert code == 2 and "--seed" in err

    def test_mc_trial_guard(self, capsys):
        code, _, err = call(capsys, "mc", "--n", "6", "--p", "0.5", "--trials", str(10**9), "--seed", "1")
        assert code == 2 and "--trials" in err

    def test_codec(self, capsys, tmp_path):
        code, out, _ = call(capsys, "codec", "A_", "A?", "B?")
        assert code == 0 and out.splitlines()[1:] == ["A_,2,1,A_", "A?,2,0,A?", "B?,3,0,B?"]
        assert call(capsys, "codec", "A`")[0] == 1
        dump = tmp_path / "g5.g6"
        assert call(capsys, "codec", "--n", "5", "--output", str(dump))[0] == 0
        assert len(dump.read_text().splitlines()) == 34

    def test_usage_errors(self, capsys):
        assert call(capsys, "bogus")[0] == 2
        assert call(capsys, "census", "--frobnicate")[0] == 2
        code, _, err = call(capsys, "census")
        assert code == 2 and "--n" in err
        code, _, err = call(capsys, "tail", "--h", "2")
        assert code == 2 and "--n" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cospectral", "census", "--n", "5"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[-1] == "5,34,0,0,NaN,NaN"
