import json

import numpy as np
import pytest

from ctxcomp import cli, embio, merge, realloc
from ctxcomp.core import pool_query

from randdata import unit_rows


def write_cemb(path, data, role=embio.ROLE_CONTEXT):
    embio.write_cemb(embio.EmbeddingMatrix(role, data), path)
    return str(path)


@pytest.fixture
def io_files(tmp_path, rng):
    ctx = write_cemb(tmp_path / "ctx.cemb", unit_rows(rng, 256, 64))
    qry = write_cemb(tmp_path / "q.cemb", unit_rows(rng, 8, 64), embio.ROLE_QUERY)
    return tmp_path, ctx, qry


class TestCompress:
    def test_shapes_and_manifest(self, io_files):
        tmp, ctx, qry = io_files
        out = tmp / "out.cemb"
        trace = tmp / "trace.json"
        rc = cli.main(
            ["compress", "--context", ctx, "--query", qry, "--rate", "32",
             "--out", str(out), "--trace", str(trace)]
        )
        assert rc == 0
        m = embio.read_cemb(out)
        assert m.data.shape == (8, 64)
        assert m.role == embio.ROLE_COMPRESSED
        manifest = json.loads((tmp / "out.cemb.manifest.json").read_text())
        assert manifest["command"] == "compress"
        assert len(manifest["inputs"]) == 2
        t = json.loads(trace.read_text())
        assert sum(t["sizes_after"]) == 256

    def test_matches_library_pipeline(self, io_files):
        tmp, ctx, qry = io_files
        out = tmp / "out.cemb"
        cli.main(["compress", "--context", ctx, "--query", qry, "--rate", "32",
                  "--out", str(out)])
        lib = merge.compress(
            embio.read_cemb(ctx), embio.read_cemb(qry),
            realloc.CompressionConfig(rate=32),
        )
        assert np.array_equal(embio.read_cemb(out).data, lib.tokens)

    def test_rate_zero_exit_2_names_flag(self, io_files, capsys):
        tmp, ctx, qry = io_files
        rc = cli.main(["compress", "--context", ctx, "--query", qry,
                       "--rate", "0", "--out", str(tmp / "o.cemb")])
        assert rc == 2
        assert "--rate" in capsys.readouterr().err

    def test_missing_file_exit_1(self, tmp_path, capsys):
        rc = cli.main(["compress", "--context", str(tmp_path / "nope.cemb"),
                       "--query", str(tmp_path / "nope2.cemb"),
                       "--rate", "4", "--out", str(tmp_path / "o.cemb")])
        assert rc == 1

    def test_deterministic_bytes(self, io_files):
        tmp, ctx, qry = io_files
        a, b = tmp / "a.cemb", tmp / "b.cemb"
        for out in (a, b):
            cli.main(["compress", "--context", ctx, "--query", qry,
                      "--rate", "16", "--out", str(out)])
        assert a.read_bytes() == b.read_bytes()

    def test_threads_do_not_change_output(self, io_files):
        tmp, ctx, qry = io_files
        a, b = tmp / "t1.cemb", tmp / "t4.cemb"
        cli.main(["compress", "--context", ctx, "--query", qry, "--rate", "16",
                  "--threads", "1", "--out", str(a)])
        cli.main(["compress", "--context", ctx, "--query", qry, "--rate", "16",
                  "--threads", "4", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestScore:
    def test_singleton_context(self, tmp_path, rng):
        ctx = write_cemb(tmp_path / "c.cemb", unit_rows(rng, 1, 8))
        qry = write_cemb(tmp_path / "q.cemb", unit_rows(rng, 1, 8), 1)
        out = tmp_path / "scores.json"
        assert cli.main(["score", "--context", ctx, "--query", qry,
                         "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert len(data["tokens"]) == 1
        assert data["tokens"][0]["redundancy"] == 0.0

    def test_group_gains_match_compress_trace(self, io_files):
        tmp, ctx, qry = io_files
        sc, tr = tmp / "s.json", tmp / "t.json"
        cli.main(["score", "--context", ctx, "--query", qry, "--rate", "32",
                  "--out", str(sc)])
        cli.main(["compress", "--context", ctx, "--query", qry, "--rate", "32",
                  "--out", str(tmp / "o.cemb"), "--trace", str(tr)])
        scored = json.loads(sc.read_text())["groups"]
        traced = json.loads(tr.read_text())["gains"]
        assert scored == traced


class TestEval:
    def test_auc_perfect(self, tmp_path):
        s = tmp_path / "s.json"
        l = tmp_path / "l.json"
        s.write_text(json.dumps([0.9, 0.8, 0.1]))
        l.write_text(json.dumps({"labels": [1, 1, 0]}))
        assert cli.main(["eval", "auc", "--scores", str(s), "--labels", str(l)]) == 0

    def test_auc_tie_fixture(self, tmp_path, capsys):
        s = tmp_path / "s.json"
        l = tmp_path / "l.json"
        s.write_text(json.dumps([0.3, 0.7, 0.7, 0.2]))
        l.write_text(json.dumps({"labels": [1, 0, 1, 0]}))
        cli.main(["eval", "auc", "--scores", str(s), "--labels", str(l)])
        assert json.loads(capsys.readouterr().out) == {"auc": 0.625}

    def test_auc_degenerate_exit_2(self, tmp_path):
        s = tmp_path / "s.json"
        l = tmp_path / "l.json"
        s.write_text(json.dumps([0.3, 0.7]))
        l.write_text(json.dumps({"labels": [1, 1]}))
        assert cli.main(["eval", "auc", "--scores", str(s), "--labels", str(l)]) == 2

    def test_redundancy_duplicate_rows(self, tmp_path, capsys):
        emb = write_cemb(tmp_path / "e.cemb", np.ones((2, 3), np.float32))
        cli.main(["eval", "redundancy", "--emb", emb])
        assert json.loads(capsys.readouterr().out) == {"redundancy": 1.0, "k": 2}

    def test_redundancy_with_retention(self, tmp_path, rng, capsys):
        emb = write_cemb(tmp_path / "e.cemb", unit_rows(rng, 8, 4))
        s = tmp_path / "s.json"
        s.write_text(json.dumps(list(range(8))))
        cli.main(["eval", "redundancy", "--emb", emb, "--scores", str(s),
                  "--ratio", "0.5"])
        assert json.loads(capsys.readouterr().out)["k"] == 4


class TestLab:
    def test_same_seed_identical_report(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"trials": 20, "n": 6, "k": 2,
                                   "family": "redundant-top"}))
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert cli.main(["lab", "--config", str(cfg), "--seed", "7",
                             "--out", str(out)]) == 0
        assert a.read_text() == b.read_text()

    def test_orthogonal_all_ties(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"trials": 15, "n": 5, "k": 2,
                                   "family": "orthogonal"}))
        out = tmp_path / "r.json"
        cli.main(["lab", "--config", str(cfg), "--seed", "3", "--out", str(out)])
        rep = json.loads(out.read_text())
        assert rep["ties"] == 15

    def test_default_config_win_rate(self, tmp_path):
        out = tmp_path / "r.json"
        assert cli.main(["lab", "--seed", "1", "--out", str(out),
                         "--summary-only"]) == 0
        rep = json.loads(out.read_text())
        assert rep["win_rate_when_differ"] is not None


class TestCost:
    def test_zero_answer_len(self, tmp_path, capsys):
        assert cli.main(["cost", "--context-len", "64", "--query-len", "8",
                         "--answer-len", "0", "--rate", "8",
                         "--dims", "toy"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["flops_generation_total"] > 0  # prefill only

    def test_7b_preset_speedup(self, capsys):
        cli.main(["cost", "--context-len", "8192", "--query-len", "64",
                  "--answer-len", "128", "--rate", "32", "--dims", "7b",
                  "--summary-only"])
        rep = json.loads(capsys.readouterr().out)
        assert rep["speedup_ratio"] > 2.0

    def test_invalid_dims_exit_2(self):
        assert cli.main(["cost", "--context-len", "64", "--query-len", "8",
                         "--answer-len", "4", "--rate", "8",
                         "--dims", "nosuchpreset"]) == 2

    def test_dims_file(self, tmp_path, capsys):
        dims = tmp_path / "dims.json"
        dims.write_text(json.dumps({"layers": 1, "d_model": 4, "d_ff": 8,
                                    "n_heads": 1, "vocab": 11}))
        assert cli.main(["cost", "--context-len", "8", "--query-len", "2",
                         "--answer-len", "2", "--rate", "4",
                         "--dims", str(dims), "--summary-only"]) == 0
