import json
import math
import os

import numpy as np
import pytest

from nclb.cli import main, run

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def fx(name):
    return os.path.join(FIXTURES, name)


class TestExitCodes:
    def test_check_algebra_pass(self):
        code, doc = run(["check-algebra", fx("h3.json")])
        assert code == 0
        assert doc["overall"] == "pass"

    def test_check_algebra_missing_file(self):
        code, doc = run(["check-algebra", "no/such/file.json"])
        assert code == 2
        assert "error" in doc

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        code, doc = run(["check-algebra", str(p)])
        assert code == 2

    def test_bad_bracket_data(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"dim": 2, "basis": ["a", "b"],
                                 "brackets": [{"i": 1, "j": 2, "c": {"9": "1"}}]}))
        code, doc = run(["check-algebra", str(p)])
        assert code == 2

    def test_failing_check_exits_one(self, tmp_path):
        p = tmp_path / "nonjacobi.json"
        p.write_text(json.dumps({
            "dim": 3, "basis": ["e1", "e2", "e3"],
            "brackets": [{"i": 1, "j": 2, "c": {"3": "1"}},
                         {"i": 1, "j": 3, "c": {"1": "1"}}],
        }))
        code, doc = run(["check-algebra", str(p)])
        assert code == 1
        assert doc["overall"] == "fail"

    def test_unknown_subcommand_usage_error(self, capsys):
        code, doc = run(["frobnicate"])
        assert code == 2

    def test_unknown_flag_usage_error(self):
        code, doc = run(["index", fx("h3.json"), "--bogus"])
        assert code == 2


class TestIndexCommand:
    def test_h3(self):
        code, doc = run(["index", fx("h3.json")])
        assert code == 0
        assert doc["checks"][0]["detail"]["index"] == 1

    def test_g47(self):
        code, doc = run(["index", fx("g47.json")])
        assert code == 0
        assert doc["checks"][0]["detail"]["index"] == 0

    def test_abelian(self):
        code, doc = run(["index", fx("abelian3.json"), "--trials", "8"])
        assert doc["checks"][0]["detail"]["index"] == 3


class TestCoisotropicCommand:
    def test_h3_null_center(self):
        code, doc = run(["coisotropic", fx("h3.json"),
                         "--form", fx("h3_null_center.json"), "--ideal", "1,3"])
        assert code == 0
        assert doc["checks"][0]["detail"]["verdict"] is True

    def test_g47_with_parameters(self):
        code, doc = run(["coisotropic", fx("g47.json"),
                         "--form", fx("g47_g1.json"), "--ideal", "1,2",
                         "--alpha", "1", "--beta", "1"])
        assert code == 0

    def test_unsubstituted_parameter_is_input_error(self):
        code, doc = run(["coisotropic", fx("g47.json"),
                         "--form", fx("g47_g1.json"), "--ideal", "1,2"])
        assert code == 2

    def test_non_coisotropic_pair_fails(self, tmp_path):
        p = tmp_path / "euclid.json"
        p.write_text(json.dumps({"matrix": [["1", "0", "0"],
                                            ["0", "1", "0"],
                                            ["0", "0", "1"]]}))
        code, doc = run(["coisotropic", fx("h3.json"), "--form", str(p),
                         "--ideal", "1,3"])
        assert code == 1


class TestModelCommands:
    def test_verify_heisenberg_check_names(self):
        code, doc = run(["model", "verify", "heisenberg"])
        assert code == 0
        names = [c["check"] for c in doc["checks"]]
        assert names == ["jacobi", "frames", "lambda_rep", "lift",
                         "reduced_first_order", "casimir"]

    def test_verify_g47(self):
        code, doc = run(["model", "verify", "g4_7"])
        assert code == 0
        names = [c["check"] for c in doc["checks"]]
        assert names[-1] == "coisotropy"

    def test_reduce_g47_prints_split(self):
        code, doc = run(["model", "reduce", "g4_7", "--J", "1", "--E", "1"])
        assert code == 0
        detail = doc["checks"][0]["detail"]
        assert detail["Z"] == ["q1 + (-1)*q2", "(-1)*q1"]
        assert "log(q2)" in detail["V"]

    def test_residual_mode(self):
        code, doc = run(["model", "residual", "heisenberg", "--psi", "mode",
                         "--mu", "1/2", "--nu", "1", "--E", "1",
                         "--grid", "x1=-1:1:3,x2=-1:1:3,x3=-1:1:3"])
        assert code == 0
        assert doc["checks"][0]["detail"]["symbolic_zero"] is True

    def test_residual_bad_grid(self):
        code, doc = run(["model", "residual", "heisenberg", "--psi", "mode",
                         "--grid", "y=0:1:oops"])
        assert code == 2

    def test_bad_model_parameters(self):
        code, doc = run(["model", "verify", "g4_7", "--alpha", "0", "--beta", "0"])
        assert code == 2

    def test_residual_field_csv(self, h3, tmp_path):
        # sample the closed-form mode on a uniform grid and feed it back
        from nclb.expr import compile_expr
        from nclb.models import mode_solution_h3
        from fractions import Fraction as F
        psi = mode_solution_h3(F(1, 2), F(1), F(1))
        f = compile_expr(psi, ["x1", "x2", "x3"])
        h = 0.05
        lines = ["x1,x2,x3,re,im"]
        rng = range(-4, 5)
        for i in rng:
            for j in rng:
                for k in rng:
                    v = f(i * h, j * h, k * h)
                    lines.append(f"{i * h},{j * h},{k * h},{v.real},{v.imag}")
        p = tmp_path / "field.csv"
        p.write_text("\n".join(lines))
        code, doc = run(["model", "residual", "heisenberg", "--psi", "file",
                         "--file", str(p), "--E", "1"])
        assert code == 0
        assert doc["checks"][0]["max_residual"] <= 1e-4

    def test_reconstruct(self, tmp_path):
        lines = ["k,J,re,im"]
        ks = np.linspace(-1.0, 1.0, 21)
        js = np.linspace(0.2, 1.8, 21)
        for k in ks:
            for j in js:
                v = math.exp(-((k) ** 2 + (j - 1.0) ** 2) / (2 * 0.2 ** 2))
                lines.append(f"{k},{j},{v},0.0")
        p = tmp_path / "phi.csv"
        p.write_text("\n".join(lines))
        out = tmp_path / "psi.csv"
        code, doc = run(["model", "reconstruct", "heisenberg", "--phi", str(p),
                         "--E", "1", "--grid", "x1=-0.4:0.4:3,x2=-0.4:0.4:3,x3=-0.4:0.4:3",
                         "--nodes", "48", "--out", str(out)])
        assert code == 0
        assert doc["checks"][0]["max_residual"] <= 1e-3
        body = out.read_text().splitlines()
        assert body[0] == "x1,x2,x3,re,im"
        assert len(body) == 1 + 27


class TestDeterminism:
    def test_byte_identical_json(self, capsys):
        main(["model", "verify", "heisenberg", "--json", "--seed", "11"])
        first = capsys.readouterr().out
        main(["model", "verify", "heisenberg", "--json", "--seed", "11"])
        second = capsys.readouterr().out
        assert first == second
        doc = json.loads(first)
        assert doc["seed"] == 11

    def test_seed_resolution_order(self, monkeypatch):
        monkeypatch.setenv("NCLB_SEED", "21")
        _, doc = run(["index", fx("h3.json")])
        assert doc["seed"] == 21
        _, doc = run(["index", fx("h3.json"), "--seed", "5"])
        assert doc["seed"] == 5  # flag wins over the environment
        monkeypatch.delenv("NCLB_SEED")
        _, doc = run(["index", fx("h3.json")])
        assert doc["seed"] == 0xC0FFEE

    def test_bad_env_seed(self, monkeypatch):
        monkeypatch.setenv("NCLB_SEED", "pony")
        code, doc = run(["index", fx("h3.json")])
        assert code == 2
