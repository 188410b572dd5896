import copy
import csv
import json
from pathlib import Path

import pytest

from antidual_lab import DivergenceCertificate, check_certificate
from antidual_lab.runner import ConfigError, build_functionals, build_space, main, run, validate

CONFIGS = Path(__file__).resolve().parent.parent / "demos" / "configs"


def load(name):
    return json.loads((CONFIGS / name).read_text())


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestValidate:
    def test_shipped_configs_are_valid(self):
        for path in sorted(CONFIGS.glob("*.json")):
            assert validate(json.loads(path.read_text())) == [], path.name

    def test_zero_weight(self):
        cfg = load("pip_basel.json")
        cfg["space"]["weights"] = {"3": "0"}
        assert any("weights must be strictly positive" in d for d in validate(cfg))

    def test_unknown_functional(self):
        cfg = load("pip_basel.json")
        cfg["eta"] = "nope"
        assert any("unknown functional name 'nope'" in d for d in validate(cfg))

    def test_collects_every_problem(self):
        cfg = {"task": "bogus", "space": {"default_weight": "-1"}, "chain": {"steps": 0},
               "functionals": {"a": {"kind": "wat"}}}
        assert len(validate(cfg)) == 4

    def test_bad_tail_and_budget(self):
        cfg = load("pip_basel.json")
        cfg["functionals"]["xi"]["exponent"] = "0.4"
        cfg["chain"]["steps"] = -5
        diags = validate(cfg)
        assert any("integral" in d for d in diags) and any("budget" in d for d in diags)

    def test_run_refuses_invalid(self, tmp_path):
        with pytest.raises(ConfigError):
            run({"task": "pip"}, tmp_path)


class TestBuild:
    def test_decimal_strings_and_sums(self):
        cfg = {"space": {"default_weight": "2", "weights": {"3": "0.25"}},
               "functionals": {"a": {"kind": "constant", "value": "1+2j"},
                               "b": {"kind": "finite", "coeffs": {"2": "3"}},
                               "s": {"kind": "sum", "terms": [["2", "a"], ["-1j", "b"]]},
                               "m": {"kind": "alternating", "mask": {"kind": "odd"}}}}
        sp = build_space(cfg)
        assert sp.weight(3) == 0.25 and sp.weight(4) == 2
        f = build_functionals(cfg, sp)
        assert f["s"].coefficient(2) == 2 * (1 + 2j) - 3j
        assert f["m"].coefficient(2) == 0 and f["m"].coefficient(3) == 1


class TestTasks:
    def test_pip_basel(self, tmp_path):
        s = run(load("pip_basel.json"), tmp_path)
        assert s["verdict"] == "converged" and s["certified"]
        assert s["value"]["re"] == pytest.approx(1.644934, abs=1e-6)
        rows = read_csv(tmp_path / "trace.csv")
        assert list(rows[0]) == ["step", "dim", "re", "im", "bound"]
        assert int(rows[-1]["step"]) == s["steps"]
        assert float(rows[-1]["bound"]) == s["error_bound"]

    def test_pip_inconclusive_still_succeeds(self, tmp_path):
        cfg = {"functionals": {"o": {"kind": "constant"}}, "task": "pip", "xi": "o", "eta": "o",
               "chain": {"steps": 100}}
        assert run(cfg, tmp_path)["verdict"] == "inconclusive"
        cfg["k"] = 3
        assert run(cfg, tmp_path)["verdict"] == "diverged"

    def test_radius(self, tmp_path):
        s = run(load("radius.json"), tmp_path)
        assert s["value"] == pytest.approx(0.5) and s["u"]["support"] == [1, 2]

    def test_interval(self, tmp_path):
        s = run(load("interval.json"), tmp_path)
        lo, hi = s["interval"]
        assert lo == pytest.approx(-0.25) and hi == pytest.approx(0.75)
        assert lo - 1e-12 <= s["sample_min"] and s["sample_max"] <= hi + 1e-12

    def test_norm(self, tmp_path):
        s = run(load("norm_basel.json"), tmp_path)
        assert s["verdict"] == "certified" and s["value"] == pytest.approx(1.2825498, abs=1e-4)

    def test_split_contrast(self, tmp_path):
        s = run(load("split_contrast.json"), tmp_path)
        assert s["split"]["verdict"] == "converged" and s["split"]["value"] == {"re": 0.0, "im": 0.0}
        assert s["split"]["error_bound"] == 0 and s["valid"]
        split = read_csv(tmp_path / "trace_split.csv")
        assert all(float(r["re"]) == 0 == float(r["im"]) for r in split)
        cert = read_csv(tmp_path / "trace_certificate.csv")
        vals = [0.0] + [float(r["re"]) for r in cert]
        assert len(cert) == 10 and all(b - a >= 0.5 for a, b in zip(vals, vals[1:]))

    def test_trace(self, tmp_path):
        s = run(load("trace_even_odd_prefix.json"), tmp_path)
        rows = read_csv(tmp_path / "trace.csv")
        assert s["steps"] == 64 and len(rows) == 64
        # <(ev+od)_M | od_M> counts the odd indices among the first k
        assert [float(r["re"]) for r in rows[:5]] == [1, 1, 2, 2, 3]

    def test_certificate_round_trip(self, tmp_path):
        cfg = load("witness_all_ones.json")
        run(cfg, tmp_path)
        data = json.loads((tmp_path / "summary.json").read_text())
        assert data["valid"] and data["verdict"] == "diverged"
        cert = DivergenceCertificate.from_json(data["certificate"])
        sp = build_space(cfg)
        f = build_functionals(cfg, sp)
        assert len(cert) == 10 and check_certificate(sp, cert, f["ones"], f["ones"]) == []

    @pytest.mark.parametrize("name", ["split_contrast.json", "interval.json", "norm_basel.json", "witness_all_ones.json"])
    def test_byte_identical_reruns(self, tmp_path, name):
        cfg = load(name)
        run(copy.deepcopy(cfg), tmp_path / "a")
        run(copy.deepcopy(cfg), tmp_path / "b")
        for f in sorted((tmp_path / "a").iterdir()):
            assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


class TestMain:
    def test_exit_codes(self, tmp_path, capsys):
        good = CONFIGS / "radius.json"
        assert main(["radius", "--config", str(good), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "summary.json").exists()
        assert main(["validate", "--config", str(good)]) == 0

        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"space": {"weights": {"3": "0"}}, "x": {"1": "1"}, "y": {"2": "1"}}))
        assert main(["validate", "--config", str(bad)]) == 1
        assert "weights must be strictly positive" in capsys.readouterr().out
        assert main(["radius", "--config", str(bad), "--out", str(tmp_path)]) == 2
        assert main(["radius", "--config", str(tmp_path / "missing.json")]) == 2

    def test_runtime_error_exit(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"x": {"1": "2"}, "y": {"2": "1"}}))
        assert main(["radius", "--config", str(cfg), "--out", str(tmp_path)]) == 3

    def test_flags_override(self, tmp_path):
        cfg = CONFIGS / "pip_basel.json"
        assert main(["pip", "--config", str(cfg), "--out", str(tmp_path), "--steps", "50", "--tol", "1e-3"]) == 0
        s = json.loads((tmp_path / "summary.json").read_text())
        assert s["steps"] <= 50

    def test_seed_changes_samples(self, tmp_path):
        cfg = str(CONFIGS / "interval.json")
        main(["interval", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1"])
        main(["interval", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2"])
        a = json.loads((tmp_path / "a" / "summary.json").read_text())
        b = json.loads((tmp_path / "b" / "summary.json").read_text())
        assert a["sample_max"] != b["sample_max"] and a["interval"] == b["interval"]
