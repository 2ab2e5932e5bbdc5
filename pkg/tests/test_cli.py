import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from kanext import cli
from kanext.prob import Dist, shannon_entropy
from kanext.quantum import complex_matrix_to_json


def output_schema():
    text = resources.files("kanext").joinpath("schemas/cli_output.schema.json").read_text()
    return json.loads(text)


SCHEMA = output_schema()


def run_main(tmp_path, cfg, argv_extra=()):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(["--config", str(path), *argv_extra])
    return code, buf.getvalue()


def run_and_validate(tmp_path, cfg, argv_extra=()):
    code, out = run_main(tmp_path, cfg, argv_extra)
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return code, doc, out


def density_json(diagonal):
    return complex_matrix_to_json(np.diag(diagonal).astype(complex))


def bell_json():
    amp = 1 / np.sqrt(2)
    return {"state": [[amp, 0], [0, 0], [0, 0], [amp, 0]], "dims": [2, 2]}


def product_json():
    return {"state": [[1, 0], [0, 0], [0, 0], [0, 0]], "dims": [2, 2]}


class TestReach:
    def test_toward_uniform(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "reach",
            "theory": "rand_uniform",
            "source": [0.7, 0.3],
            "target": [0.5, 0.5],
        })
        assert code == 0
        assert doc["reachable"] is True
        assert doc["exact"] is True

    def test_away_from_uniform(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "reach",
            "theory": "rand_uniform",
            "source": [0.5, 0.5],
            "target": [0.7, 0.3],
        })
        assert code == 0  # unreachable is still a successful run
        assert doc["reachable"] is False

    def test_bell_to_product(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "reach",
            "theory": "purebip_locc",
            "source": bell_json(),
            "target": product_json(),
        })
        assert code == 0
        assert doc["reachable"] is True

    def test_detmn_witness_serialized(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "reach",
            "theory": "rand_detmn",
            "source": [0.5, 0.5],
            "target": [1.0],
        })
        assert code == 0
        assert doc["witness"] == [[1.0], [1.0]]


class TestExtend:
    def test_spectral_candidates_coincide(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "extend",
            "theory": "qrand_quniform",
            "functor": "classical_to_quantum",
            "monotone": "shannon",
            "variance": "covariant",
            "target": density_json([0.5, 0.5]),
            "candidates": {"kind": "spectral"},
        })
        assert code == 0
        assert doc["minimal"]["value"] == pytest.approx(1.0)
        assert doc["maximal"]["value"] == pytest.approx(1.0)
        assert doc["minimal"]["exact"] is True

    def test_empty_candidates_contravariant(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "extend",
            "theory": "rand_uniform",
            "functor": "identity",
            "monotone": "shannon",
            "variance": "contravariant",
            "target": [0.5, 0.5],
            "candidates": {"kind": "explicit", "objects": []},
        })
        assert code == 0
        assert doc["minimal"]["value"] == 0
        assert doc["maximal"]["value"] == "inf"

    def test_schmidt_at_bell_target(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "extend",
            "theory": "purebip_locc",
            "functor": "identity",
            "monotone": "schmidt",
            "variance": "contravariant",
            "target": bell_json(),
            "candidates": {"kind": "explicit", "objects": [product_json(), bell_json()]},
        })
        assert code == 0
        assert doc["minimal"]["value"] == 2.0
        assert doc["maximal"]["value"] == 2.0

    def test_grid_candidates(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "extend",
            "theory": "qrand_quniform",
            "functor": "classical_to_quantum",
            "monotone": "shannon",
            "variance": "covariant",
            "target": density_json([0.9, 0.1]),
            "candidates": {"kind": "grid", "step": 0.05, "length": 2},
        })
        assert code == 0
        assert doc["candidates"] == 21
        assert doc["maximal"]["value"] == pytest.approx(
            shannon_entropy(Dist([0.9, 0.1])), abs=1e-9
        )

    def test_grid_step_range_enforced(self, tmp_path):
        code, out = run_main(tmp_path, {
            "command": "extend",
            "theory": "rand_uniform",
            "functor": "identity",
            "monotone": "shannon",
            "variance": "covariant",
            "target": [0.5, 0.5],
            "candidates": {"kind": "grid", "step": 0.5, "length": 2},
        })
        assert code == 2

    def test_spectral_candidates_need_classical_source(self, tmp_path):
        code, _ = run_main(tmp_path, {
            "command": "extend",
            "theory": "qrand_quniform",
            "functor": "identity",
            "monotone": "spectral_entropy",
            "variance": "covariant",
            "target": density_json([0.5, 0.5]),
            "candidates": {"kind": "spectral"},
        })
        assert code == 2

    def test_monotone_kind_mismatch(self, tmp_path):
        code, _ = run_main(tmp_path, {
            "command": "extend",
            "theory": "rand_uniform",
            "functor": "identity",
            "monotone": "schmidt",
            "variance": "contravariant",
            "target": [0.5, 0.5],
            "candidates": {"kind": "explicit", "objects": [[0.5, 0.5]]},
        })
        assert code == 2

    def test_identity_functor_on_quantum_theory(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "extend",
            "theory": "qrand_quniform",
            "functor": "identity",
            "monotone": "spectral_entropy",
            "variance": "covariant",
            "target": density_json([0.75, 0.25]),
            "candidates": {
                "kind": "explicit",
                "objects": [density_json([0.75, 0.25]), density_json([0.5, 0.5])],
            },
        })
        assert code == 0
        h = shannon_entropy(Dist([0.75, 0.25]))
        assert doc["minimal"]["value"] == pytest.approx(h)
        assert doc["maximal"]["value"] == pytest.approx(h)


class TestVerify:
    @pytest.mark.parametrize("prop,extra", [
        ("reduction", {"samples": 10}),
        ("monotonicity", {"samples": 10, "length": 2, "step": 0.1}),
        ("optimality", {"samples": 10}),
        ("hlp_agreement", {"length": 2, "step": 0.1}),
        ("data_processing", {"samples": 20}),
        ("coincidence", {"samples": 4}),
    ])
    def test_properties_pass(self, tmp_path, prop, extra):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "verify",
            "property": prop,
            "seed": 7,
            **extra,
        })
        assert code == 0
        assert doc["passed"] is True
        assert doc["violations"] == []

    def test_quantum_monotonicity(self, tmp_path):
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "verify",
            "property": "monotonicity",
            "theory": "qrand_quniform",
            "samples": 5,
            "length": 2,
            "step": 0.1,
            "seed": 3,
        })
        assert code == 0
        assert doc["passed"] is True

    def test_violation_exits_one(self, tmp_path, monkeypatch):
        monkeypatch.setitem(
            cli._VERIFIERS,
            "optimality",
            lambda cfg, rng: {"passed": False, "checked": 1, "violations": ["boom"]},
        )
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "verify",
            "property": "optimality",
        })
        assert code == 1
        assert doc["passed"] is False

    def test_unknown_property(self, tmp_path):
        code, _ = run_main(tmp_path, {"command": "verify", "property": "nope"})
        assert code == 2


class TestLorenz:
    def test_single_curve(self, tmp_path):
        out = tmp_path / "curve.csv"
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "lorenz",
            "distributions": [[0.7, 0.3]],
            "out": str(out),
        })
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "x,y"
        assert len(lines) == 4  # header plus three knots

    def test_uniform_diagonal_knots(self, tmp_path):
        out = tmp_path / "u.csv"
        run_and_validate(tmp_path, {
            "command": "lorenz",
            "distributions": [[0.25, 0.25, 0.25, 0.25]],
            "out": str(out),
        })
        rows = [line.split(",") for line in out.read_text().strip().split("\n")[1:]]
        for x, y in rows:
            assert float(x) == pytest.approx(float(y))

    def test_pair_mode_appends_dominance_comment(self, tmp_path):
        out = tmp_path / "pair.csv"
        code, doc, _ = run_and_validate(tmp_path, {
            "command": "lorenz",
            "distributions": [[0.7, 0.3], [0.5, 0.5]],
            "out": str(out),
        })
        assert code == 0
        text = out.read_text()
        assert "# q_majorized_by_p: true" in text
        assert text.count("x,y") == 2
        assert doc["q_majorized_by_p"] is True


class TestUsageErrors:
    def test_missing_key(self, tmp_path):
        code, _ = run_main(tmp_path, {"command": "reach", "theory": "rand_uniform"})
        assert code == 2

    def test_unknown_command(self, tmp_path):
        code, _ = run_main(tmp_path, {"command": "nope"})
        assert code == 2

    def test_unknown_theory(self, tmp_path):
        code, _ = run_main(tmp_path, {
            "command": "reach", "theory": "nope", "source": [1], "target": [1],
        })
        assert code == 2

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        import io
        from contextlib import redirect_stdout

        with redirect_stdout(io.StringIO()):
            assert cli.main(["--config", str(path)]) == 2

    def test_bad_object(self, tmp_path):
        code, _ = run_main(tmp_path, {
            "command": "reach",
            "theory": "rand_uniform",
            "source": [0.7, 0.9],
            "target": [0.5, 0.5],
        })
        assert code == 2


class TestDeterminism:
    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = {
            "command": "verify",
            "property": "coincidence",
            "samples": 3,
            "seed": 11,
        }
        _, first = run_main(tmp_path, cfg)
        _, second = run_main(tmp_path, cfg)
        assert first == second

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg = {
            "command": "verify",
            "property": "data_processing",
            "samples": 5,
            "seed": 1,
        }
        code, doc, _ = run_and_validate(tmp_path, cfg, argv_extra=["--seed", "99"])
        assert code == 0

    def test_out_flag_overrides_config(self, tmp_path):
        cfg = {
            "command": "lorenz",
            "distributions": [[0.7, 0.3]],
            "out": str(tmp_path / "ignored.csv"),
        }
        target = tmp_path / "flag.csv"
        code, doc, _ = run_and_validate(tmp_path, cfg, argv_extra=["--out", str(target)])
        assert code == 0
        assert target.exists()
        assert not (tmp_path / "ignored.csv").exists()


class TestEntryPoint:
    def test_module_invocation_with_stdin(self, tmp_path):
        cfg = json.dumps({
            "command": "reach",
            "theory": "rand_uniform",
            "source": [0.7, 0.3],
            "target": [0.5, 0.5],
        })
        proc = subprocess.run(
            [sys.executable, "-m", "kanext.cli", "--config", "-"],
            input=cfg,
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        doc = json.loads(proc.stdout)
        jsonschema.validate(doc, SCHEMA)
        assert doc["reachable"] is True
