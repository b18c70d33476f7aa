import io as io_module
import json

import numpy as np
import pytest

from seblab import io as seblab_io
from seblab.cli import main
from seblab.errors import ValidationError
from seblab.geometry import Instance


LENS = {"dimension": 2,
        "balls": [{"center": [-1.0, 0.0], "radius": 2.0 ** 0.5},
                  {"center": [1.0, 0.0], "radius": 2.0 ** 0.5}]}
EXAMPLE = {"dimension": 2,
           "balls": [{"center": [0.0, 1.0], "radius": 1.0},
                     {"center": [1.0, 0.0], "radius": 1.0}],
           "target": {"center": [1.0, 1.0], "radius": 2.0 ** 0.5}}
DISJOINT = {"dimension": 2,
            "balls": [{"center": [-5.0, 0.0], "radius": 1.0},
                      {"center": [5.0, 0.0], "radius": 1.0}]}
UNSUPPORTED = {"dimension": 2,
               "balls": [{"center": [1.0, 0.0], "radius": 2.0},
                         {"center": [0.0, 1.0], "radius": 2.0},
                         {"center": [1.0, 1.0], "radius": 2.0}]}


def run_cli(args):
    buf = io_module.StringIO()
    code = main(args, out=buf)
    return code, buf.getvalue()


def write_doc(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestSolveCommand:
    def test_lens_report(self, tmp_path):
        path = write_doc(tmp_path, "lens.json", LENS)
        code, text = run_cli(["solve", path, "--verify", "200"])
        assert code == 0
        report = json.loads(text)
        assert report["status"] == "CertifiedOptimal"
        assert report["radius"] == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(report["center"], [0.0, 0.0], atol=1e-10)
        assert np.allclose(report["multipliers"], [0.5, 0.5], atol=1e-10)
        assert report["regime"]["regime"] == "ConvexCase"
        assert report["certificate"]["psd_ok"] is True
        assert report["diagnostics"]["max_containment_violation"] == 0.0
        assert report["diagnostics"]["identity_residual_max"] < 1e-9

    def test_disjoint_exit_code(self, tmp_path):
        path = write_doc(tmp_path, "disjoint.json", DISJOINT)
        code, text = run_cli(["solve", path])
        assert code == 2
        report = json.loads(text)
        assert report["status"] == "EmptyInterior"
        assert report["radius"] == 0.0

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, text = run_cli(["solve", str(path)])
        assert code == 1
        assert "error" in json.loads(text)

    def test_unknown_field_rejected(self, tmp_path):
        doc = dict(LENS, solver_hint="fast")
        path = write_doc(tmp_path, "extra.json", doc)
        code, text = run_cli(["solve", path])
        assert code == 1
        assert "solver_hint" in json.loads(text)["error"]

    def test_missing_file(self, tmp_path):
        code, text = run_cli(["solve", str(tmp_path / "nope.json")])
        assert code == 1
        assert "error" in json.loads(text)

    def test_compact_single_line(self, tmp_path):
        path = write_doc(tmp_path, "lens.json", LENS)
        code, text = run_cli(["--compact", "solve", path])
        assert code == 0
        assert text.count("\n") == 1


class TestJnrCommand:
    def test_member_gap_point(self, tmp_path):
        path = write_doc(tmp_path, "example.json", EXAMPLE)
        code, text = run_cli(["jnr", path, "member", "--point", "1,0,0"])
        assert code == 0
        report = json.loads(text)
        assert report["in_range"] is False
        assert report["in_pair_hull"] is True
        assert report["hull_margin"] == pytest.approx(-0.5)

    def test_member_range_point(self, tmp_path):
        path = write_doc(tmp_path, "example.json", EXAMPLE)
        code, text = run_cli(["jnr", path, "member", "--point", "1,1,-1"])
        assert code == 0
        report = json.loads(text)
        assert report["in_range"] is True
        assert np.allclose(report["witness"], [1.0, 0.0], atol=1e-8)

    def test_member_requires_point(self, tmp_path):
        path = write_doc(tmp_path, "example.json", EXAMPLE)
        code, text = run_cli(["jnr", path, "member"])
        assert code == 1

    def test_member_bad_point(self, tmp_path):
        path = write_doc(tmp_path, "example.json", EXAMPLE)
        code, _ = run_cli(["jnr", path, "member", "--point", "1,zzz"])
        assert code == 1

    def test_sample_csv(self, tmp_path):
        path = write_doc(tmp_path, "lens.json", LENS)
        out_csv = tmp_path / "samples.csv"
        code, _ = run_cli(["jnr", path, "sample", "--count", "50",
                           "--out", str(out_csv)])
        assert code == 0
        lines = out_csv.read_text().strip().splitlines()
        assert lines[0] == "g0,g1,g2"
        assert len(lines) == 51
        rows = np.array([[float(v) for v in ln.split(",")]
                         for ln in lines[1:]])
        assert rows.shape == (50, 3)

    def test_probe_lens(self, tmp_path):
        path = write_doc(tmp_path, "lens.json", LENS)
        code, text = run_cli(["jnr", path, "probe", "--count", "500"])
        assert code == 0
        report = json.loads(text)
        assert report["regime"] == "ConvexCase"
        assert report["convexity"]["convex_evidence"] is True
        assert report["separation"]["implication_holds"] is True

    def test_probe_unsupported_regime(self, tmp_path):
        path = write_doc(tmp_path, "unsupported.json", UNSUPPORTED)
        code, text = run_cli(["jnr", path, "probe", "--count", "10"])
        assert code == 3
        assert "error" in json.loads(text)

    def test_target_needed_for_disjoint(self, tmp_path):
        path = write_doc(tmp_path, "disjoint.json", DISJOINT)
        code, _ = run_cli(["jnr", path, "member", "--point", "0,0,0"])
        assert code == 1


class TestOracleCommand:
    def test_lens(self, tmp_path):
        path = write_doc(tmp_path, "lens.json", LENS)
        code, text = run_cli(["oracle", path, "--grid", "100",
                              "--cloud", "500"])
        assert code == 0
        report = json.loads(text)
        assert report["solver"]["qp_value"] == pytest.approx(1.0, abs=1e-10)
        assert report["grid_oracle"]["value"] >= report["solver"]["qp_value"]
        g = report["grid_min_maxg"]
        assert abs(g["value"] - g["minus_qp_value"]) <= g["bound"]
        assert report["cloud_meb"]["radius"] <= report["solver"]["radius"] * (
            1 + 1e-3)


class TestRankCommand:
    def test_classifications(self, tmp_path):
        for doc, regime in ((LENS, "ConvexCase"),
                            (UNSUPPORTED, "Unsupported")):
            path = write_doc(tmp_path, "inst.json", doc)
            code, text = run_cli(["rank", path])
            assert code == 0
            assert json.loads(text)["regime"] == regime


class TestIoRoundTrip:
    def test_instance_doc_round_trip(self):
        inst, target = seblab_io.parse_instance(EXAMPLE)
        assert isinstance(inst, Instance) and target is not None
        doc = seblab_io.instance_to_doc(inst, target)
        inst2, target2 = seblab_io.parse_instance(doc)
        assert np.array_equal(inst2.centers_matrix(), inst.centers_matrix())
        assert np.array_equal(inst2.radii(), inst.radii())
        assert target2.radius == target.radius
        assert seblab_io.instance_to_doc(inst2, target2) == doc

    def test_bad_ball_field(self):
        doc = {"dimension": 2,
               "balls": [{"center": [0.0, 0.0], "radius": 1.0, "color": "red"}]}
        with pytest.raises(ValidationError):
            seblab_io.parse_instance(doc)

    def test_dimension_must_be_int(self):
        doc = {"dimension": 2.0, "balls": [{"center": [0.0, 0.0],
                                            "radius": 1.0}]}
        with pytest.raises(ValidationError):
            seblab_io.parse_instance(doc)
