import csv
import json

import pytest

from morseforge import cli, serialize
from morseforge._rat import rat
from morseforge.poly import MultiPoly
from morseforge.synth import synthesize


def write_pointset(path, dimension, points):
    path.write_text(json.dumps({"dimension": dimension, "points": points}))
    return str(path)


@pytest.fixture
def two_point_bundle(tmp_path):
    pts = write_pointset(tmp_path / "pts.json", 2, [["-1/2", "0"], ["1/2", "1/4"]])
    bundle = tmp_path / "bundle.json"
    assert cli.main(["synthesize", "-i", pts, "-o", str(bundle)]) == 0
    return bundle


class TestSynthesize:
    def test_round_trip_bit_exact(self, two_point_bundle):
        obj = json.loads(two_point_bundle.read_text())
        parsed = serialize.parse_bundle(obj)
        again = serialize.bundle_obj(synthesize(parsed.pointset))
        assert json.dumps(obj, sort_keys=True) == json.dumps(again, sort_keys=True)

    def test_dimension_one_rejected(self, tmp_path):
        pts = write_pointset(tmp_path / "pts.json", 1, [["0"]])
        assert cli.main(["synthesize", "-i", pts]) == 3

    def test_malformed_json_rejected(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli.main(["synthesize", "-i", str(bad)]) == 2

    def test_missing_file_rejected(self, tmp_path):
        assert cli.main(["synthesize", "-i", str(tmp_path / "nope.json")]) == 2

    def test_duplicate_points_rejected(self, tmp_path):
        pts = write_pointset(tmp_path / "pts.json", 2, [["0", "1"], ["0", "1"]])
        assert cli.main(["synthesize", "-i", pts]) == 3


class TestVerify:
    def test_fresh_bundle_passes(self, two_point_bundle, tmp_path):
        report = tmp_path / "report.json"
        code = cli.main(["verify", "-i", str(two_point_bundle),
                         "-o", str(report), "--seeds-per-axis", "30"])
        assert code == 0
        obj = json.loads(report.read_text())
        assert obj["overall_pass"] is True
        assert obj["grad_field_consistent"] is True
        assert obj["minors_match_bundle"] is True

    def test_tampered_polynomial_fails(self, two_point_bundle, tmp_path):
        obj = json.loads(two_point_bundle.read_text())
        p = MultiPoly.from_obj(obj["p"]) + MultiPoly.variable(2, 0)
        obj["p"] = p.to_obj()
        bad = tmp_path / "tampered.json"
        bad.write_text(json.dumps(obj))
        code = cli.main(["verify", "-i", str(bad),
                         "-o", str(tmp_path / "r.json"), "--seeds-per-axis", "30"])
        assert code == 1

    def test_flipped_minor_fails(self, two_point_bundle, tmp_path):
        obj = json.loads(two_point_bundle.read_text())
        first = obj["minors"][0][0]
        obj["minors"][0][0] = "-" + first if not first.startswith("-") else first[1:]
        bad = tmp_path / "flipped.json"
        bad.write_text(json.dumps(obj))
        code = cli.main(["verify", "-i", str(bad),
                         "-o", str(tmp_path / "r.json"), "--seeds-per-axis", "30"])
        assert code == 1

    def test_wrong_schema_rejected(self, two_point_bundle, tmp_path):
        obj = json.loads(two_point_bundle.read_text())
        obj["schema"] = "something-else"
        bad = tmp_path / "schema.json"
        bad.write_text(json.dumps(obj))
        assert cli.main(["verify", "-i", str(bad)]) == 2

    def test_box_override_arity_checked(self, two_point_bundle, tmp_path):
        code = cli.main(["verify", "-i", str(two_point_bundle),
                         "--box=-1,1"])
        assert code == 2


class TestFlow:
    def test_descent_converges(self, two_point_bundle, tmp_path):
        out = tmp_path / "trace.json"
        code = cli.main(["flow", "-i", str(two_point_bundle),
                         "-o", str(out), "--start", "0.4,0.2",
                         "--dt", "0.01"])
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["classified"] == "converged_to"
        assert obj["converged_index"] in (0, 1)

    def test_far_start_rejected(self, two_point_bundle):
        code = cli.main(["flow", "-i", str(two_point_bundle),
                         "--start", "1000,1000"])
        assert code == 2

    def test_wrong_arity_rejected(self, two_point_bundle):
        code = cli.main(["flow", "-i", str(two_point_bundle),
                         "--start", "0.1"])
        assert code == 2


class TestSaddleField:
    def test_output_schema(self, tmp_path):
        pts = write_pointset(tmp_path / "pts.json", 2, [["-1", "0"], ["1", "0"]])
        out = tmp_path / "sf.json"
        assert cli.main(["saddle-field", "-i", pts, "-o", str(out)]) == 0
        obj = json.loads(out.read_text())
        assert obj["schema"] == "morseforge-saddle-field-v1"
        assert obj["stable_set"] == ["-1", "1"]
        assert obj["saddle_set"] == ["0"]
        # gamma = x - x^3 for stable set {-1, 1} with midpoint saddle 0
        gamma = MultiPoly.from_obj(obj["gamma"])
        x = MultiPoly.variable(1, 0)
        assert gamma == x - x ** 3

    def test_dimension_one_rejected(self, tmp_path):
        pts = write_pointset(tmp_path / "pts.json", 1, [["0"]])
        assert cli.main(["saddle-field", "-i", pts]) == 3


class TestExportGrid:
    def test_csv_shape_and_values(self, two_point_bundle, tmp_path):
        out = tmp_path / "grid.csv"
        code = cli.main(["export-grid", "-i", str(two_point_bundle),
                         "-o", str(out), "--resolution", "8",
                         "--t-max", "50"])
        assert code == 0
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "y", "P", "basin_label"]
        assert len(rows) == 1 + 64
        bundle = serialize.parse_bundle(json.loads(two_point_bundle.read_text()))
        for x, y, v, lab in rows[1:]:
            assert float(v) == bundle.p.eval_float([float(x), float(y)])
            assert int(lab) in (-1, 0, 1)

    def test_small_resolution_rejected(self, two_point_bundle):
        code = cli.main(["export-grid", "-i", str(two_point_bundle),
                         "--resolution", "4"])
        assert code == 2

    def test_higher_dimension_unsupported(self, tmp_path):
        pts = write_pointset(tmp_path / "pts.json", 3,
                             [["0", "0", "0"], ["1", "0", "0"]])
        bundle = tmp_path / "b3.json"
        assert cli.main(["synthesize", "-i", pts, "-o", str(bundle)]) == 0
        code = cli.main(["export-grid", "-i", str(bundle),
                         "-o", str(tmp_path / "g.csv"), "--resolution", "8"])
        assert code == 4


class TestSeedPlumbing:
    def test_env_seed_lands_in_report(self, two_point_bundle, tmp_path, monkeypatch):
        monkeypatch.setenv("MORSEFORGE_SEED", "42")
        report = tmp_path / "report.json"
        code = cli.main(["verify", "-i", str(two_point_bundle),
                         "-o", str(report), "--seeds-per-axis", "30"])
        assert code == 0
        assert json.loads(report.read_text())["seed"] == 42
