import json
from importlib import resources

import jsonschema
import pytest

from antcircles.cli import main
from antcircles.imageio import EdgeMap, load_edge_map, save_edge_map

from conftest import circles_map

SCHEMA = json.loads(resources.files("antcircles").joinpath("report.schema.json").read_text())


def run_json(capsys, *argv):
    assert main(list(argv)) == 0
    doc = json.loads(capsys.readouterr().out)
    return doc


@pytest.fixture
def pair_image(tmp_path, crossing_pair):
    path = tmp_path / "pair.pgm"
    save_edge_map(crossing_pair, path)
    return path


class TestDetect:
    def test_empty_image(self, tmp_path, capsys):
        save_edge_map(EdgeMap.empty(64, 64), tmp_path / "e.pgm")
        doc = run_json(capsys, "detect", str(tmp_path / "e.pgm"))
        jsonschema.validate(doc, SCHEMA)
        assert doc["hits"] == []
        assert doc["graph"]["edge_pixels"] == 0

    def test_two_circles(self, pair_image, capsys):
        doc = run_json(capsys, "detect", str(pair_image))
        jsonschema.validate(doc, SCHEMA)
        found = sorted((h["cx"], h["cy"], h["r"]) for h in doc["hits"])
        assert len(found) == 2
        for (cx, cy, r), (tx, ty, tr) in zip(found, [(103, 128, 40), (153, 128, 35)]):
            assert abs(cx - tx) <= 2 and abs(cy - ty) <= 2 and abs(r - tr) <= 2
        assert doc["graph"]["nodes"] == 2 and doc["graph"]["branches"] == 4
        assert doc["graph"]["cycles"] == 6 and not doc["graph"]["truncated"]

    def test_max_cycles_truncates(self, pair_image, capsys):
        doc = run_json(capsys, "detect", str(pair_image), "--max-cycles", "1")
        assert doc["graph"]["truncated"] is True
        assert doc["graph"]["cycles"] == 1

    def test_csv(self, pair_image, capsys):
        assert main(["detect", str(pair_image), "--format", "csv"]) == 0
        rows = capsys.readouterr().out.strip().splitlines()
        assert len(rows) == 2
        assert all(len(r.split(",")) == 5 for r in rows)

    def test_no_timing_is_byte_identical(self, pair_image, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["detect", str(pair_image), "--no-timing", "-o", str(a)]) == 0
        assert main(["detect", str(pair_image), "--no-timing", "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert set(json.loads(a.read_text())["timing"].values()) == {0.0}

    def test_batch(self, pair_image, tmp_path, capsys):
        save_edge_map(EdgeMap.empty(32, 32), tmp_path / "e.png")
        docs = run_json(capsys, "detect", str(pair_image), str(tmp_path / "e.png"), "--jobs", "2")
        assert [d["input"] for d in docs] == [str(pair_image), str(tmp_path / "e.png")]
        assert [len(d["hits"]) for d in docs] == [2, 0]
        for d in docs:
            jsonschema.validate(d, SCHEMA)

    def test_overlay_and_graph_dump(self, pair_image, tmp_path, capsys):
        ov, gj = tmp_path / "ov.png", tmp_path / "g.json"
        run_json(capsys, "detect", str(pair_image), "--overlay", str(ov), "--graph-json", str(gj))
        assert load_edge_map(ov, threshold=1) == load_edge_map(pair_image)
        graph = json.loads(gj.read_text())
        assert len(graph["nodes"]) == 2 and len(graph["branches"]) == 4

    def test_random_start_same_hits(self, pair_image, capsys):
        doc = run_json(capsys, "detect", str(pair_image), "--random-start", "--seed", "7")
        assert len(doc["hits"]) == 2


class TestExitCodes:
    def test_missing_file(self, tmp_path):
        assert main(["detect", str(tmp_path / "none.pgm")]) == 3

    def test_unsupported_format(self, tmp_path):
        (tmp_path / "x.pgm").write_text("not an image")
        assert main(["detect", str(tmp_path / "x.pgm")]) == 4

    @pytest.mark.parametrize("flags", [["--trials", "0"], ["--tol-rel", "1.5"],
                                       ["--threshold", "300"], ["--max-cycles", "0"]])
    def test_bad_values(self, pair_image, flags):
        assert main(["detect", str(pair_image), *flags]) == 2

    def test_bad_argument_syntax(self):
        with pytest.raises(SystemExit) as exc:
            main(["detect"])
        assert exc.value.code == 2

    def test_overlay_needs_single_input(self, pair_image):
        assert main(["detect", str(pair_image), str(pair_image), "--overlay", "o.pgm"]) == 2


class TestSynth:
    def test_circle_sidecar(self, tmp_path):
        out = tmp_path / "c.pgm"
        assert main(["synth", str(out), "--circle", "64", "64", "20"]) == 0
        assert json.loads(out.with_suffix(".json").read_text()) == {
            "circles": [{"cx": 64.0, "cy": 64.0, "r": 20.0}], "distractors": []}
        assert load_edge_map(out) == circles_map(256, (64, 64, 20))

    def test_random_is_reproducible(self, tmp_path):
        for name in ("a", "b"):
            assert main(["synth", str(tmp_path / f"{name}.png"), "--random", "4",
                         "--seed", "42"]) == 0
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_mixed_shapes(self, tmp_path):
        out, side = tmp_path / "m.pgm", tmp_path / "truth.json"
        argv = ["synth", str(out), "--sidecar", str(side), "--square", "128", "128", "50",
                "--circle", "40", "40", "15", "--circle", "200", "60", "30",
                "--circle", "70", "200", "25"]
        assert main(argv) == 0
        truth = json.loads(side.read_text())
        assert len(truth["circles"]) == 3 and len(truth["distractors"]) == 1

    def test_nothing_to_draw(self, tmp_path):
        assert main(["synth", str(tmp_path / "x.pgm")]) == 2

    def test_off_canvas_shape(self, tmp_path):
        assert main(["synth", str(tmp_path / "x.pgm"), "--circle", "900", "900", "5"]) == 2

    def test_synth_then_detect(self, tmp_path, capsys):
        out = tmp_path / "s.pgm"
        assert main(["synth", str(out), "--circle", "100", "90", "33.5",
                     "--ellipse", "180", "180", "40", "22"]) == 0
        doc = run_json(capsys, "detect", str(out))
        assert len(doc["hits"]) == 1
        h = doc["hits"][0]
        assert abs(h["cx"] - 100) <= 2 and abs(h["cy"] - 90) <= 2 and abs(h["r"] - 33.5) <= 2
