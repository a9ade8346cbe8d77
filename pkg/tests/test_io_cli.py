import json
import math
import xml.etree.ElementTree as ET

import pytest

from geodisk import GeodesicDisk, Point2, RunRecord, load_polygon, render_svg, shortest_path
from geodisk.cli import main
from geodisk.errors import InputError
from geodisk.io import save_polygon
from shapes import FRAME, L_SHAPE, RECT, SQUARE

SVG = "{http://www.w3.org/2000/svg}"
ALLOWED = {"svg", "path", "circle", "line", "rect"}


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, P in [("square", SQUARE), ("rect", RECT), ("L", L_SHAPE), ("frame", FRAME)]:
        paths[name] = tmp_path / f"{name}.poly"
        save_polygon(P, paths[name])
    return paths


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def tags(svg_text):
    root = ET.fromstring(svg_text.split("\n", 1)[1])
    return [el.tag.replace(SVG, "") for el in root.iter()]


# -------------------------------------------------------------------- loading


def test_round_trip_of_polygon_files(files):
    assert load_polygon(files["frame"]).to_dict() == FRAME.to_dict()


def test_loader_accepts_either_orientation(tmp_path):
    p = write(tmp_path, "cw.poly", json.dumps({"outer": [[0, 0], [0, 1], [1, 1], [1, 0]]}))
    assert load_polygon(p).outer == SQUARE.outer


@pytest.mark.parametrize(
    "text, field",
    [
        ('{"outer": [[0, 0], [1, 0], [1, "a"]]}', "outer[2]"),
        ('{"outer": [[0, 0], [1, 0], [1, 1]], "holes": [[[0.2, 0.2], [0.3]]]}', "holes[0][1]"),
        ('{"holes": []}', "outer"),
        ('{"outer": [[0, 0], [1, 0], [1, 1]], "extra": 1}', "extra"),
        ('{"outer": [[0, 0], [1, 1], [1, 0], [0, 1]]}', "outer"),
        ('{"outer": [[0,0],[4,0],[4,4],[0,4]], "holes": [[[5,5],[6,5],[6,6]]]}', "holes[0]"),
        ("not json", "polygon file"),
    ],
)
def test_loader_errors_name_the_field(tmp_path, text, field):
    with pytest.raises(InputError) as err:
        load_polygon(write(tmp_path, "bad.poly", text))
    assert err.value.field == field


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_polygon(tmp_path / "nope.poly")


def test_run_record_round_trip():
    rec = RunRecord("cover-k", {"k": 2, "seed": 0}, "ab" * 32, {"centers": [[0.0, 0.0], [1.0, 1.0]], "radius": 1.0}, {"solve": 1.5})
    again = RunRecord.from_json(rec.to_json())
    assert again == rec
    assert "timings_ms" not in json.loads(rec.to_json(timings=False))


# -------------------------------------------------------------------- SVG


def test_polygon_alone_has_one_path_per_ring():
    assert tags(render_svg(SQUARE)).count("path") == 1
    assert tags(render_svg(FRAME)).count("path") == 2


def test_svg_uses_only_the_allowed_elements():
    path = shortest_path(L_SHAPE, (2, 0.5), (0.5, 2))
    svg = render_svg(L_SHAPE, [GeodesicDisk(Point2(2, 0.5), 1.5), path, Point2(0.5, 0.5)])
    assert set(tags(svg)) <= ALLOWED
    assert tags(svg)[0] == "svg"


def test_view_box_has_five_percent_margin():
    root = ET.fromstring(render_svg(RECT).split("\n", 1)[1])
    x, y, w, h = map(float, root.get("viewBox").split())
    # 5% of the larger side on every edge
    assert (x, y, w, h) == pytest.approx((-0.1, -0.1, 2.2, 1.2))


def test_two_disks_get_distinct_shades():
    svg = render_svg(RECT, [GeodesicDisk(Point2(0.5, 0.5), 0.72), GeodesicDisk(Point2(1.5, 0.5), 0.72)])
    root = ET.fromstring(svg.split("\n", 1)[1])
    fills = [el.get("fill") for el in root.iter(SVG + "path") if el.get("fill-opacity")]
    assert len(fills) == 2 and fills[0] != fills[1]


def test_rendering_is_deterministic():
    overlays = [GeodesicDisk(Point2(2, 0.5), 1.5)]
    assert render_svg(L_SHAPE, overlays) == render_svg(L_SHAPE, overlays)


# -------------------------------------------------------------------- CLI


def test_pack_unit_on_the_square(files, capsys):
    assert main(["pack-unit", str(files["square"])]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "K=1"


def test_cover_two_decision_exit_codes(files, capsys):
    assert main(["cover-2", str(files["rect"]), "--radius", "0.72"]) == 0
    assert "witness" in capsys.readouterr().out
    assert main(["cover-2", str(files["rect"]), "--radius", "0.70"]) == 1
    assert "no two-disk cover at r=0.70" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["pack", "{square}", "--radius", "0.3"],
        ["cover-k", "{L}", "--k", "3"],
        ["pack-k", "{L}", "--k", "2"],
        ["cover-2", "{square}", "--eps", "0.01"],
        ["verify", "{L}", "--suite", "metric", "--samples", "50"],
    ],
)
def test_successful_commands_exit_zero(files, argv, capsys):
    argv = [a.format(**{k: str(v) for k, v in files.items()}) for a in argv]
    assert main(argv) == 0
    assert capsys.readouterr().out


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["pack", "{square}", "--radius", "-1"], "--radius"),
        (["cover-k", "{square}", "--k", "0"], "--k"),
        (["pack-k", "{square}", "--k", "1"], "--k"),
        (["cover-2", "{square}", "--radius", "abc"], "--radius"),
        (["pack-unit", "{frame}"], "holes"),
        (["verify", "{square}", "--suite", "bogus"], "--suite"),
        (["pack-unit", "missing.poly"], "polygon file"),
        (["render", "{square}"], "--svg"),
    ],
)
def test_input_errors_exit_two(files, argv, needle, capsys):
    argv = [a.format(**{k: str(v) for k, v in files.items()}) for a in argv]
    assert main(argv) == 2
    assert needle in capsys.readouterr().err


def test_json_output_is_a_run_record(files, capsys):
    assert main(["cover-k", str(files["square"]), "--k", "2", "--json"]) == 0
    rec = RunRecord.from_json(capsys.readouterr().out)
    assert rec.command == "cover-k" and rec.params["k"] == 2
    assert rec.output["radius"] == pytest.approx(1.0)
    assert len(rec.input_digest) == 64 and rec.timings == {}


def test_timings_flag(files, capsys):
    main(["pack-unit", str(files["square"]), "--json", "--timings"])
    assert set(json.loads(capsys.readouterr().out)["timings_ms"]) >= {"load", "solve"}


def test_quiet_prints_nothing(files, capsys):
    assert main(["pack-unit", str(files["square"]), "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_json_and_svg_are_byte_identical_across_runs(files, tmp_path, capsys):
    outs = []
    for i in range(2):
        svg = tmp_path / f"run{i}.svg"
        assert main(["cover-2", str(files["rect"]), "--radius", "0.72", "--json", "--seed", "3", "--svg", str(svg)]) == 0
        outs.append((capsys.readouterr().out, svg.read_bytes()))
    assert outs[0] == outs[1]


def test_render_reproduces_the_svg_of_a_run(files, tmp_path, capsys):
    first = tmp_path / "first.svg"
    main(["pack-k", str(files["L"]), "--k", "3", "--json", "--svg", str(first)])
    record = write(tmp_path, "rec.json", capsys.readouterr().out)
    again = tmp_path / "again.svg"
    assert main(["render", str(files["L"]), str(record), "--svg", str(again)]) == 0
    assert first.read_bytes() == again.read_bytes()
    assert set(tags(first.read_text())) <= ALLOWED


def test_witness_radius_is_echoed(files, capsys):
    main(["cover-2", str(files["square"]), "--radius", str(math.sqrt(0.5))])
    assert capsys.readouterr().out.startswith("witness")
