import io
import json
from fractions import Fraction as F

import pytest

from unlinked import cli
from unlinked import io as uio
from unlinked.ingest import rasterize_radial, write_grid_binary, write_grid_csv
from unlinked.morse_tree import nu_recursive
from unlinked.models import double_mountain, genus2_figure, single_mountain, torus_minimal
from unlinked.sphere import counterexample

SPECIAL = {"kind": "special", "g": {"rho": [["3", "0"], ["7/2", "5/2"], ["4", "0"]], "area_lo": "3"},
           "flatten_width": None}


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture()
def files(tmp_path):
    paths = {}
    for name, kind, model in [("dm", "plane_tree", double_mountain()), ("sm", "plane_tree", single_mountain()),
                              ("g2", "surface", genus2_figure()), ("torus", "surface", torus_minimal()),
                              ("sph", "sphere", counterexample(F(1, 10), F(1, 100)).h)]:
        p = tmp_path / f"{name}.json"
        p.write_text(uio.encode(kind, model))
        paths[name] = p
    fam = tmp_path / "fam.json"
    fam.write_text(uio.dumps(uio.document("family", {**SPECIAL, "inside": [uio.tree_to_json(double_mountain())]})))
    paths["fam"] = fam
    forest = tmp_path / "forest.json"
    forest.write_text(uio.encode("plane_tree", [double_mountain(), single_mountain()]))
    paths["forest"] = forest
    return paths


def test_nu_both(files):
    assert run("nu", "--both", files["dm"]) == (0, "recursive=7/10 oracle=7/10\n", "")
    assert run("nu", files["sm"])[1] == "3/4\n"
    assert run("nu", "--oracle", files["forest"])[1] == "3/4\n"
    assert run("nu", files["g2"])[1] == "27/4\n"


def test_nu_mismatch_exit_code(files, monkeypatch):
    monkeypatch.setattr(cli, "nu_oracle", lambda t, cap=20: F(1))
    code, out, _ = run("nu", "--both", files["dm"])
    assert code == 4 and out == "recursive=7/10 oracle=1\n"


def test_zeta_and_heaviness(files):
    assert run("zeta", "--scan", files["g2"])[1] == "zeta=6 scan=6\n"
    assert run("zeta", files["torus"])[1] == "1/2\n"
    assert run("heavy", files["torus"], "--cells", "long")[1] == "heavy=true superheavy=false\n"
    code, _, err = run("heavy", files["torus"], "--cells", "nope")
    assert code == 3 and "UnknownCell" in err


def test_decompose(files):
    code, out, _ = run("decompose", files["g2"])
    doc = json.loads(out)
    assert code == 0 and len(doc["core_vertices"]) == 6 and len(doc["core_edges"]) == 7 and len(doc["disks"]) == 4


def test_validate_exit_codes(files, tmp_path):
    assert run("validate", files["dm"])[0] == 0
    bad = json.loads(files["dm"].read_text())
    bad["payload"]["nodes"][0]["level"] = "0"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    code, out, _ = run("validate", p)
    assert code == 2 and "SaddleAtZeroLevel" in out
    assert run("nu", p)[0] == 2
    p.write_text("{not json")
    assert run("validate", p)[0] == 1
    p.write_text(json.dumps({**bad, "version": 2}))
    assert run("validate", p)[0] == 1
    p.write_text(json.dumps({**bad, "kind": "torus"}))
    assert run("validate", p)[0] == 1
    bad["payload"]["nodes"][0]["level"] = 0.5
    p.write_text(json.dumps(bad))
    assert run("validate", p)[0] == 1      # floats are not accepted for rationals
    assert run("validate", tmp_path / "missing.json")[0] == 1
    assert run("frobnicate")[0] == 1


def test_spectrum_csv_round_trip(files):
    code, out, _ = run("spectrum", files["sm"])
    assert code == 0
    assert out.splitlines() == ["source,kind,area,k,level,action,negative", "Y,trivial,0,0,0,0,true",
                                "e0@1/2,orbit,1/2,-1,1/4,3/4,true", "max,critical,0,-2,1,1,true"]
    rows = uio.read_csv(out, uio.SPECTRUM_COLUMNS)
    assert [tuple(r.values()) for r in rows] == uio.spectrum_rows([single_mountain()])
    forest = run("spectrum", files["forest"])[1]
    assert sum(1 for ln in forest.splitlines() if ln.startswith("Y,")) == 1


@pytest.mark.parametrize("name", ["dm", "g2", "sph", "forest"])
def test_documents_are_fixpoints(files, name):
    text = files[name].read_text()
    doc = uio.parse_document(text)
    model = uio.decode(doc)
    if doc.kind == "plane_tree" and len(model) == 1:
        model = model[0]
    assert uio.encode(doc.kind, model) == text


def test_grid_document_round_trip():
    g = rasterize_radial(single_mountain(), 8)
    text = uio.encode("grid", g)
    assert uio.encode("grid", uio.decode(uio.parse_document(text))) == text


def test_bifurcate_deterministic_and_svg(files, tmp_path):
    a, b, s = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "a.svg"
    assert run("bifurcate", files["fam"], "--steps", 64, "--out", a, "--svg", s)[0] == 0
    assert run("bifurcate", files["fam"], "--steps", 64, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    branches = uio.read_bifurcation_csv(a.read_text())
    code, svg, _ = run("svg", "--diagram", a)
    assert code == 0 and svg == s.read_text()
    assert svg.count("<polyline") == len(branches)
    assert run("bifurcate", files["fam"], "--steps", 1)[0] == 1


def test_continue_c(files):
    code, out, _ = run("continue-c", files["fam"], "--c0", "39/20", "--steps", 512)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "sigma,c"
    first, last = (float(x.split(",")[1]) for x in (lines[1], lines[-1]))
    assert abs(first - last - 1.25) < 1e-9
    assert run("continue-c", files["fam"], "--c0", "5", "--steps", 16)[0] == 3


def test_sphere_commands(files):
    code, out, _ = run("sphere", "counterexample", "--zbeta", "1/10", "--delta", "1/100")
    rep = json.loads(out)
    assert code == 0 and rep["c_sum"] == "21/50" and rep["gap"] == "73/1084"
    assert set(rep) >= {"c_sum", "c1", "c2", "gap", "parameters"}
    assert run("sphere", "counterexample", "--zbeta", "1/4")[0] == 3
    code, out, _ = run("sphere", files["sph"])
    doc = json.loads(out)
    assert code == 0 and doc["c"] == "21/50"
    assert ["1/10", 1] in doc["fixed_points"]


def test_ingest_grid(tmp_path):
    g = rasterize_radial(single_mountain(), 64)
    write_grid_binary(g, tmp_path / "g.bin")
    write_grid_csv(g, tmp_path / "g.csv")
    (tmp_path / "g.json").write_text(uio.encode("grid", g))
    outs = []
    for name in ["g.bin", "g.csv", "g.json"]:
        code, out, _ = run("ingest-grid", tmp_path / name, "--levels", 64)
        assert code == 0
        ts = uio.decode(uio.parse_document(out))
        outs.append(out)
        assert abs(float(nu_recursive(ts[0])) - 0.75) < 0.04
    assert outs[1] == outs[2]  # same float64 samples
    code, _, err = run("ingest-grid", tmp_path / "g.csv", "--levels", 2)
    assert code == 0 and "coarse" in err


def test_help_documents_every_flag():
    parser = cli.build_parser()
    sub = next(a for a in parser._actions if a.__class__.__name__ == "_SubParsersAction")
    for name, p in sub.choices.items():
        text = p.format_help()
        for action in p._actions:
            for opt in action.option_strings:
                assert opt in text
            if action.option_strings and action.dest != "help":
                assert action.help, f"{name} {action.option_strings} lacks help"
