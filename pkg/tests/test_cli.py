import json

import pytest

from surfinterp import cli
from surfinterp.meshio import read_obj

CATENOID = ["bjorling", "--metric", "euclidean", "--input", "circle(1)", "--normal", "radial(-1)",
            "--domain", "3.141592653589793,3.5,3.141592653589793", "--grid", "24x24"]
SPIRAL = ["interpolate", "--metric", "lorentz", "--input", "circle(1)", "--target", "spiral(1,0.01)",
          "--grid", "16x16", "--newton"]


def run(argv, tmp_path, name="r.json"):
    out = tmp_path / name
    code = cli.main([*argv, "--report", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def flags_recompute(doc):
    for f in doc["flags"].values():
        ok = f["value"] < f["tolerance"] if f["relation"] == "<" else f["value"] > f["tolerance"]
        assert ok == f["pass"]
    return all(f["pass"] for f in doc["flags"].values())


def test_bjorling_report_schema(tmp_path):
    code, doc = run(CATENOID, tmp_path)
    assert code == 0 and doc["pass"]
    assert doc["schema_version"] == 1 and doc["config"]["metric"] == "euclidean"
    assert flags_recompute(doc)
    for name in ("isotropy_residual", "conformality_max", "harmonicity", "mean_curvature_max",
                 "boundary_trace", "boundary_normal"):
        assert name in doc["flags"]
    assert doc["metrics"]["immersion_margin"] > 1


def test_repeat_runs_identical(tmp_path):
    texts, meshes = [], []
    for k in range(2):
        mesh = tmp_path / f"m{k}.obj"
        code, _ = run([*CATENOID, "--mesh", str(mesh)], tmp_path, f"r{k}.json")
        assert code == 0
        doc = json.loads((tmp_path / f"r{k}.json").read_text())
        doc.pop("timestamp")
        texts.append(cli.dumps_report(doc))
        meshes.append(mesh.read_bytes())
    assert texts[0] == texts[1] and meshes[0] == meshes[1]


def test_failed_flag_exits_two(tmp_path):
    code, doc = run([*CATENOID, "--tol", "harmonicity=1e-30"], tmp_path)
    assert code == 2 and not doc["pass"]
    assert not doc["flags"]["harmonicity"]["pass"]
    assert flags_recompute(doc) is False


def test_tol_and_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"grid": "10x12", "degree": 40, "tolerances": {"boundary": 1e-6}}))
    c = cli.config_from_args(["bjorling", "--config", str(cfg), "--degree", "44",
                              "--tol", "normal=1e-7"])
    assert c.grid == (10, 12) and c.degree == 44
    assert c.tolerances["boundary"] == 1e-6 and c.tolerances["normal"] == 1e-7


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["bjorling", "--grid", "1x5"],
    ["bjorling", "--tol", "isotropy"],
    ["bjorling", "--tol", "isotropy=-1"],
    ["bjorling", "--degree", "3"],
    ["bjorling", "--metric", "riemann"],
])
def test_usage_errors_exit_one(argv, capsys):
    assert cli.main(argv) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["exit_code"] == 1


def test_invalid_data_reports_violations(tmp_path, capsys):
    code, _ = run(["bjorling", "--metric", "euclidean", "--input", "circle(1)",
                   "--normal", "constant(1,0,0)"], tmp_path)
    assert code == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ValidationFailed" and err["violations"]


def test_missing_file_exits_three(tmp_path):
    assert cli.main(["verify", "--input", str(tmp_path / "absent.json")]) == 3


def test_bad_config_json_exits_one(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{nope")
    assert cli.main(["bjorling", "--config", str(cfg)]) == 1


def test_save_then_verify(tmp_path):
    saved = tmp_path / "f.json"
    code, _ = run([*CATENOID, "--save-curve", str(saved)], tmp_path)
    assert code == 0
    code, doc = run(["verify", "--metric", "euclidean", "--input", str(saved), "--grid", "16x16"],
                    tmp_path, "v.json")
    assert code == 0 and doc["flags"]["isotropy_residual"]["value"] < 1e-10


def test_export_matches_bjorling_mesh(tmp_path):
    a, b = tmp_path / "a.obj", tmp_path / "b.obj"
    run([*CATENOID, "--mesh", str(a)], tmp_path)
    code, doc = run(["export", *CATENOID[1:], "--mesh", str(b)], tmp_path, "e.json")
    assert code == 0 and doc["metrics"]["vertices"] == 576
    assert a.read_bytes() == b.read_bytes()
    verts, faces = read_obj(b)
    assert verts.shape == (576, 3) and faces.shape == (23 * 23, 4)


def test_gallery(tmp_path):
    code, doc = run(["gallery", "--mesh", str(tmp_path / "g"), "--grid", "24x24"], tmp_path)
    assert code == 0
    assert set(doc["diagnostics"]["surfaces"]) == {"catenoid", "helicoid", "enneper", "planar", "boosted"}
    assert len(list((tmp_path / "g").glob("*.obj"))) == 5
    assert flags_recompute(doc)


@pytest.mark.parametrize("metric", ["lorentz", "euclidean"])
def test_interpolate_spiral(tmp_path, metric):
    argv = [*SPIRAL]
    argv[2] = metric
    code, doc = run(argv, tmp_path)
    assert code == 0 and flags_recompute(doc)
    hist = doc["metrics"]["newton_residual_history"]
    assert hist[-1] < 1e-9 and all(b < a for a, b in zip(hist, hist[1:]))
    assert "closeness" in doc["diagnostics"]


@pytest.mark.parametrize("target,error", [("perturbed-circle(1,0.05)", "NotTimelike"),
                                          ("circle(1)", "ParallelTangents")])
def test_interpolate_rejections(tmp_path, capsys, target, error):
    argv = [*SPIRAL]
    argv[6] = target
    code, _ = run(argv, tmp_path)
    assert code == 1
    assert json.loads(capsys.readouterr().err)["error"] == error
