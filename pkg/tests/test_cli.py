import json
import math
import os

import pytest

from logtract.cli import main


def run(args):
    return main(args)


def test_trace_file_contract(tmp_path):
    out = tmp_path / "t"
    assert run(["trace", "--out", str(out), "--seed", "3"]) == 0
    names = sorted(os.listdir(out))
    assert names == ["tail_0.csv", "tail_0.json", "trace_summary.json"]
    header = (out / "tail_0.csv").read_text().splitlines()
    assert header[0].startswith("# logtract")
    assert header[1] == "t,re_log,im_log,re_plane,im_plane,err"


def test_trace_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["trace", "--out", str(a), "--seed", "9"]) == 0
    assert run(["trace", "--out", str(b), "--seed", "9"]) == 0
    for name in ("tail_0.csv", "tail_0.json", "trace_summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_trace_unrealizable_address(tmp_path, capsys):
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(json.dumps({"addresses": [{"prefix": [], "period": [999]}]}))
    code = run(["trace", "--config", str(cfgp), "--out", str(tmp_path / "o")])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "AddressNotRealized"


def test_render_plain_and_overlay(tmp_path):
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(json.dumps({
        "render": {"x_min": -3, "x_max": 3, "y_min": -3, "y_max": 3,
                   "width": 24, "height": 24, "horizon": 10, "log_R": 2.3,
                   "overlay_rays": False},
    }))
    assert run(["render", "--config", str(cfgp), "--out", str(tmp_path / "r")]) == 0
    from PIL import Image
    img = Image.open(tmp_path / "r" / "escape.png")
    assert img.size == (24, 24)
    assert img.text["config-hash"]


def test_render_ray_pixels_escape(tmp_path, G, rescaled_exp):
    # viewport around the rescaled map's hair: overlay pixels must be
    # classified escaping by the raster classifier
    import numpy as np
    from logtract.config import RenderSettings
    from logtract.logspace import Itinerary
    from logtract.rays import escape_test, trace_tail
    from logtract.render import classify_row, render_image

    _, g = rescaled_exp
    tail = trace_tail(G, Itinerary.constant(0), 1e12, 1e13, 1e-2, depth=1)
    planes = [p.plane_position for p in tail.samples if p.plane_position is not None]
    xs = [z.real for z in planes]
    settings = RenderSettings(
        x_min=min(xs) * 0.98, x_max=max(xs) * 1.02,
        y_min=-abs(max(xs)) * 0.02, y_max=abs(max(xs)) * 0.02,
        width=64, height=64, horizon=12, log_R=29.0, overlay_rays=True)
    for z in planes[::5]:
        v = escape_test(g, z, math.exp(29.0), 12)
        assert v.escaping
    img = render_image(g, settings, [tail])
    arr = np.asarray(img)
    assert (arr == 255).all(axis=2).any()   # overlay present


def test_render_horizon_monotone(rescaled_exp):
    from logtract.config import RenderSettings
    from logtract.render import classify_row
    _, g = rescaled_exp
    base = dict(x_min=7e12, x_max=8e12, y_min=-5e11, y_max=5e11,
                width=16, height=1, log_R=29.0)
    s1 = RenderSettings(horizon=6, **base)
    s2 = RenderSettings(horizon=12, **base)
    from logtract.rays import escape_test
    R = math.exp(29.0)
    for col in range(16):
        x = base["x_min"] + (base["x_max"] - base["x_min"]) * (col + 0.5) / 16
        v1 = escape_test(g, complex(x, 0.0), R, 6)
        v2 = escape_test(g, complex(x, 0.0), R, 12)
        if v1.escaping:
            assert v2.escaping


def test_render_independent_of_worker_count(tmp_path, monkeypatch):
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(json.dumps({
        "render": {"x_min": -2, "x_max": 2, "y_min": -2, "y_max": 2,
                   "width": 20, "height": 20, "horizon": 8, "log_R": 2.3,
                   "overlay_rays": False},
    }))
    monkeypatch.setenv("LOGTRACT_WORKERS", "1")
    assert run(["render", "--config", str(cfgp), "--out", str(tmp_path / "w1")]) == 0
    monkeypatch.setenv("LOGTRACT_WORKERS", "4")
    assert run(["render", "--config", str(cfgp), "--out", str(tmp_path / "w4")]) == 0
    a = (tmp_path / "w1" / "escape.png").read_bytes()
    b = (tmp_path / "w4" / "escape.png").read_bytes()
    assert a == b


def test_project_command(tmp_path):
    out = tmp_path / "p"
    assert run(["project", "--out", str(out), "--seed", "2"]) == 0
    rep = json.loads((out / "projection_report.json").read_text())
    assert rep["data"]["hairs"][0]["projections"][0]["converged"]
    assert any(name.startswith("zn_trace") for name in os.listdir(out))


def test_conjugate_command_identity(tmp_path, capsys):
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(json.dumps({"conjugacy": {"lam_override": 1.0, "samples": 20}}))
    assert run(["conjugate", "--config", str(cfgp), "--out", str(tmp_path / "c")]) == 0
    rep = json.loads((tmp_path / "c" / "conjugacy_report.json").read_text())
    assert rep["data"]["max_displacement"] == 0.0
    assert rep["data"]["max_residual"] == 0.0
    assert rep["data"]["valid"]


def test_brush_command_worked_table(tmp_path):
    out = tmp_path / "b"
    assert run(["brush", "--out", str(out)]) == 0
    rep = json.loads((out / "brush_report.json").read_text())
    h1 = next(h for h in rep["data"]["hairs"] if h["hid"] == "H1")
    assert [10.2, 11.5] in h1["pi"]
    assert rep["data"]["max_crossings"] <= 1
    assert rep["data"]["axioms"]["passed"]


def test_verify_command_deterministic(tmp_path):
    a, b = tmp_path / "va", tmp_path / "vb"
    assert run(["verify", "--out", str(a), "--seed", "6"]) == 0
    assert run(["verify", "--out", str(b), "--seed", "6"]) == 0
    assert (a / "verify_report.json").read_bytes() == (b / "verify_report.json").read_bytes()


def test_usage_error_exit_code():
    assert run(["nonsense"]) == 1
