import json

import numpy as np
import pytest

from skewdyn import cli, render
from skewdyn.config import ExperimentConfig, RenderSpec
from skewdyn.sphere import pairs_from_complex

Z2 = [[0, 0], [0, 0], [1, 0]]
Z3 = [[0, 0], [0, 0], [0, 0], [1, 0]]


def write_config(tmp_path, name="cfg.json", **fields):
    fields.setdefault("family", [{"coeffs": Z2}, {"coeffs": Z3}])
    fields.setdefault("out", str(tmp_path / "out"))
    path = tmp_path / name
    path.write_text(json.dumps(fields))
    return path


def run(cmd, path, *extra):
    return cli.main([cmd, "--config", str(path), *extra])


def report(tmp_path, cmd, sub="out"):
    return json.loads((tmp_path / sub / f"{cmd}_report.json").read_text())


def test_pressure_command(tmp_path):
    cfg = write_config(tmp_path, depth=5)
    assert run("pressure", cfg) == cli.EXIT_OK
    rep = report(tmp_path, "pressure")
    assert rep["preimage"]["value"] == pytest.approx(1.6094, abs=1e-4)
    assert rep["preimage"]["condition"]["holds"]
    csv = (tmp_path / "out" / "pressure.csv").read_text().splitlines()
    assert csv[0] == "depth,estimate" and len(csv) == 6


def test_manifest_contents(tmp_path):
    cfg = write_config(tmp_path, depth=3, seed=9)
    assert run("pressure", cfg) == 0
    man = json.loads((tmp_path / "out" / "pressure_manifest.json").read_text())
    assert man["status"] == 0 and man["seed"] == 9
    assert len(man["config_hash"]) == 64
    assert set(man["versions"]) >= {"python", "numpy", "scipy", "skewdyn"}
    assert "wall_time_s" in man and "pressure.csv" in man["outputs"]
    assert report(tmp_path, "pressure")["config_hash"] == man["config_hash"]


def test_seed_and_out_override(tmp_path):
    cfg = write_config(tmp_path, count=50, burn_in=5)
    other = tmp_path / "elsewhere"
    assert run("julia-sample", cfg, "--seed", "3", "--out", str(other)) == 0
    man = json.loads((other / "julia-sample_manifest.json").read_text())
    assert man["seed"] == 3 and (other / "julia-sample.csv").exists()


def test_julia_then_render_circle(tmp_path):
    cfg = write_config(tmp_path, family=[{"coeffs": Z2}], count=4000, burn_in=30,
                       render={"width": 512, "height": 512, "window": [-1.5, 1.5, -1.5, 1.5]})
    assert run("julia-sample", cfg) == 0
    assert run("render", cfg) == 0
    img = render.decode_ppm((tmp_path / "out" / "render.ppm").read_bytes())
    png = render.decode_png((tmp_path / "out" / "render.png").read_bytes())
    assert np.array_equal(img, png)
    rows, cols = np.nonzero(img.max(axis=2))
    assert rows.size > 500
    # pixel centers in the complex plane; the unit circle spans 512/3 pixels per unit
    scale = 512 / 3.0
    x = -1.5 + (cols + 0.5) / scale
    y = 1.5 - (rows + 0.5) / scale
    off = np.abs(np.hypot(x, y) - 1.0) * scale
    assert off.max() <= 2.0
    assert report(tmp_path, "render")["source"] == "julia-sample.csv"


def test_compare_measures_deterministic(tmp_path):
    fields = dict(family=[{"coeffs": Z2}, {"coeffs": [[0.1, 0], [0, 0], [1, 0]]}],
                  depths=[3, 5, 9], periods=[2, 3, 4], budget=1000, samples=3000, seed=11)
    outs = []
    for sub in ("a", "b"):
        cfg = write_config(tmp_path, f"{sub}.json", out=str(tmp_path / sub), **fields)
        assert run("compare-measures", cfg) == 0
        outs.append([(tmp_path / sub / f).read_bytes() for f in
                     ("compare-measures.csv", "compare-measures_report.json")])
    assert outs[0] == outs[1]
    text = outs[0][0].decode().splitlines()
    assert text[0] == "depth,period,discrepancy" and len(text) == 4


def test_exit_codes(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    bad = write_config(tmp_path, "bad.json", depth=0)
    assert run("pressure", bad) == cli.EXIT_CONFIG
    err = json.loads((tmp_path / "out" / "pressure_error.json").read_text())
    assert err["category"] == "config"
    assert (tmp_path / "out" / "pressure_manifest.json").exists()
    nofam = tmp_path / "nofam.json"
    nofam.write_text(json.dumps({"family": [{"coeffs": [[1, 0]]}], "out": str(tmp_path / "o")}))
    assert run("pressure", nofam) == cli.EXIT_CONFIG
    over = write_config(tmp_path, "over.json", depth=8, budget=1000, mode="exhaustive")
    assert run("pressure", over) == cli.EXIT_BUDGET
    assert json.loads((tmp_path / "out" / "pressure_error.json").read_text())["category"] == "budget"
    noeps = write_config(tmp_path, "noeps.json", depths=[2, 3], center_period=2)
    assert run("ldp-preimage", noeps) == cli.EXIT_CONFIG
    assert run("pressure", tmp_path / "missing.json") == cli.EXIT_CONFIG


def test_sampled_pressure_reports_stderr(tmp_path):
    cfg = write_config(tmp_path, depth=9, budget=1000, samples=4000, seed=2)
    assert run("pressure", cfg) == 0
    est = report(tmp_path, "pressure")["preimage"]
    # every path carries the same weight under the zero potential
    assert est["sampled"] and est["stderr"] == 0
    assert abs(est["value"] - 1.6094379124341003) < 1e-12
    cfg = write_config(tmp_path, depth=9, budget=1000, samples=4000, seed=2,
                       potential={"a": 0.5, "b": 0.3})
    assert run("pressure", cfg) == 0
    est = report(tmp_path, "pressure")["preimage"]
    assert 0 < est["stderr"] < 0.01


def test_threads_env(tmp_path, monkeypatch):
    cfg = write_config(tmp_path, depth=3)
    monkeypatch.setenv(cli.THREADS_ENV, "2")
    assert run("pressure", cfg) == 0
    man = json.loads((tmp_path / "out" / "pressure_manifest.json").read_text())
    assert man["threads"] == 2
    monkeypatch.setenv(cli.THREADS_ENV, "zero")
    assert run("pressure", cfg) == cli.EXIT_CONFIG


@pytest.mark.parametrize("cmd,extra", [
    ("preimage-measure", {"depth": 3}),
    ("periodic-measure", {"period": 3}),
    ("condition-check", {"depth": 4}),
    ("ldp-preimage", {"depths": [2, 3, 4], "epsilon": 0.2, "center_period": 3}),
    ("ldp-periodic", {"periods": [2, 3], "epsilon": "inf", "center_period": 3,
                      "count": 200, "burn_in": 10}),
    ("branch-count", {"regions": [{"center": [2, 0], "radius": 0.3}], "periods": [1, 2]}),
    ("a1-check", {"count": 200, "burn_in": 10, "max_period": 3}),
])
def test_commands_run_and_repeat(tmp_path, cmd, extra):
    cfg = write_config(tmp_path, **extra)
    assert run(cmd, cfg) == 0
    first = [(tmp_path / "out" / f).read_bytes() for f in (f"{cmd}.csv", f"{cmd}_report.json")]
    assert run(cmd, cfg) == 0
    second = [(tmp_path / "out" / f).read_bytes() for f in (f"{cmd}.csv", f"{cmd}_report.json")]
    assert first == second


def test_ldp_infinite_epsilon_report(tmp_path):
    cfg = write_config(tmp_path, depths=[2, 3], epsilon="inf", center_period=2)
    assert run("ldp-preimage", cfg) == 0
    rep = report(tmp_path, "ldp-preimage")
    assert rep["epsilon"] == "inf" and rep["fractions"] == [0.0, 0.0]


# -- rasterization --------------------------------------------------------------

def spec(**kw):
    kw.setdefault("width", 64)
    kw.setdefault("height", 64)
    kw.setdefault("window", (-1, 1, -1, 1))
    return RenderSpec(**kw)


def test_render_single_atom_center():
    r = render.rasterize(pairs_from_complex(np.array([0j])), spec(radius=2))
    lit = np.argwhere(r.image[:, :, 0] > 0)
    assert r.lit == len(lit) == 13          # disk of radius 2
    assert np.allclose(lit.mean(axis=0), [32, 32])
    assert r.image.max() == 255


def test_render_empty_window_warns():
    with pytest.warns(RuntimeWarning):
        r = render.rasterize(pairs_from_complex(np.array([5 + 5j])), spec())
    assert r.warning and r.lit == 0 and not r.image.any()


def test_render_roots_of_unity_symmetric():
    z = pairs_from_complex(np.exp(2j * np.pi * np.arange(4) / 4) * 0.5)
    r = render.rasterize(z, spec(width=65, height=65, radius=1), weights=np.full(4, 0.25))
    img = r.image[:, :, 0]
    assert r.lit == 4 * 5
    assert np.array_equal(img, np.rot90(img)) and np.array_equal(img, img[::-1, ::-1])


def test_render_sphere_view_and_letters():
    z = pairs_from_complex(np.array([0j, 1.0, np.inf]))
    r = render.rasterize(z, spec(view="sphere", width=90, height=45), letters=np.array([1, 2, 1]))
    assert r.inside == 3
    colored = render.rasterize(z, spec(view="sphere", width=90, height=45, color_by_letter=True),
                               letters=np.array([1, 2, 1]))
    assert len({tuple(c) for c in colored.image.reshape(-1, 3) if c.any()}) == 2


def test_render_spec_limits():
    with pytest.raises(ValueError):
        RenderSpec(width=9000, height=9000)
    with pytest.raises(ValueError):
        RenderSpec(window=(1, -1, 0, 1))
    assert ExperimentConfig(family=[{"coeffs": Z2}]).render.width == 512


def test_image_codec_roundtrip():
    img = np.random.default_rng(1).integers(0, 256, (9, 13, 3)).astype(np.uint8)
    assert np.array_equal(render.decode_png(render.encode_png(img)), img)
    ppm = render.encode_ppm(img)
    assert ppm.startswith(b"P6\n13 9\n255\n")
    assert np.array_equal(render.decode_ppm(ppm), img)
