import numpy as np
import pytest


from slitwave.cli import main
from slitwave.intensity import DiffractionPattern, ScanGrid, screen_scan
from slitwave.report import DataError, compare, format_csv, read_csv, read_data_csv, render_svg, write_csv
from slitwave.slit_modes import Truncation

DATA = "tests/data/synthetic_ref18.csv"
FAST = ["--m-max", "128", "--n-max", "8", "--tail-tol", "1e-2"]


@pytest.fixture(scope="module")
def model(ref18):
    return screen_scan(ref18, ScanGrid(-150e-6, 150e-6, 1501))


def test_csv_round_trip(tmp_path, model):
    path = tmp_path / "p.csv"
    write_csv(model, path)
    back = read_csv(path)
    assert np.allclose(back.s_m, model.s_m, rtol=1e-12, atol=0)
    assert np.allclose(back.intensity, model.intensity, rtol=1e-12, atol=0)
    assert back.meta["name"] == "ref18"
    assert back.meta["m_max"] == model.meta["m_max"]
    assert back.meta["fringe_spacing_m"] == pytest.approx(30e-6)
    text = path.read_text().splitlines()
    assert "s_um,intensity" in text
    assert sum(1 for t in text if not t.startswith("#")) == 1 + 1501


def test_compare_self(model):
    pos = np.linspace(-100e-6, 100e-6, 41)
    counts = 37.5 * np.interp(pos, model.s_m, model.intensity)
    rep = compare(model, pos, counts)
    assert rep.rmse <= 1e-10
    assert rep.scale == pytest.approx(37.5, rel=1e-10)


def test_compare_noisy(model):
    rng = np.random.default_rng(3)
    pos = np.linspace(-120e-6, 120e-6, 200)
    clean = np.interp(pos, model.s_m, model.intensity)
    sigma = 0.01 * clean.max()
    rep = compare(model, pos, clean + rng.normal(0, sigma, pos.size))
    assert sigma / 2 <= rep.rmse <= 2 * sigma


def test_compare_errors(model, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("position,counts\n")
    with pytest.raises(DataError, match=">= 10 rows required"):
        read_data_csv(empty)
    with pytest.raises(DataError, match="overlap"):
        compare(model, np.linspace(1e-3, 2e-3, 12), np.ones(12))
    with pytest.raises(DataError, match="increasing"):
        compare(model, np.r_[np.linspace(0, 1e-5, 11), 5e-6], np.ones(12))
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n" + "\n".join(f"{i},{1}" for i in range(12, 0, -1)))
    with pytest.raises(DataError, match="increasing"):
        read_data_csv(bad)


def test_synthetic_fixture(model):
    pos, counts = read_data_csv(DATA, "um")
    rep = compare(model, pos, counts)
    assert rep.scale == pytest.approx(250, rel=0.02)
    assert rep.rmse < 5.0
    assert rep.data_visibility is not None


def test_svg(model):
    pos, counts = read_data_csv(DATA)
    svg = render_svg(model, (pos, counts), title="ref18")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<circle") == len(pos)
    assert "<polyline" in svg


def test_scan_command(tmp_path, capsys):
    out, svg = tmp_path / "a.csv", tmp_path / "a.svg"
    rc = main(["scan", "--preset", "ref19", "--range", "-150e-6", "150e-6", "--points", "1501",
               "--out", str(out), "--svg", str(svg)])
    assert rc == 0
    text = capsys.readouterr().out
    line = next(t for t in text.splitlines() if t.startswith("fringe spacing"))
    measured = float(line.split()[2])
    assert abs(measured - 46.875) <= 0.1 * 46.875
    pat = read_csv(out)
    assert len(pat) == 1501
    assert svg.read_text().startswith("<svg")


def test_scan_ref18_decohered_shape(tmp_path):
    out = tmp_path / "ref18.csv"
    assert main(["scan", "--preset", "ref18", "--range", "-150e-6", "150e-6", "--points", "1501",
                 "--mode", "decohered", "--out", str(out)]) == 0
    pat = read_csv(out)
    i = pat.intensity
    assert abs(pat.s_m[np.argmax(i)]) < 1e-6
    # A1 != A2 and c1 != c2 break the mirror symmetry only weakly
    assert np.max(np.abs(i - i[::-1])) < 0.05


def test_verify_command(capsys):
    rc = main(["verify", "--preset", "ref18", "--points", "3", "--m-max", "48", "--n-max", "8"])
    assert rc == 0
    assert "6/6 amplitude checks passed" in capsys.readouterr().out


def test_compare_command(capsys, tmp_path):
    rc = main(["compare", "--preset", "ref18", "--data", DATA])
    assert rc == 0
    assert "RMSE" in capsys.readouterr().out
    model_csv = tmp_path / "m.csv"
    main(["scan", "--preset", "ref18", "--out", str(model_csv)] + FAST)
    assert main(["compare", "--model", str(model_csv), "--data", DATA]) == 0


def test_preset_commands(capsys):
    assert main(["preset", "list"]) == 0
    assert "ref18" in capsys.readouterr().out
    assert main(["preset", "show", "ref19"]) == 0
    shown = capsys.readouterr().out
    assert "a_m = 4.2e-08" in shown and "nu = 0.88" in shown


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        'name = "narrow"\nwavelength_m = 2.4e-12\na_m = 20e-9\nd_m = 80e-9\nL_m = 1.25\n'
        "A1 = 1.0\nA2 = 1.0\nc1 = 0.7071067811865476\nc2 = 0.7071067811865476\nnu = 0.5\n"
        "points = 601\ns_min_m = -60e-6\ns_max_m = 60e-6\nmode = \"coherent\"\n"
    )
    out = tmp_path / "o.csv"
    assert main(["scan", "--config", str(cfg), "--out", str(out), "--points", "1201"] + FAST) == 0
    pat = read_csv(out)
    assert len(pat) == 1201  # flag overrides file
    assert pat.meta["name"] == "narrow" and pat.meta["mode"] == "coherent"


@pytest.mark.parametrize("body,match", [
    ("a_m = \"wide\"\n", "a_m: expected float"),
    ("colour = 3\n", "colour: unknown key"),
    ('preset = "ref18"\na_m = 1e-9\n', "either a preset or a parameter block"),
    ("wavelength_m = 2.4e-12\n", "missing parameter"),
    ("[table]\nx = 1\n", "nested tables"),
])
def test_malformed_config(tmp_path, capsys, body, match):
    cfg = tmp_path / "bad.toml"
    cfg.write_text(body)
    assert main(["scan", "--config", str(cfg)]) != 0
    assert match in capsys.readouterr().err


def test_error_exit_status(capsys, tmp_path):
    assert main(["scan"]) != 0
    assert main(["compare", "--preset", "ref18", "--data", str(tmp_path / "missing.csv")] + FAST) != 0
    assert main(["scan", "--preset", "ref18", "--range", "1e-6", "-1e-6"]) != 0
    assert main(["preset", "show"]) != 0
    assert "error" in capsys.readouterr().err


def test_threads_env(monkeypatch, tmp_path):
    monkeypatch.setenv("SLITWAVE_THREADS", "3")
    from slitwave.cli import build_parser, build_run_config
    args = build_parser().parse_args(["scan", "--preset", "ref18"])
    assert build_run_config(args).threads == 3
    args = build_parser().parse_args(["scan", "--preset", "ref18", "--threads", "2"])
    assert build_run_config(args).threads == 2
    monkeypatch.setenv("SLITWAVE_THREADS", "many")
    args = build_parser().parse_args(["scan", "--preset", "ref18"])
    with pytest.raises(ValueError):
        build_run_config(args)
