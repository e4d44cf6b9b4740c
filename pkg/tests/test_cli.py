import csv
import io
import json
import math
import subprocess
import sys

import pytest

from spingp.cli import PRESETS, grid_points, number, run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def records(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def header(text):
    return [ln for ln in text.splitlines() if ln.startswith("#")]


@pytest.mark.parametrize(
    "text, value",
    [("sqrt(10)*pi", math.sqrt(10) * math.pi), ("pi/2", math.pi / 2), ("-1.5e-3", -1.5e-3), ("2**3", 8.0)],
)
def test_number_expressions(text, value):
    assert number(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["__import__('os')", "abs", "1 +", "x", "pi()"])
def test_number_rejects_code(text):
    with pytest.raises(ValueError):
        number(text)


def test_grid_inclusive():
    pts = grid_points("0:pi:5")
    assert pts[0] == 0.0 and pts[-1] == math.pi and len(pts) == 5
    with pytest.raises(ValueError):
        grid_points("0:1")


def test_resonances_command():
    code, out = call("resonances", "--kl", "sqrt(10)*pi")
    assert code == 0
    rows = records(out)
    assert [(r["n_plus"], r["n_minus"], r["xi"], r["epsilon_exact"]) for r in rows] == [("2", "4", "1", "3/5")]
    assert header(out)[0] == "# schema: spingp.resonances/v1"


def test_resonances_trivial_and_scan():
    code, out = call("resonances", "--kl", "4*pi")
    assert code == 0 and records(out) == []
    code, out = call("resonances", "--grid", "pi:5*pi:2")
    pairs = [(int(r["n_plus"]), int(r["n_minus"])) for r in records(out)]
    assert pairs == [(1, 3), (2, 4), (1, 5), (3, 5), (2, 6), (1, 7)]


def test_resonances_with_length():
    code, out = call("resonances", "--kl", "sqrt(10)*pi", "--length", "1e-6")
    row = records(out)[0]
    assert float(row["v"]) > 0 and float(row["b0"]) > 0


def test_resonant_gp_pair_and_endpoints():
    code, out = call("resonant-gp", "--n-plus", "2", "--n-minus", "4", "--grid", "0:pi:3")
    assert code == 0
    rows = records(out)
    assert abs(float(rows[0]["gp_per_turn"])) < 1e-9
    assert float(rows[-1]["gp_per_turn"]) == pytest.approx(-2 * math.pi, abs=1e-9)


def test_resonant_gp_parity_exit_code():
    assert call("resonant-gp", "--n-plus", "1", "--n-minus", "2")[0] == 3


def test_fig2_preset_header():
    code, out = call("resonant-gp", "--preset", "fig2", "--grid", "0:pi:5")
    assert code == 0
    hdr = "\n".join(header(out))
    assert "q=10 resolved to pair (2, 20)" in hdr
    assert "q=1.2 resolved to pair (10, 12)" in hdr
    assert "preset: fig2" in hdr
    assert len(records(out)) == 15


def test_prebarrier_marks_resonance():
    code, out = call("prebarrier-gp", "--kl", "sqrt(10)*pi", "--grid", "0.5:0.7:3", "--theta", "pi/2")
    assert code == 0
    rows = records(out)
    res = [r for r in rows if r["resonance"] == "1"]
    assert len(res) == 1 and abs(float(res[0]["gamma_i"])) < 1e-9
    assert "transparent at epsilon=3/5" in out


def test_tunnel_gp_oracle_column():
    code, out = call("tunnel-gp", "--epsilon", "2", "--kminus-l", "pi", "--grid", "0:pi:5", "--mesh", "4000")
    assert code == 0
    for row in records(out):
        assert float(row["oracle_diff"]) < 1e-4
    assert abs(float(records(out)[-1]["gamma_principal"])) < 1e-9


def test_tunnel_gp_rejects_propagating():
    assert call("tunnel-gp", "--epsilon", "0.5", "--kminus-l", "pi")[0] == 2


def test_trajectory_rows_normalized():
    code, out = call("trajectory", "--epsilon", "0.5", "--kl", "3", "--theta", "0", "--samples", "11")
    assert code == 0
    for row in records(out):
        n = [float(row[k]) for k in ("n_x", "n_y", "n_z")]
        assert n == pytest.approx([0.0, 0.0, 1.0], abs=1e-12)


def test_fig4_trajectory_decays():
    code, out = call("trajectory", "--preset", "fig4")
    rows = [r for r in records(out) if r["epsilon"] == "2.0"]
    assert float(rows[-1]["n_z"]) < 0
    for r in records(out):
        assert math.sqrt(sum(float(r[k]) ** 2 for k in ("n_x", "n_y", "n_z"))) == pytest.approx(1.0, abs=1e-10)


def test_units_command():
    code, out = call("units", "--q", "3", "--v", "1")
    assert float(records(out)[0]["b0"]) == pytest.approx(0.139, rel=0.01)
    code, out = call("units", "--moment", "9.27e-24")
    assert 30 < float(records(out)[0]["speed_scale"]) < 32


def test_units_error_row_sets_exit_code():
    code, out = call("units", "--b0", "5", "--v", "1")
    assert code == 3
    row = records(out)[0]
    assert row["status"] == "error" and row["q"] == "nan" and row["reason"]


@pytest.mark.parametrize(
    "argv",
    [
        ("--evaluator", "open-path", "--epsilon", "0.6", "--kl", "sqrt(10)*pi"),
        ("--evaluator", "oracle", "--epsilon", "0.6", "--kl", "sqrt(10)*pi", "--mesh", "3000"),
        ("--evaluator", "resonant", "--n-plus", "2", "--n-minus", "4"),
    ],
)
def test_sweep_evaluators_agree(argv):
    code, out = call("sweep", *argv, "--grid", "0.2:3:4")
    assert code == 0
    ref = records(call("resonant-gp", "--n-plus", "2", "--n-minus", "4", "--grid", "0.2:3:4")[1])
    for row, expect in zip(records(out), ref):
        diff = abs(float(row["gamma"]) - float(expect["gp_per_turn"]))
        assert min(diff % (2 * math.pi), 2 * math.pi - diff % (2 * math.pi)) < 2e-5


def test_sweep_over_epsilon_prebarrier():
    code, out = call("sweep", "--evaluator", "prebarrier", "--vary", "epsilon", "--kl", "4*pi", "--grid", "0.1:0.9:5")
    assert code == 0 and len(records(out)) == 5


def test_sweep_usage_error():
    assert call("sweep", "--evaluator", "open-path", "--epsilon", "0.5")[0] == 2


def test_sweep_region_iii_is_flat():
    code, out = call("sweep", "--evaluator", "open-path", "--epsilon", "0.3", "--kl", "2",
                     "--region", "iii", "--grid", "0:pi:3")
    assert code == 0
    assert all(abs(float(r["gamma_principal"])) < 1e-9 for r in records(out))


def test_bad_numbers_are_usage_errors():
    assert call("resonances", "--kl", "banana")[0] == 2
    assert call("resonances")[0] == 2
    with pytest.raises(SystemExit) as exc:
        run(["resonant-gp", "--format", "xml"])
    assert exc.value.code == 2


def test_preset_command_mismatch():
    assert call("tunnel-gp", "--preset", "fig2")[0] == 2


def test_formats(tmp_path):
    base = ("resonant-gp", "--n-plus", "2", "--n-minus", "4", "--grid", "0:pi:4")
    _, js = call(*base, "--format", "json")
    doc = json.loads(js)
    assert doc["schema"] == "spingp.resonant-gp/v1" and len(doc["records"]) == 4
    _, svg = call(*base, "--format", "svg")
    assert svg.lstrip().startswith(("<svg", "<?xml", "#")) and "<polyline" in svg


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\ngrid = 0:pi:3\nn_plus = 2\nn_minus = 4\n")
    _, out = call("resonant-gp", "--config", str(cfg))
    assert len(records(out)) == 3
    _, out = call("resonant-gp", "--config", str(cfg), "--grid", "0:pi:5")
    assert len(records(out)) == 5
    # config beats preset
    _, out = call("resonant-gp", "--preset", "fig2", "--config", str(cfg))
    assert len(records(out)) == 3


def test_out_and_figure(tmp_path):
    out = tmp_path / "fig5.csv"
    code, stdout = call("tunnel-gp", "--preset", "fig5", "--grid", "0:pi:9", "--mesh", "2000",
                        "--out", str(out), "--figure")
    assert code == 0 and stdout == ""
    assert out.read_text().startswith("# schema: spingp.tunnel-gp/v1")
    png = out.with_suffix(".png")
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_figure_trajectory_explicit_path(tmp_path):
    target = tmp_path / "bloch.png"
    code, _ = call("trajectory", "--preset", "fig4", "--samples", "41", "--figure", str(target))
    assert code == 0 and target.stat().st_size > 0


def test_figure_without_out_needs_path():
    assert call("resonances", "--kl", "pi", "--figure")[0] == 2


def test_jobs_gives_same_bytes():
    base = ("tunnel-gp", "--epsilon", "2", "--kminus-l", "pi", "--grid", "0:pi:6", "--mesh", "1000")
    assert call(*base)[1] == call(*base, "--jobs", "2")[1]


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_deterministic(name, tmp_path):
    cmd = PRESETS[name]["command"]
    extra = ("--mesh", "500") if name == "fig5" else ()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run([cmd, "--preset", name, *extra, "--out", str(a)]) == 0
    assert run([cmd, "--preset", name, *extra, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spingp", "resonances", "--kl", "sqrt(10)*pi"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "3/5" in proc.stdout
