"""Command-line contract: outputs, exit codes and byte stability."""

import copy

import pytest
import yaml

from cogrelay.cli import REGION_COLUMNS, SWEEP_COLUMNS, main
from conftest import SCENARIOS

FIG2 = str(SCENARIOS / "fig2.yaml")
STRONG = str(SCENARIOS / "strong_mpr.yaml")
SWEEP = str(SCENARIOS / "snr_sweep.yaml")

FAST_REGION = ["--grid-step", "0.3", "--restarts", "40", "--seed", "0"]


def _fig2_doc():
    with open(FIG2, encoding="utf-8") as handle:
        return yaml.safe_load(handle)


def _write(tmp_path, doc, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return str(path)


def _rows(csv_text):
    lines = csv_text.strip().split("\n")
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_rates_analytic(capsys):
    assert main(["rates", "--scenario", FIG2, "--variant", "dominant1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("variant=dominant1 lambda_p=0.3 lambda_s=0.2\n")
    lines = out.strip().split("\n")
    assert lines[1].split() == ["queue", "arrival", "service"]
    p_row = lines[2].split()
    assert p_row[0] == "p" and p_row[1] == "0.3" and p_row[2] == "0.91"
    assert [line.split()[0] for line in lines[2:]] == ["p", "s", "ps", "sd"]


def test_rates_csv_out(tmp_path, capsys):
    out_path = tmp_path / "rates.csv"
    assert main([
        "rates", "--scenario", FIG2, "--variant", "priority", "--out", str(out_path),
    ]) == 0
    capsys.readouterr()
    header, rows = _rows(out_path.read_text())
    assert header[:6] == ["variant", "lambda_p", "lambda_s", "queue", "arrival", "service"]
    assert len(rows) == 4
    sd = next(r for r in rows if r["queue"] == "sd")
    assert sd["arrival"] == "0" and sd["service"] == "0"  # no SR relaying here


def test_rates_refuses_interacting_variant(capsys):
    assert main(["rates", "--scenario", FIG2, "--variant", "ra"]) == 2
    assert "no closed-form" in capsys.readouterr().err


def test_rates_requires_operating_point(tmp_path, capsys):
    doc = _fig2_doc()
    del doc["system"]["lambda_p"]
    del doc["system"]["variant"]
    path = _write(tmp_path, doc)
    assert main(["rates", "--scenario", path, "--variant", "dominant1"]) == 2
    assert "--lambda-p" in capsys.readouterr().err


def test_region_emits_all_curves_by_default(capsys):
    assert main(["region", "--scenario", FIG2, "--out", "-", *FAST_REGION]) == 0
    captured = capsys.readouterr()
    assert "warning:" not in captured.err
    header, rows = _rows(captured.out)
    assert list(header) == list(REGION_COLUMNS)
    emitted = [(r["variant"], r["bound"]) for r in rows]
    wanted = [
        ("tdma", "exact"), ("ra", "inner_union"), ("ra", "outer_intersection"),
        ("priority", "exact"), ("selection", "exact"), ("nc", "exact"),
    ]
    # The weak table carries no strong_mpr curve; order is fixed.
    assert [pair for i, pair in enumerate(emitted) if i == 0 or emitted[i - 1] != pair] == wanted
    tdma_origin = rows[0]
    assert tdma_origin["lambda_p"] == "0" and tdma_origin["lambda_s_max"] == "0.9"


def test_region_single_variant_and_bound(capsys):
    assert main([
        "region", "--scenario", FIG2, "--variant", "ra", "--bound", "inner",
        "--out", "-", *FAST_REGION,
    ]) == 0
    _, rows = _rows(capsys.readouterr().out)
    assert {(r["variant"], r["bound"]) for r in rows} == {("ra", "inner_union")}
    values = [float(r["lambda_s_max"]) for r in rows]
    assert values[0] == pytest.approx(0.9, abs=1e-9)
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_region_includes_strong_curve_on_strong_tables(capsys):
    assert main(["region", "--scenario", STRONG, "--out", "-", *FAST_REGION]) == 0
    _, rows = _rows(capsys.readouterr().out)
    assert any(r["variant"] == "strong_mpr" for r in rows)


def test_region_byte_stability(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert main(["region", "--scenario", FIG2, "--out", str(path), *FAST_REGION]) == 0
    capsys.readouterr()
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_region_rejects_unknown_variant(capsys):
    assert main(["region", "--scenario", FIG2, "--variant", "csma", *FAST_REGION]) == 2
    assert "unknown region variant" in capsys.readouterr().err


def test_sweep_rate_orderings(capsys):
    assert main([
        "sweep-rate", "--scenario", SWEEP, "--grid-step", "1.75", "--restarts", "30",
        "--out", "-",
    ]) == 0
    header, rows = _rows(capsys.readouterr().out)
    assert list(header) == list(SWEEP_COLUMNS)
    assert [r["rate"] for r in rows] == ["0.5", "2.25", "4"]
    for row in rows:
        # Scheduled access can only beat random access, which beats no
        # cooperation, at every spectral rate on an interference-degraded table.
        assert float(row["tdma_mu_p"]) >= float(row["ra_mu_p"]) - 1e-9
        assert float(row["ra_mu_p"]) >= float(row["nc_mu_p"]) - 1e-9
        assert float(row["tdma_lambda_s"]) >= float(row["ra_lambda_s"]) - 1e-9
        assert float(row["ra_lambda_s"]) >= float(row["nc_lambda_s"]) - 1e-9
    for col in SWEEP_COLUMNS[1:]:
        series = [float(r[col]) for r in rows]
        assert all(a >= b - 1e-9 for a, b in zip(series, series[1:]))


def test_sweep_rate_needs_phy_mode(capsys):
    assert main(["sweep-rate", "--scenario", FIG2, "--grid-step", "1.75"]) == 2
    assert "pins the link table explicitly" in capsys.readouterr().err


def _small_sim_doc():
    doc = _fig2_doc()
    doc["system"]["variant"] = "dominant1"
    doc["sim"] = {
        "horizon": 30_000, "warmup": 3_000, "replicas": 2, "seed": 1, "sample_every": 500,
    }
    return doc


def test_simulate_runs_and_is_deterministic(tmp_path, capsys):
    path = _write(tmp_path, _small_sim_doc())
    assert main(["simulate", "--scenario", path]) == 0
    first = capsys.readouterr().out
    assert first.startswith(
        "variant=dominant1 lambda_p=0.3 lambda_s=0.2 "
        "horizon=30000 warmup=3000 replicas=2 seed=1\n"
    )
    assert first.strip().split("\n")[-1].startswith("verdict: ")
    assert main(["simulate", "--scenario", path]) == 0
    assert capsys.readouterr().out == first


def test_simulate_seed_changes_output(tmp_path, capsys):
    path = _write(tmp_path, _small_sim_doc())
    assert main(["simulate", "--scenario", path]) == 0
    first = capsys.readouterr().out
    assert main(["simulate", "--scenario", path, "--seed", "2"]) == 0
    assert capsys.readouterr().out != first


def test_validate_passes_and_is_byte_stable(capsys):
    args = ["validate", "--scenario", FIG2, "--grid-step", "0.3", "--restarts", "40"]
    assert main(args) == 0
    first = capsys.readouterr().out
    lines = first.strip().split("\n")
    assert lines[0] == (
        "PASS links: table loaded, interfered successes within direct ones (strong_mpr=0)"
    )
    assert all(line.startswith("PASS ") for line in lines)
    names = [line.split()[1].rstrip(":") for line in lines[1:]]
    assert names == [
        "primary-rate", "storage-rule-invariance", "bound-ordering",
        "service-order-equivalence", "priority-boundary-affine", "access-ordering",
        "relay-share-monotone", "simulation-cross-check", "optimizer-determinism",
    ]
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_validate_flags_corrupted_tables(tmp_path, capsys):
    doc = _fig2_doc()
    doc["links"]["outage"]["s_pd_vs_sd"] = 0.1  # interfered success 0.9 > direct 0.8
    path = _write(tmp_path, doc)
    assert main(["validate", "--scenario", path, "--grid-step", "0.3"]) == 1
    out = capsys.readouterr().out
    assert out.startswith("FAIL scenario-load: ")
    assert "exceeds direct" in out


def test_unknown_scenario_key_exit_codes(tmp_path, capsys):
    doc = _fig2_doc()
    doc["system"]["keep_prioritee"] = 1
    path = _write(tmp_path, doc)
    # Commands that load eagerly report a usage error...
    assert main(["rates", "--scenario", path, "--variant", "dominant1"]) == 2
    assert "system.keep_prioritee" in capsys.readouterr().err
    # ...while validate records the load failure as its first failing check.
    assert main(["validate", "--scenario", path, "--grid-step", "0.3"]) == 1
    assert capsys.readouterr().out.startswith("FAIL scenario-load: ")


def test_missing_scenario_file(capsys):
    assert main(["rates", "--scenario", "no_such.yaml", "--variant", "tdma"]) == 2
    assert "no_such.yaml" in capsys.readouterr().err
