import json

import pytest

from pairscan.cli import EXIT_NUMERIC, EXIT_PARSE, main
from pairscan.io import read_calls, read_pairs


@pytest.fixture
def simulated(tmp_path):
    path = tmp_path / "sim.tsv"
    rc = main(["simulate", "--length", "100000", "--variant", "deletion:50000:500:0.9",
               "--seed", "11", "--out", str(path)])
    assert rc == 0
    return path


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_simulate_is_deterministic(simulated, tmp_path):
    again = tmp_path / "again.tsv"
    assert main(["--seed", "11", "simulate", "--length", "100000", "--variant", "deletion:50000:500:0.9",
                 "--out", str(again)]) == 0
    assert again.read_bytes() == simulated.read_bytes()
    assert read_pairs(simulated).meta["seed"] == "11"


def test_estimate(simulated, capsys):
    assert main(["estimate", str(simulated), "--length", "100000"]) == 0
    rep = _json(capsys)
    assert rep["schema_version"] == 1 and rep["kind"] == "estimate"
    assert rep["data"]["delta"] == pytest.approx(200, abs=2)
    assert rep["data"]["kappa2"] == pytest.approx(0.27, rel=0.1)


def test_scan_finds_planted_deletion(simulated, tmp_path):
    calls_path = tmp_path / "calls.bed"
    assert main(["scan", str(simulated), "--scores", "ZB", "--tracks", str(tmp_path / "tr"),
                 "--out", str(calls_path)]) == 0
    calls = read_calls(calls_path)
    assert any(c.score_type == "ZB" and c.start <= 50_500 and c.end >= 50_000 for c in calls)
    assert (tmp_path / "tr" / "chrSim.ZB.tsv").exists()


def test_scan_json(simulated, capsys):
    assert main(["scan", str(simulated), "--scores", "ZB", "Zminus", "--json", "--step", "20"]) == 0
    rep = _json(capsys)
    assert set(rep["data"]["thresholds"]) == {"ZB", "Zminus"}


def test_pvalue_and_threshold(capsys):
    assert main(["pvalue", "--statistic", "fixed", "--m", "1000", "--x", "6.1", "--rho", "1", "--window", "40",
                 "--w", "3", "--r", "0.1", "--mark-sd", "4"]) == 0
    assert _json(capsys)["data"]["p_unit"] == pytest.approx(0.050, abs=0.01)
    assert main(["threshold", "--statistic", "max_w_Z", "--alpha", "0.05"]) == 0
    assert _json(capsys)["data"]["threshold"] == pytest.approx(11.5, abs=0.1)


def test_power(capsys):
    assert main(["power", "--statistic", "fixed_ell", "--threshold", "11.4", "--true-r", "0.1",
                 "--true-w", "3.0", "--w", "2.0"]) == 0
    assert 0.7 < _json(capsys)["data"]["power"] < 0.9


def test_tables_sec62(capsys):
    assert main(["tables", "sec62"]) == 0
    rows = _json(capsys)["data"]
    assert len(rows) == 2 and rows[0]["published"]["integral"] == 0.053


def test_overlap(tmp_path, capsys):
    header = "#chrom\tstart\tend\tscore_type\tpeak\tpeak_pos\tthreshold\talpha\n"
    (tmp_path / "b").write_text(header + "c\t1000\t1600\tZB\t20\t1200\t10\t0.05\n")
    (tmp_path / "m").write_text(header + "c\t900\t1100\tZminus\t3\t950\t2\t0.05\n")
    (tmp_path / "p").write_text(header + "c\t1500\t1700\tZplus\t3\t1650\t2\t0.05\n")
    assert main(["overlap", str(tmp_path / "b"), str(tmp_path / "m"), str(tmp_path / "p")]) == 0
    assert _json(capsys)["data"]["flanked"] == 1


def test_exit_codes(tmp_path, capsys):
    assert main(["estimate", str(tmp_path / "missing.tsv")]) == EXIT_PARSE
    bad = tmp_path / "bad.tsv"
    bad.write_text("#chrom\tx_plus\tx_minus\nchr1\tabc\t1\n")
    assert main(["scan", str(bad)]) == EXIT_PARSE
    assert "line 2" in capsys.readouterr().err
    assert main(["threshold", "--statistic", "fixed", "--alpha", "1e-300"]) == EXIT_NUMERIC
    assert main(["pvalue", "--statistic", "ZB", "--x", "5", "--p", "1.5"]) == EXIT_NUMERIC
    with pytest.raises(SystemExit):
        main(["simulate", "--variant", "nonsense", "--out", str(tmp_path / "x")])
