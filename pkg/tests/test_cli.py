import csv
import subprocess
import sys

import pytest

from bdsim.cli import main
from bdsim.decks import OTA_DECK


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def bench_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench")
    assert main(["bench-ota", "--out", str(out)]) == 0
    return out


def test_divider_op(tmp_path):
    assert main(["run", "divider", "--analysis", "op", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "op.txt").read_text()
    assert "v(out) = 0.5\n" in text and "i(v1) = " in text


def test_netlist_file(tmp_path, divider_text):
    deck = tmp_path / "d.cir"
    deck.write_text(divider_text)
    assert main(["run", str(deck), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "op.txt").exists()


def test_ota_all_analyses(tmp_path):
    assert main(["run", "ota", "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "ac.csv")[0] == ["freq_hz", "mag_db", "phase_deg"]
    assert read_csv(tmp_path / "noise.csv")[0] == ["freq_hz", "onoise_v_rthz", "inoise_v_rthz"]
    dc = read_csv(tmp_path / "dc.csv")
    assert dc[0] == ["vin_v", "vcm_v", "vout_v"] and len(dc) == 1 + 71 * 5
    op = (tmp_path / "op.txt").read_text()
    assert op.count("saturation") == 8 and "gmb" in op


def test_ac_csv_matches_report_gain(tmp_path, bench_dir):
    assert main(["run", "ota", "--analysis", "ac", "--out", str(tmp_path)]) == 0
    first = read_csv(tmp_path / "ac.csv")[1]
    gain = {row[0]: row for row in read_csv(bench_dir / "bench.csv")}["Open loop gain"]
    assert float(first[1]) == pytest.approx(float(gain[1]), abs=1e-9)


def test_tran_csv(tmp_path):
    deck = tmp_path / "rc.cir"
    deck.write_text("rc\nV1 in 0 PULSE(0 1 0 1n 1n 1)\nR1 in out 1k\nC1 out 0 1n\n.tran 10n 1u\n")
    assert main(["run", str(deck), "--analysis", "tran", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "tran.csv")
    assert rows[0] == ["time_s", "v_in", "v_out"] and len(rows) == 102


def test_temperature_list(tmp_path):
    assert main(["run", "ota", "--analysis", "ac", "--temp=-20,70", "--out", str(tmp_path)]) == 0
    cold = float(read_csv(tmp_path / "ac_-20C.csv")[1][1])
    hot = float(read_csv(tmp_path / "ac_70C.csv")[1][1])
    assert cold > hot


def test_missing_file(tmp_path, capsys):
    missing = str(tmp_path / "nope.cir")
    assert main(["run", missing]) == 1
    assert missing in capsys.readouterr().err


def test_parse_error_names_line(tmp_path, capsys):
    deck = tmp_path / "bad.cir"
    deck.write_text("t\nV1 a 0 1\nR1 a 0 1k\nX1 a 0 foo\n")
    assert main(["run", str(deck)]) == 1
    assert "line 4" in capsys.readouterr().err


def test_topology_error(tmp_path):
    deck = tmp_path / "float.cir"
    deck.write_text("t\nV1 a 0 1\nR1 a 0 1k\nC1 a b 1p\nR2 b c 1k\n")
    assert main(["run", str(deck)]) == 1


def test_missing_directive(tmp_path, capsys):
    assert main(["run", "divider", "--analysis", "ac", "--out", str(tmp_path)]) == 1
    assert ".ac" in capsys.readouterr().err


def test_usage_error_is_input_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "divider", "--analysis", "bogus"])
    assert exc.value.code == 1


def test_convergence_failure(tmp_path, capsys):
    deck = tmp_path / "stiff.cir"
    deck.write_text(OTA_DECK.replace(".op", ".options maxiter=1 gmin_steps=1 src_steps=1\n.op"))
    assert main(["run", str(deck), "--analysis", "op", "--out", str(tmp_path)]) == 2
    assert "convergence" in capsys.readouterr().err


def test_determinism(tmp_path):
    for name in ("a", "b"):
        assert main(["run", "ota", "--out", str(tmp_path / name)]) == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_table_format(tmp_path, capsys):
    assert main(["run", "ota", "--analysis", "ac", "--format", "table", "--out", str(tmp_path)]) == 0
    assert "UGB" in capsys.readouterr().out


class TestBench:
    def test_report_rows(self, bench_dir):
        rows = read_csv(bench_dir / "bench.csv")
        assert rows[0] == ["metric", "value", "unit", "status"]
        assert len(rows) == 12 and all(r[3] == "ok" for r in rows[1:])
        units = dict((r[0], r[2]) for r in rows[1:])
        assert units["Positive Slew Rate"] == "mV/μs" and units["Output Referred Noise"] == "nV/√Hz"

    def test_side_tables(self, bench_dir):
        temps = read_csv(bench_dir / "temperature.csv")
        assert [r[0] for r in temps[1:]] == ["-20.0", "0.0", "27.0", "70.0"]
        assert read_csv(bench_dir / "linear_range.csv")[0] == ["low_v", "high_v", "width_v"]
        for name in ("ac", "tran", "swing", "dc", "dc_follower"):
            assert (bench_dir / f"{name}.csv").exists()

    def test_lower_supply_lowers_power(self, tmp_path, bench_dir):
        assert main(["bench-ota", "--vdd", "0.7", "--out", str(tmp_path)]) in (0, 3)
        p07 = float(read_csv(tmp_path / "bench.csv")[1][1])
        p09 = float(read_csv(bench_dir / "bench.csv")[1][1])
        assert p07 < p09

    def test_partial_report(self, tmp_path):
        deck = tmp_path / "weak.cir"
        # the input pair loses its bulk transconductance: gain far below unity
        deck.write_text(OTA_DECK.replace("kp=200u gamma=0.5", "kp=200u gamma=0.001"))
        assert main(["bench-ota", "--deck", str(deck), "--out", str(tmp_path)]) == 3
        rows = read_csv(tmp_path / "bench.csv")
        assert len(rows) == 12
        assert {r[0] for r in rows if r[3] == "failed"} >= {"Unity Gain Bandwidth", "Phase Margin"}

    def test_bad_option(self):
        assert main(["bench-ota", "--vdd", "-1"]) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bdsim", "run", "divider", "--analysis", "op",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and (tmp_path / "op.txt").exists()
