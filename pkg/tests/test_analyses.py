import math

import numpy as np
import pytest

from bdsim.analyses import (run_ac, run_dc_sweep, run_noise, run_op, run_tran,
                            set_temperature, sweep_values, temperature_sweep)
from bdsim.bench import follower
from bdsim.decks import OTA_DECK
from bdsim.device_model import BOLTZMANN, T_NOMINAL
from bdsim.errors import DomainError
from bdsim.measure import dc_gain_db
from bdsim.netlist import Ac, DcSweep, Noise, Pulse, Tran, parse_netlist
from bdsim.solver import SolveOptions

RC = "rc\nV1 in 0 DC 0 AC 1\nR1 in out 1k\nC1 out 0 1p\n"
TIGHT = SolveOptions(abstol=1e-16, reltol=1e-12, vntol=1e-13)


@pytest.fixture(scope="module")
def ota():
    return parse_netlist(OTA_DECK)


@pytest.fixture(scope="module")
def ota_op(ota):
    return run_op(ota)


class TestOp:
    def test_divider(self, divider_text):
        assert run_op(parse_netlist(divider_text)).v("out") == pytest.approx(0.5, abs=1e-9)

    def test_ota_all_saturated(self, ota_op):
        assert len(ota_op.devices) == 8
        assert {ev.region for ev in ota_op.devices.values()} == {"saturation"}
        assert ota_op.warnings == []

    def test_ota_tail_current(self, ota_op):
        # the mirror pair carries the tail source current
        i1, i2 = ota_op.devices["m1"].id, ota_op.devices["m2"].id
        assert i1 + i2 == pytest.approx(2.1e-6, rel=1e-6)


class TestDcSweep:
    def test_sweep_values(self):
        assert sweep_values(0, 1, 0.25) == pytest.approx([0, 0.25, 0.5, 0.75, 1.0])
        assert sweep_values(1, 0, -0.5) == pytest.approx([1, 0.5, 0])
        assert len(sweep_values(-0.5, 0.9, 0.02)) == 71

    def test_divider_linear(self, divider_text):
        res = run_dc_sweep(parse_netlist(divider_text), DcSweep("v1", 0, 1, 0.1))
        vin, vout = res.curve("out")
        assert vout == pytest.approx(0.5 * vin, abs=1e-9)
        assert res.valid.all() and res.failures == []

    def test_point_equals_op(self, ota):
        d = DcSweep("vinp", -0.2, 0.2, 0.1)
        res = run_dc_sweep(ota, d)
        for j, v in enumerate(res.values):
            op = run_op(ota.replace_device("vinp", dc=float(v)))
            for node in ota.nodes:
                assert res.voltages[node][0, j] == pytest.approx(op.v(node), abs=1e-9)

    def test_two_source_sweep(self, ota):
        res = run_dc_sweep(ota, DcSweep("vinp", -0.5, 0.9, 0.02, "vinn", 0, 0.5, 0.125))
        assert res.voltages["out"].shape == (5, 71) and res.valid.all()
        for k in range(5):
            vin, vout = res.curve("out", k)
            mid = (vout > vout.min() + 0.1 * np.ptp(vout)) & (vout < vout.max() - 0.1 * np.ptp(vout))
            assert np.all(np.diff(vout[mid]) > 0)

    def test_follower_tracks_input(self, ota):
        res = run_dc_sweep(follower(ota), DcSweep("vinp", 0.0, 0.9, 0.05))
        vin, vout = res.curve("out")
        assert np.all(np.diff(vout) > 0)
        centre = (vin >= 0.3) & (vin <= 0.6)
        slope = np.polyfit(vin[centre], vout[centre], 1)[0]
        assert 0.5 < slope < 1.0


class TestAc:
    def test_rc_pole(self):
        c = parse_netlist(RC)
        fp = 1 / (2 * math.pi * 1e3 * 1e-12)
        assert fp == pytest.approx(159.155e6, rel=1e-6)
        sweep = run_ac(c, Ac("lin", 1, fp, 2 * fp))
        h = sweep.transfer("out")[0]
        assert abs(h) == pytest.approx(1 / math.sqrt(2), rel=1e-9)
        assert math.degrees(np.angle(h)) == pytest.approx(-45.0, abs=1e-6)

    def test_rc_dc_passthrough(self):
        h = run_ac(parse_netlist(RC), Ac("dec", 1, 1.0, 10.0)).transfer("out")
        assert abs(h[0]) == pytest.approx(1.0, abs=1e-9)

    def test_grid(self):
        sweep = run_ac(parse_netlist(RC), Ac("dec", 20, 1.0, 100e6))
        assert len(sweep.freqs) == 161 and np.all(np.diff(sweep.freqs) > 0)
        assert sweep.freqs[-1] == pytest.approx(100e6)

    def test_ota_gain(self, ota, ota_op):
        sweep = run_ac(ota, Ac("dec", 10, 1.0, 1e8), op=ota_op)
        assert 6 < dc_gain_db(sweep, "out") < 20

    def test_ac_matches_dc_small_signal(self, ota):
        base = run_op(ota, TIGHT)

        def vout(dv):
            c = ota.replace_device("vinp", dc=dv / 2).replace_device("vinn", dc=-dv / 2)
            return run_op(c, TIGHT, initial_guess=base.x).v("out")

        fd = (vout(1e-6) - vout(-1e-6)) / 2e-6
        h = abs(run_ac(ota, Ac("lin", 1, 1e-3, 1.0), op=base).transfer("out")[0])
        assert h == pytest.approx(abs(fd), rel=5e-3)


class TestTran:
    def rc(self, n):
        c = parse_netlist("t\nV1 in 0 DC 1\nR1 in out 1k\nC1 out 0 1u IC=0\n")
        w = run_tran(c, Tran(1e-3 / n, 1e-3))
        return abs(np.interp(1e-3, w.times, w.v("out")) - (1 - math.exp(-1))), w

    def test_rc_charging(self):
        err, w = self.rc(100)
        assert err <= 1e-3 * (1 - math.exp(-1))
        assert w.times[0] == 0 and w.v("out")[0] == pytest.approx(0.0, abs=1e-12)

    def test_second_order(self):
        e1, _ = self.rc(100)
        e2, _ = self.rc(200)
        assert 3.5 <= e1 / e2 <= 4.5

    def test_current_into_capacitor_ramps(self):
        c = parse_netlist("t\nI1 0 out 20u\nC1 out 0 1p IC=0\nR1 out 0 1e15\n")
        w = run_tran(c, Tran(1e-9, 50e-9))
        slope = np.diff(w.v("out")) / np.diff(w.times)
        assert slope == pytest.approx(20e6, rel=1e-4)

    def test_pulse_source_starts_from_op(self):
        c = parse_netlist("t\nV1 in 0 PULSE(0.2 1 10n 1n 1n 1u)\nR1 in out 1k\nC1 out 0 1p\n")
        w = run_tran(c, Tran(1e-10, 20e-9))
        assert w.v("out")[0] == pytest.approx(0.2, abs=1e-9)
        assert w.v("out")[-1] == pytest.approx(1.0, abs=1e-3)

    def test_sinusoidal_steady_state(self):
        f = 1e6
        c = parse_netlist(f"t\nV1 in 0 SIN(0 1 {f}) AC 1\nR1 in out 1k\nC1 out 0 100p\n")
        tau = 1e-7
        w = run_tran(c, Tran(1 / f / 400, 10 * tau + 2 / f))
        tail = w.window(10 * tau)
        amp = 0.5 * np.ptp(tail.v("out"))
        h = abs(run_ac(c, Ac("lin", 1, f, 2 * f)).transfer("out")[0])
        assert amp == pytest.approx(h, rel=1e-2)

    def test_capacitor_current_matches_branch_current(self):
        c = parse_netlist("t\nV1 in 0 PULSE(0 1 0 10n 10n 1)\nR1 in out 1k\nC1 out 0 10p\n")
        w = run_tran(c, Tran(0.1e-9, 50e-9))
        icap = 10e-12 * np.gradient(w.v("out"), w.times)
        # the source current is SPICE-signed: negative while it delivers charge
        assert -w.i("v1")[5:-5] == pytest.approx(icap[5:-5], rel=2e-2, abs=1e-6)

    def test_mos_step_converges(self, ota):
        w = run_tran(follower(ota, Pulse(0, 0.9, 0.1e-6, 1e-9, 1e-9, 1.0)), Tran(10e-9, 1e-6))
        assert np.all(np.isfinite(w.v("out")))
        assert w.v("out")[-1] > w.v("out")[0] + 0.2


def resistor_noise(text, node="a", f=(1, 10, 100, 1e3, 1e4)):
    c = parse_netlist(text)
    return run_noise(c, Noise(node, None, Ac("dec", 1, f[0], f[-1])))


class TestNoise:
    def test_resistor_density(self):
        res = resistor_noise("t\n.temp 26.85\nR1 a 0 1k\n")
        assert res.onoise == pytest.approx(4.0704e-9, rel=5e-3)
        assert np.ptp(res.onoise) <= 1e-12 * res.onoise[0]
        exact = math.sqrt(4 * BOLTZMANN * 300.0 * 1e3)
        assert res.onoise[0] == pytest.approx(exact, rel=1e-9)

    def test_series_resistors_add_in_power(self):
        one = resistor_noise("t\nR1 a 0 1k\n").onoise_psd
        two = resistor_noise("t\nR1 a b 1k\nR2 b 0 1k\n").onoise_psd
        assert two == pytest.approx(2 * one, rel=1e-9)

    def test_contributions_sum(self, ota, ota_op):
        res = run_noise(ota, Noise("out", None, Ac("dec", 5, 10, 1e6)), op=ota_op)
        total = sum(res.contributions.values())
        assert res.onoise_psd == pytest.approx(total, rel=1e-9)
        assert np.all(res.onoise_psd >= 0) and len(res.contributions) == 8

    def test_excluding_a_device_removes_its_share(self, ota, ota_op):
        d = Noise("out", None, Ac("dec", 5, 10, 1e6))
        full = run_noise(ota, d, op=ota_op)
        less = run_noise(ota, d, op=ota_op, exclude=["m3"])
        assert full.onoise_psd - less.onoise_psd == pytest.approx(full.contributions["m3"], rel=1e-9)

    def test_input_referred(self, ota, ota_op):
        res = run_noise(ota, Noise("out", None, Ac("dec", 5, 10, 1e6)), op=ota_op)
        assert res.inoise == pytest.approx(res.onoise / res.gain, rel=1e-12)
        h = abs(run_ac(ota, Ac("dec", 5, 10, 1e6), op=ota_op).transfer("out"))
        assert res.gain == pytest.approx(h, rel=1e-12)

    def test_named_input(self, ota, ota_op):
        res = run_noise(ota, Noise("out", "vinp", Ac("lin", 1, 1e3, 2e3)), op=ota_op)
        both = run_noise(ota, Noise("out", None, Ac("lin", 1, 1e3, 2e3)), op=ota_op)
        # a named input is driven at 1 V alone: same differential drive as the
        # +-0.5 V deck stimulus, plus 0.5 V of common mode
        assert res.gain[0] == pytest.approx(both.gain[0], rel=0.05)

    def test_no_input_gives_nan(self):
        assert np.isnan(resistor_noise("t\nR1 a 0 1k\n").inoise).all()


class TestTemperature:
    def test_nominal(self, ota):
        assert set_temperature(ota, 27.0).models == ota.models

    def test_below_absolute_zero(self, ota):
        with pytest.raises(DomainError):
            set_temperature(ota, -300)

    def test_resistor_tc(self, divider_text):
        c = set_temperature(parse_netlist(divider_text), 127.0, resistor_tc=1e-3)
        assert c.device("r1").ohms == pytest.approx(1100.0)

    def test_gain_decreases_with_temperature(self, ota):
        sweeps = temperature_sweep(ota, [-20, 0, 27, 70], Ac("dec", 5, 1, 1e3))
        gains = [dc_gain_db(s, "out") for s in sweeps.values()]
        assert all(a > b for a, b in zip(gains, gains[1:]))

    def test_cards_scale(self, ota):
        hot = set_temperature(ota, 70.0)
        assert hot.models["nbd"].kp < ota.models["nbd"].kp
        assert ota.models["nbd"].tnom == T_NOMINAL
