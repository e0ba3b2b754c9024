"""Characterization bench for a bulk-driven OTA deck.

The deck must provide nodes ``inp``, ``inn``, ``out`` and ``vdd`` driven by
sources ``vinp``, ``vinn`` and ``vdd``; an optional ``vb`` gate-bias source
follows the supply when the supply is changed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from . import measure
from .analyses import (run_ac, run_dc_sweep, run_noise, run_op, run_tran,
                       set_temperature)
from .errors import BdsimError
from .netlist import Ac, DcSweep, Noise, Pulse, Sin, Tran, VSource

log = logging.getLogger(__name__)

TEMPS_C = (-20.0, 0.0, 27.0, 70.0)


@dataclass
class BenchConfig:
    vdd: float = 0.9
    spot_noise_hz: float = 1e3
    settle_tol: float = 0.10
    step_v: float = 0.9
    step_delay: float = 0.2e-6
    step_width: float = 2.3e-6
    tran_step: float = 5e-9
    swing_freq: float = 10e3
    ac: Ac = Ac("dec", 20, 1.0, 100e6)
    temps_c: tuple = TEMPS_C


def with_supply(circuit, vdd):
    """Set the supply (and a ``vb`` gate bias, if present) to ``vdd``."""
    out = circuit.replace_device("vdd", dc=vdd)
    if any(d.name == "vb" for d in circuit.devices):
        out = out.replace_device("vb", dc=vdd)
    return out


def follower(circuit, stimulus=None):
    """Unity-gain follower: the inverting input is tied to the output and the
    non-inverting input carries ``stimulus`` (a Pulse or Sin, or 0 V DC)."""
    devices = []
    for d in circuit.devices:
        if d.name == "vinn":
            d = VSource("vinn", "inn", "out", dc=0.0)
        elif d.name == "vinp":
            dc = 0.0 if stimulus is None else stimulus(0.0)
            d = replace(d, dc=dc, ac_mag=0.0, ac_phase=0.0, tran=stimulus)
        devices.append(d)
    return circuit.with_devices(devices)


def _try(report, name, fn):
    try:
        value = fn()
    except (BdsimError, ValueError, FloatingPointError) as exc:
        report.errors[name] = f"{type(exc).__name__}: {exc}"
        log.warning("%s failed: %s", name, exc)
        return None
    return value


def bench_ota(circuit, cfg=None):
    """Run the full characterization and return ``(BenchReport, data)``.

    ``data`` holds the raw analysis results used for the CSV dumps.
    The operating point is run first and its failure propagates.
    """
    cfg = cfg or BenchConfig()
    ckt = with_supply(circuit, cfg.vdd)
    report = measure.BenchReport(spot_noise_hz=cfg.spot_noise_hz)
    data = {}

    op = run_op(ckt)
    data["op"] = op
    report.power_w = measure.avg_power(op, "vdd")

    ac = _try(report, "gain_db", lambda: run_ac(ckt, cfg.ac, op=op))
    if ac is not None:
        data["ac"] = ac
        report.gain_db = _try(report, "gain_db", lambda: measure.dc_gain_db(ac, "out"))
        report.bw3db_hz = _try(report, "bw3db_hz", lambda: measure.bandwidth_3db(ac, "out"))
        pm = _try(report, "ugb_hz", lambda: measure.ugb_and_phase_margin(ac, "out"))
        if pm is not None:
            report.ugb_hz, report.phase_margin_deg = pm
        else:
            report.errors["phase_margin_deg"] = report.errors["ugb_hz"]
    else:
        for name in ("bw3db_hz", "ugb_hz", "phase_margin_deg"):
            report.errors[name] = report.errors["gain_db"]

    # step response of the follower: rising edge, then falling edge
    t_fall = cfg.step_delay + cfg.step_width
    pulse = Pulse(0.0, cfg.step_v, cfg.step_delay, 1e-9, 1e-9, cfg.step_width, 0.0)
    tran = _try(report, "sr_pos_v_per_s", lambda: run_tran(
        follower(ckt, pulse), Tran(cfg.tran_step, 2 * t_fall)))
    if tran is not None:
        data["tran"] = tran
        rise = tran.window(0.0, t_fall)
        fall = tran.window(t_fall, 2 * t_fall)
        report.sr_pos_v_per_s = _try(report, "sr_pos_v_per_s",
                                     lambda: measure.slew_rate(rise, "out", "rising"))
        report.sr_neg_v_per_s = _try(report, "sr_neg_v_per_s",
                                     lambda: measure.slew_rate(fall, "out", "falling"))
        report.settling_s = _try(report, "settling_s", lambda: measure.settling_time(
            rise, "out", cfg.settle_tol, t_step=cfg.step_delay))
    else:
        for name in ("sr_neg_v_per_s", "settling_s"):
            report.errors[name] = report.errors["sr_pos_v_per_s"]

    # large sine through the follower, rail to rail at the input
    period = 1.0 / cfg.swing_freq
    sine = Sin(cfg.vdd / 2, cfg.vdd / 2, cfg.swing_freq)
    swing = _try(report, "swing_vpp", lambda: run_tran(
        follower(ckt, sine), Tran(period / 200, 2 * period)))
    if swing is not None:
        data["swing"] = swing
        report.swing_vpp = measure.output_swing(swing, "out", skip=period)

    def spot_noise():
        f = cfg.spot_noise_hz
        return run_noise(ckt, Noise("out", None, Ac("lin", 1, f, 2 * f)), op=op)

    noise = _try(report, "out_noise_v_rthz", spot_noise)
    if noise is not None:
        report.out_noise_v_rthz = float(noise.onoise[0])
        report.in_noise_v_rthz = float(noise.inoise[0])
    else:
        report.errors["in_noise_v_rthz"] = report.errors["out_noise_v_rthz"]

    # DC transfer curves: open loop vs common mode, follower for the linear range
    sweep = DcSweep("vinp", -0.5, 0.9, 0.02, "vinn", 0.0, 0.5, 0.125)
    dc = _try(report, "dc", lambda: run_dc_sweep(ckt, sweep))
    if dc is not None:
        data["dc"] = dc
    fdc = _try(report, "linear_range", lambda: run_dc_sweep(
        follower(ckt), DcSweep("vinp", 0.0, cfg.vdd, 0.01)))
    if fdc is not None:
        data["dc_follower"] = fdc
        vin, vout = fdc.curve("out")
        report.linear_range = _try(report, "linear_range",
                                   lambda: measure.linear_range(vin, vout))

    for t in cfg.temps_c:
        sweep_t = _try(report, f"gain@{t:g}C",
                       lambda: run_ac(set_temperature(ckt, t), cfg.ac))
        if sweep_t is not None:
            report.gain_vs_temp[t] = measure.dc_gain_db(sweep_t, "out")
    return report, data
