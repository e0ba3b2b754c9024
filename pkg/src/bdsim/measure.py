"""Amplifier figures of merit from analysis results."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from .errors import DomainError, NotFound, NotSettled
from .solver import OpPoint


# -- frequency domain --------------------------------------------------------------

def _loglog_crossing(freqs, mag, level):
    """First frequency where ``mag`` falls through ``level`` (log-log interpolation)."""
    below = np.nonzero(mag < level)[0]
    below = below[below > 0]
    if len(below) == 0:
        raise NotFound(f"response never falls below {level:.4g}")
    k = below[0]
    lf0, lf1 = math.log(freqs[k - 1]), math.log(freqs[k])
    lm0, lm1 = math.log(mag[k - 1]), math.log(mag[k])
    frac = (math.log(level) - lm0) / (lm1 - lm0)
    return math.exp(lf0 + frac * (lf1 - lf0)), k


def dc_gain_db(sweep, node):
    if len(sweep.freqs) == 0:
        raise DomainError("empty sweep")
    mag = abs(sweep.transfer(node)[0])
    if mag == 0:
        raise DomainError("zero response at the lowest frequency")
    return float(20.0 * math.log10(mag))


def bandwidth_3db(sweep, node):
    mag = np.abs(sweep.transfer(node))
    f, _ = _loglog_crossing(sweep.freqs, mag, mag[0] / math.sqrt(2.0))
    return float(f)


def unwrapped_phase_deg(h):
    """Phase in degrees, unwrapped from the first sample, which is folded to
    0 (non-inverting) or shifted by 180 (inverting) so it starts near zero."""
    ph = np.unwrap(np.angle(h))
    ph -= 2 * math.pi * round(ph[0] / (2 * math.pi))
    if abs(ph[0]) > math.pi / 2:
        ph -= math.copysign(math.pi, ph[0])
    return np.degrees(ph)


def ugb_and_phase_margin(sweep, node):
    """Unity-gain frequency and 180 + phase there, in degrees."""
    h = sweep.transfer(node)
    mag = np.abs(h)
    if mag[0] <= 1.0:
        raise NotFound("gain is below unity at the lowest frequency")
    fu, k = _loglog_crossing(sweep.freqs, mag, 1.0)
    ph = unwrapped_phase_deg(h)
    lf0, lf1 = math.log(sweep.freqs[k - 1]), math.log(sweep.freqs[k])
    frac = (math.log(fu) - lf0) / (lf1 - lf0)
    phase = ph[k - 1] + frac * (ph[k] - ph[k - 1])
    return float(fu), float(180.0 + phase)


def rolloff_db_per_decade(sweep, node, f1, f2):
    """Average magnitude slope between ``f1`` and ``f2`` (interpolated in log f)."""
    lf = np.log10(sweep.freqs)
    db = 20.0 * np.log10(np.abs(sweep.transfer(node)))
    if not (sweep.freqs[0] <= f1 < f2 <= sweep.freqs[-1]):
        raise NotFound(f"[{f1:.3g}, {f2:.3g}] Hz is outside the sweep")
    d1, d2 = np.interp([math.log10(f1), math.log10(f2)], lf, db)
    return float((d2 - d1) / (math.log10(f2) - math.log10(f1)))


# -- time domain ---------------------------------------------------------------------

def _final_value(y):
    n = max(1, int(math.ceil(0.05 * len(y))))
    return float(np.mean(y[-n:])), y[-n:]


def _rising_cross(t, y, level, start=0):
    idx = np.nonzero(y[start:] >= level)[0]
    if len(idx) == 0:
        return None, None
    k = start + idx[0]
    if k == 0:
        return float(t[0]), 0
    frac = (level - y[k - 1]) / (y[k] - y[k - 1])
    return float(t[k - 1] + frac * (t[k] - t[k - 1])), k


def slew_rate(wave, node, edge="rising"):
    """10-90 % slope of the step on ``node``, in V/s (always positive)."""
    t, v = wave.times, wave.v(node)
    v0 = float(v[0])
    vf, _ = _final_value(v)
    delta = vf - v0
    if delta == 0 or (edge == "rising") != (delta > 0):
        raise NotFound(f"no {edge} edge on {node}")
    y = (v - v0) / delta
    t10, k10 = _rising_cross(t, y, 0.1)
    if t10 is None:
        raise NotFound("10% level never reached")
    t90, _ = _rising_cross(t, y, 0.9, k10)
    if t90 is None or t90 <= t10:
        raise NotFound("no monotone 10-90% traversal")
    return 0.8 * abs(delta) / (t90 - t10)


def settling_time(wave, node, tolerance=0.10, t_step=None):
    """Time after which ``node`` stays within ``tolerance`` * |step| of its final value.

    Returns an absolute time, or the delay from ``t_step`` when given.
    """
    t, v = wave.times, wave.v(node)
    vf, tail = _final_value(v)
    band = tolerance * abs(vf - v[0])
    if band == 0 or np.max(np.abs(tail - vf)) > band:
        raise NotSettled(f"{node} has not settled by the end of the waveform")
    err = np.abs(v - vf)
    outside = np.nonzero(err > band)[0]
    if len(outside) == 0:
        ts = float(t[0])
    else:
        k = outside[-1]
        frac = (err[k] - band) / (err[k] - err[k + 1])
        ts = float(t[k] + frac * (t[k + 1] - t[k]))
    return ts if t_step is None else ts - t_step


def output_swing(wave, node, skip=0.0):
    """Peak-to-peak excursion after discarding the first ``skip`` seconds."""
    t, v = wave.times, wave.v(node)
    v = v[t >= t[0] + skip]
    return float(v.max() - v.min()) if len(v) else 0.0


def avg_power(result, source):
    """Power delivered by ``source``: V*|I| at DC, or the mean of -v(t)*i(t)."""
    if isinstance(result, OpPoint):
        return float(abs(result.source_voltage[source.lower()] * result.i(source)))
    t = result.times
    p = -result.source_voltages[source.lower()] * result.i(source)
    if len(t) < 2:
        return float(abs(p[0])) if len(p) else 0.0
    return float(np.trapezoid(p, t) / (t[-1] - t[0]))


def linear_range(vin, vout, tol=0.05):
    """Widest interval around the sweep midpoint whose local slope stays within
    ``tol`` (relative) of the midpoint slope. Returns (low, high, width)."""
    vin = np.asarray(vin, dtype=float)
    vout = np.asarray(vout, dtype=float)
    slope = np.gradient(vout, vin)
    mid = int(np.argmin(np.abs(vin - 0.5 * (vin[0] + vin[-1]))))
    s0 = slope[mid]
    span = abs(vout.max() - vout.min()) or 1.0
    if abs(s0) <= 1e-9 * span / abs(vin[-1] - vin[0]):
        raise NotFound("slope at the sweep midpoint is zero")
    ok = np.abs(slope - s0) <= tol * abs(s0)
    lo = mid
    while lo > 0 and ok[lo - 1]:
        lo -= 1
    hi = mid
    while hi < len(vin) - 1 and ok[hi + 1]:
        hi += 1
    low, high = sorted((float(vin[lo]), float(vin[hi])))
    return low, high, high - low


# -- report ---------------------------------------------------------------------------

#: (field, report row label, unit, scale from SI)
REPORT_ROWS = [
    ("power_w", "Power consumption", "μW", 1e6),
    ("gain_db", "Open loop gain", "dB", 1.0),
    ("phase_margin_deg", "Phase Margin", "°", 1.0),
    ("bw3db_hz", "3 dB Bandwidth", "kHz", 1e-3),
    ("ugb_hz", "Unity Gain Bandwidth", "MHz", 1e-6),
    ("sr_pos_v_per_s", "Positive Slew Rate", "mV/μs", 1e-3),
    ("sr_neg_v_per_s", "Negative Slew Rate", "mV/μs", 1e-3),
    ("settling_s", "Settling Time (at 10% tolerance)", "μs", 1e6),
    ("swing_vpp", "Maximum voltage swing", "mV", 1e3),
    ("out_noise_v_rthz", "Output Referred Noise", "nV/√Hz", 1e9),
    ("in_noise_v_rthz", "Input Referred Noise", "nV/√Hz", 1e9),
]


@dataclass
class BenchReport:
    power_w: Optional[float] = None
    gain_db: Optional[float] = None
    phase_margin_deg: Optional[float] = None
    bw3db_hz: Optional[float] = None
    ugb_hz: Optional[float] = None
    sr_pos_v_per_s: Optional[float] = None
    sr_neg_v_per_s: Optional[float] = None
    settling_s: Optional[float] = None
    swing_vpp: Optional[float] = None
    out_noise_v_rthz: Optional[float] = None
    in_noise_v_rthz: Optional[float] = None
    errors: dict = field(default_factory=dict)
    linear_range: Optional[tuple] = None
    gain_vs_temp: dict = field(default_factory=dict)
    spot_noise_hz: float = 1e3

    def rows(self):
        """(label, value in report units or None, unit, failure message) per metric."""
        out = []
        for name, label, unit, scale in REPORT_ROWS:
            value = getattr(self, name)
            out.append((label, None if value is None else value * scale, unit,
                        self.errors.get(name, "")))
        return out

    @property
    def complete(self):
        return all(getattr(self, f.name) is not None for f in fields(self)
                   if f.name in {r[0] for r in REPORT_ROWS})
