"""Operating point, DC sweep, AC, transient and noise analyses."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import device_model as dm
from .errors import DomainError, NoConvergence, SingularMatrix
from .netlist import Ac, Capacitor, DcSweep, Noise, Resistor, Tran, elaborate
from .solver import LU, MnaSystem, SolveOptions, _inject

log = logging.getLogger(__name__)


def _opts(circuit, opts):
    return opts if opts is not None else SolveOptions.from_circuit(circuit)


def run_op(circuit, opts=None, initial_guess=None):
    """DC operating point; ``supply_current`` on the result feeds power measurements."""
    system = MnaSystem(circuit)
    x, it = system.solve_dc(_opts(circuit, opts), initial_guess)
    return system.op_point(x, it)


# -- DC sweep --------------------------------------------------------------------

def sweep_values(start, stop, step):
    if step == 0:
        return np.array([start])
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


@dataclass
class DcSweepResult:
    """Node voltages on the sweep grid, shaped (len(values2), len(values))."""

    source: str
    values: np.ndarray
    source2: Optional[str]
    values2: np.ndarray
    voltages: dict
    currents: dict
    valid: np.ndarray
    failures: list = field(default_factory=list)

    def curve(self, node, k=0):
        """(sweep values, voltages) of ``node`` at the k-th outer value, valid points only."""
        ok = self.valid[k]
        return self.values[ok], self.voltages[node.lower()][k][ok]


def run_dc_sweep(circuit, directive, opts=None):
    opts = _opts(circuit, opts)
    system = MnaSystem(circuit)
    inner = sweep_values(directive.start, directive.stop, directive.step)
    if directive.source2:
        outer = sweep_values(directive.start2, directive.stop2, directive.step2)
    else:
        outer = np.array([np.nan])
    shape = (len(outer), len(inner))
    data = np.full(shape + (system.n,), np.nan)
    valid = np.zeros(shape, dtype=bool)
    failures = []
    x_prev = None
    for k, v2 in enumerate(outer):
        for j, v1 in enumerate(inner):
            values = {directive.source: v1}
            if directive.source2:
                values[directive.source2] = v2
            rhs = system.source_rhs(values=values)
            try:
                x, _ = system.solve_dc(opts, x0=x_prev, rhs=rhs)
            except (NoConvergence, SingularMatrix) as exc:
                point = (float(v1), None if np.isnan(v2) else float(v2))
                log.warning("dc sweep point %s failed: %s", point, exc)
                failures.append((point, str(exc)))
                continue
            data[k, j] = x
            valid[k, j] = True
            x_prev = x
    row = system.layout.row
    volts = {n: (data[..., i] if i >= 0 else np.zeros(shape)) for n, i in row.items()}
    currents = {name: data[..., i] for name, i in system.layout.branch.items()}
    return DcSweepResult(directive.source, inner, directive.source2, outer, volts,
                         currents, valid, failures)


# -- AC ----------------------------------------------------------------------------

def frequencies(sweep):
    if sweep.scale == "dec":
        decades = math.log10(sweep.fstop / sweep.fstart)
        count = int(math.floor(decades * sweep.points + 1e-9)) + 1
        return sweep.fstart * 10.0 ** (np.arange(count) / sweep.points)
    if sweep.points == 1:
        return np.array([sweep.fstart])
    return np.linspace(sweep.fstart, sweep.fstop, sweep.points)


@dataclass
class AcSweep:
    freqs: np.ndarray
    nodes: list
    phasors: np.ndarray  # (n_freq, n_unknowns)
    row: dict
    branch: dict
    failed: list = field(default_factory=list)

    def transfer(self, node):
        i = self.row[node.lower()]
        if i < 0:
            return np.zeros(len(self.freqs), dtype=complex)
        return self.phasors[:, i]

    def current(self, source):
        return self.phasors[:, self.branch[source.lower()]]

    def scaled(self, c):
        return replace(self, phasors=self.phasors * c)


def _small_signal(system, op, opts):
    return system.jacobian(op.x, opts.gmin), system.c_matrix


def run_ac(circuit, directive, op=None, opts=None):
    """Small-signal sweep about the operating point, driven by the sources' AC values."""
    opts = _opts(circuit, opts)
    system = MnaSystem(circuit)
    if op is None:
        op = run_op(circuit, opts)
    g, c = _small_signal(system, op, opts)
    rhs = system.ac_rhs()
    freqs = frequencies(directive)
    out = np.full((len(freqs), system.n), np.nan + 0j)
    failed = []
    for k, f in enumerate(freqs):
        try:
            out[k] = LU(g + 2j * math.pi * f * c).solve(rhs)
        except SingularMatrix:
            failed.append(float(f))
    return AcSweep(freqs, list(circuit.nodes), out, dict(system.layout.row),
                   dict(system.layout.branch), failed)


# -- noise ---------------------------------------------------------------------------

@dataclass
class NoiseResult:
    freqs: np.ndarray
    output: str
    onoise_psd: np.ndarray        # V^2/Hz at the output node
    inoise_psd: np.ndarray        # V^2/Hz referred to the input (nan where undefined)
    gain: np.ndarray              # |H_in->out|
    contributions: dict           # name -> V^2/Hz at the output

    @property
    def onoise(self):
        return np.sqrt(self.onoise_psd)

    @property
    def inoise(self):
        return np.sqrt(self.inoise_psd)


def _noise_sources(system, op, f):
    """(name, node_row_a, node_row_b, current PSD) for every noisy element."""
    temp = system.temp
    row = system.layout.row
    out = []
    for dev in system.circuit.devices:
        if isinstance(dev, Resistor):
            out.append((dev.name, row[dev.n_plus], row[dev.n_minus],
                        4.0 * dm.BOLTZMANN * temp / dev.ohms))
    for dev, card, d, g, s, b in system.mosfets:
        thermal, flicker = dm.mos_noise_psd(op.devices[dev.name], card, dev.geom, f, temp)
        out.append((dev.name, d, s, thermal + flicker))
    return out


def run_noise(circuit, directive, op=None, opts=None, exclude=()):
    """Output and input-referred noise by the direct method.

    Each noise current source is injected on its own and its transfer to the
    output is solved from the linearized system; powers add. With
    ``directive.input`` unset, the deck's own AC stimulus is the input.
    """
    opts = _opts(circuit, opts)
    system = MnaSystem(circuit)
    if op is None:
        op = run_op(circuit, opts)
    g, c = _small_signal(system, op, opts)
    out_row = system.layout.row[directive.output.lower()]
    if out_row < 0:
        raise DomainError("noise output cannot be the ground node")
    stim = system.ac_rhs(only=directive.input.lower() if directive.input else None)
    exclude = {e.lower() for e in exclude}
    freqs = frequencies(directive.sweep)
    total = np.zeros(len(freqs))
    gain = np.zeros(len(freqs))
    contrib = {}
    for k, f in enumerate(freqs):
        lu = LU(g + 2j * math.pi * f * c)
        gain[k] = abs(lu.solve(stim)[out_row])
        for name, a, b, psd in _noise_sources(system, op, f):
            if name in exclude:
                continue
            rhs = np.zeros(system.n, dtype=complex)
            _inject(rhs, a, b, 1.0)
            z = lu.solve(rhs)[out_row]
            p = abs(z) ** 2 * psd
            contrib.setdefault(name, np.zeros(len(freqs)))[k] += p
            total[k] += p
    with np.errstate(divide="ignore", invalid="ignore"):
        inoise = np.where(gain > 0, total / gain ** 2, np.nan)
    if np.any(gain == 0):
        log.warning("input-referred noise undefined where |H_in->out| = 0")
    return NoiseResult(freqs, directive.output.lower(), total, inoise, gain, contrib)


# -- transient -----------------------------------------------------------------------

@dataclass
class Waveform:
    times: np.ndarray
    voltages: dict
    currents: dict = field(default_factory=dict)
    source_voltages: dict = field(default_factory=dict)

    def v(self, node):
        return self.voltages[node.lower()]

    def i(self, source):
        return self.currents[source.lower()]

    def window(self, t0=-math.inf, t1=math.inf):
        m = (self.times >= t0) & (self.times <= t1)
        return Waveform(self.times[m], {k: v[m] for k, v in self.voltages.items()},
                        {k: v[m] for k, v in self.currents.items()},
                        {k: v[m] for k, v in self.source_voltages.items()})

    def shifted(self, dt):
        return replace(self, times=self.times + dt)


class _CapState:
    def __init__(self, system):
        caps = system.caps
        self.i = np.array([c[1] for c in caps], dtype=int)
        self.j = np.array([c[2] for c in caps], dtype=int)
        self.c = np.array([c[3] for c in caps], dtype=float)
        self.v = np.zeros(len(caps))
        self.cur = np.zeros(len(caps))

    def voltages(self, x):
        xa = np.where(self.i >= 0, x[np.maximum(self.i, 0)], 0.0)
        xb = np.where(self.j >= 0, x[np.maximum(self.j, 0)], 0.0)
        return xa - xb

    def companion(self, h, trap, n):
        geq = (2.0 if trap else 1.0) * self.c / h
        ieq = -geq * self.v - (self.cur if trap else 0.0)
        rhs = np.zeros(n)
        for a, b, cur in zip(self.i, self.j, ieq):
            _inject(rhs, a, b, cur)
        return geq, rhs

    def accept(self, x, geq, trap):
        v_new = self.voltages(x)
        if trap:
            self.cur = geq * (v_new - self.v) - self.cur
        else:
            self.cur = geq * (v_new - self.v)
        self.v = v_new


def run_tran(circuit, directive, opts=None):
    """Fixed-step transient: one backward-Euler step, then trapezoidal."""
    opts = _opts(circuit, opts)
    system = MnaSystem(circuit)
    forced = [(f"{d.name}.ic", d.n_plus, d.n_minus, d.ic)
              for d in circuit.devices if isinstance(d, Capacitor) and d.ic is not None]
    if forced:
        init = MnaSystem(circuit, forced)
        x0, _ = init.solve_dc(opts, rhs=init.source_rhs(t=0.0))
        x = x0[:system.n].copy()
    else:
        x, _ = system.solve_dc(opts, rhs=system.source_rhs(t=0.0))
    caps = _CapState(system)
    caps.v = caps.voltages(x)
    cm = system.c_matrix

    h = directive.tstep
    nsteps = int(math.floor(directive.tstop / h + 1e-9))
    times = h * np.arange(nsteps + 1)
    data = np.empty((nsteps + 1, system.n))
    data[0] = x

    def step(x, t, dt, trap):
        geq, rhs_c = caps.companion(dt, trap, system.n)
        a = system.g_linear + ((2.0 if trap else 1.0) / dt) * cm
        rhs = system.source_rhs(t=t) + rhs_c
        x_new, _ = system.newton(x, rhs, opts, a_lin=a)
        caps.accept(x_new, geq, trap)
        return x_new

    for k in range(1, nsteps + 1):
        t = times[k]
        trap = k > 1
        saved = (caps.v.copy(), caps.cur.copy())
        try:
            x = step(x, t, h, trap)
        except (NoConvergence, SingularMatrix):
            caps.v, caps.cur = saved
            sub = h / 10.0
            try:
                for m in range(1, 11):
                    x = step(x, times[k - 1] + m * sub, sub, trap or m > 1)
            except (NoConvergence, SingularMatrix) as exc:
                raise NoConvergence(f"transient step failed at t={t:.6g} s: {exc}",
                                    getattr(exc, "best_residual", math.inf), time=t) from None
        data[k] = x
    row = system.layout.row
    volts = {n: (data[:, i] if i >= 0 else np.zeros(nsteps + 1)) for n, i in row.items()}
    currents = {name: data[:, i] for name, i in system.layout.branch.items()}
    across = {s.name: volts[s.n_plus] - volts[s.n_minus] for s in system.vsources}
    return Waveform(times, volts, currents, across)


# -- temperature ---------------------------------------------------------------------

def set_temperature(circuit, celsius, resistor_tc=0.0):
    """Copy of ``circuit`` with model cards (and optionally resistors) moved to ``celsius``."""
    if celsius <= -273.15:
        raise DomainError(f"temperature {celsius} C is below absolute zero")
    temp = celsius + 273.15
    models = {k: dm.apply_temperature(card, temp) for k, card in circuit.nominal_models.items()}
    devices = circuit.devices
    if resistor_tc:
        old = 1.0 + resistor_tc * (circuit.temp_c - 27.0)
        new = 1.0 + resistor_tc * (celsius - 27.0)
        devices = [replace(d, ohms=d.ohms * new / old) if isinstance(d, Resistor) else d
                   for d in devices]
    out = replace(circuit, models=models, devices=list(devices), temp_c=float(celsius),
                  nominal_models=circuit.nominal_models)
    return elaborate(out)


def temperature_sweep(circuit, celsius_list, directive, opts=None):
    """AC sweep at each temperature; returns {celsius: AcSweep} in input order."""
    return {t: run_ac(set_temperature(circuit, t), directive, opts=opts) for t in celsius_list}
