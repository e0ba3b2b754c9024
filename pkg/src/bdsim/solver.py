"""Modified nodal analysis: stamping, dense LU and the DC Newton solve.

Unknown vector layout: node voltages for nodes 1..N-1 (ground eliminated)
followed by one branch current per voltage source. The residual F(x) is the
sum of currents leaving each node, plus v(n+) - v(n-) - V on branch rows.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import device_model as dm
from .errors import NoConvergence, SingularMatrix
from .netlist import Capacitor, ISource, Mosfet, Resistor, VSource

log = logging.getLogger(__name__)


class LatchUpWarning(RuntimeWarning):
    pass


@dataclass
class SolveOptions:
    abstol: float = 1e-9
    reltol: float = 1e-4
    vntol: float = 1e-6
    maxiter: int = 200
    gmin: float = 1e-12
    gmin_steps: int = 10
    src_steps: int = 10
    damping: float = 0.3

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"solver option {name} must be positive, got {value}")
        self.maxiter = int(self.maxiter)
        self.gmin_steps = int(self.gmin_steps)
        self.src_steps = int(self.src_steps)

    @classmethod
    def from_circuit(cls, circuit, **overrides):
        kw = dict(circuit.options)
        kw.update(overrides)
        return cls(**kw)


# -- dense LU ------------------------------------------------------------------

class LU:
    """Partially pivoted LU factors of a square matrix (real or complex)."""

    def __init__(self, a):
        a = np.asarray(a)
        a = np.array(a, dtype=np.result_type(a, float), copy=True)
        n = a.shape[0]
        if a.ndim != 2 or a.shape[1] != n:
            raise ValueError(f"matrix must be square, got shape {a.shape}")
        norm = np.abs(a).sum(axis=1).max() if n else 0.0
        piv = np.arange(n)
        tiny = 1e-14 * norm
        min_pivot = math.inf
        for k in range(n):
            p = k + int(np.argmax(np.abs(a[k:, k])))
            mag = abs(a[p, k])
            if norm == 0 or mag < tiny:
                raise SingularMatrix(f"pivot {mag:.3g} at column {k} below 1e-14*|A|")
            min_pivot = min(min_pivot, mag)
            if p != k:
                a[[k, p]] = a[[p, k]]
                piv[[k, p]] = piv[[p, k]]
            a[k + 1:, k] /= a[k, k]
            a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
        self.lu = a
        self.piv = piv
        self.pivot_ratio = min_pivot / norm if n else 1.0

    def solve(self, b):
        lu = self.lu
        n = lu.shape[0]
        b = np.asarray(b)
        y = np.array(b, dtype=np.result_type(lu, b), copy=True)[self.piv]
        for i in range(1, n):
            y[i] -= lu[i, :i] @ y[:i]
        for i in range(n - 1, -1, -1):
            y[i] = (y[i] - lu[i, i + 1:] @ y[i + 1:]) / lu[i, i]
        return y


def solve_dense(a, b):
    """Solve ``a @ x = b`` by LU with partial pivoting."""
    return LU(a).solve(b)


@dataclass
class SystemMatrix:
    n: int
    a: np.ndarray = None
    rhs: np.ndarray = None
    dtype: type = float

    def __post_init__(self):
        if self.a is None:
            self.a = np.zeros((self.n, self.n), dtype=self.dtype)
        if self.rhs is None:
            self.rhs = np.zeros(self.n, dtype=self.dtype)

    def solve(self):
        return solve_dense(self.a, self.rhs)


# -- index layout and linear stamps -------------------------------------------

class Layout:
    """Row numbers for nodes (ground -> -1) and voltage-source branches."""

    def __init__(self, circuit, extra_branches=()):
        self.nodes = list(circuit.nodes)
        self.row = {n: i - 1 for i, n in enumerate(self.nodes)}
        self.n_nodes = len(self.nodes) - 1
        self.branch = {}
        k = self.n_nodes
        for dev in circuit.devices:
            if type(dev) is VSource:
                self.branch[dev.name] = k
                k += 1
        for name in extra_branches:
            self.branch[name] = k
            k += 1
        self.size = k


def _add(a, i, j, v):
    if i >= 0 and j >= 0:
        a[i, j] += v


def _stamp_admittance(a, i, j, y):
    _add(a, i, i, y)
    _add(a, j, j, y)
    _add(a, i, j, -y)
    _add(a, j, i, -y)


def _inject(rhs, i, j, current):
    # current flowing i -> j through an element, seen as sources on the rhs
    if i >= 0:
        rhs[i] -= current
    if j >= 0:
        rhs[j] += current


def stamp_linear(device, matrix, layout, mode="dc", omega=0.0, value=None):
    """Add a linear element to ``matrix`` (``a x = rhs`` form).

    ``mode`` is ``"dc"`` or ``"ac"``. ``value`` overrides a source's
    excitation (DC value, transient value or AC phasor).
    """
    a, rhs = matrix.a, matrix.rhs
    if isinstance(device, Resistor):
        _stamp_admittance(a, layout.row[device.n_plus], layout.row[device.n_minus], 1.0 / device.ohms)
    elif isinstance(device, Capacitor):
        if mode == "ac":
            _stamp_admittance(a, layout.row[device.n_plus], layout.row[device.n_minus],
                              1j * omega * device.farads)
    elif type(device) is VSource:
        i, j = layout.row[device.n_plus], layout.row[device.n_minus]
        k = layout.branch[device.name]
        _add(a, i, k, 1.0)
        _add(a, j, k, -1.0)
        _add(a, k, i, 1.0)
        _add(a, k, j, -1.0)
        if value is None:
            value = _ac_phasor(device) if mode == "ac" else device.dc
        rhs[k] += value
    elif isinstance(device, ISource):
        if value is None:
            value = _ac_phasor(device) if mode == "ac" else device.dc
        _inject(rhs, layout.row[device.n_plus], layout.row[device.n_minus], value)
    elif isinstance(device, Mosfet):
        if mode == "ac":
            for na, nb, c in device.capacitors():
                _stamp_admittance(a, layout.row[na], layout.row[nb], 1j * omega * c)
    else:
        raise TypeError(f"cannot stamp {device!r}")


def _ac_phasor(src):
    return src.ac_mag * complex(math.cos(math.radians(src.ac_phase)),
                                math.sin(math.radians(src.ac_phase)))


# -- the compiled system ---------------------------------------------------------

@dataclass(frozen=True)
class OpPoint:
    """Converged DC solution."""

    x: np.ndarray
    voltages: dict
    branch_currents: dict
    devices: dict
    supply_current: dict
    source_voltage: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    iterations: int = 0
    status: str = "converged"
    temp: float = dm.T_NOMINAL

    def v(self, node):
        return self.voltages[node.lower()]

    def i(self, source):
        return self.branch_currents[source.lower()]


class MnaSystem:
    """A circuit compiled to index arrays for repeated assembly."""

    def __init__(self, circuit, forced=()):
        self.circuit = circuit
        self.temp = circuit.temp_k
        # forced: (name, node+, node-, volts) constraints, used for capacitor ICs
        self.forced = list(forced)
        self.layout = Layout(circuit, [f[0] for f in self.forced])
        row = self.layout.row
        self.n = self.layout.size
        self.linear = [d for d in circuit.devices if not isinstance(d, Mosfet)]
        self.vsources = [d for d in circuit.devices if type(d) is VSource]
        self.isources = [d for d in circuit.devices if isinstance(d, ISource)]
        self.mosfets = [(d, circuit.models[d.model], row[d.d], row[d.g], row[d.s], row[d.b])
                        for d in circuit.devices if isinstance(d, Mosfet)]
        caps = []
        for d in circuit.devices:
            if isinstance(d, Capacitor):
                caps.append((d.name, row[d.n_plus], row[d.n_minus], d.farads))
            elif isinstance(d, Mosfet):
                for k, (na, nb, c) in enumerate(d.capacitors()):
                    caps.append((f"{d.name}.c{k}", row[na], row[nb], c))
        self.caps = caps

        m = SystemMatrix(self.n)
        for dev in self.linear:
            stamp_linear(dev, m, self.layout, value=0.0)
        for name, np_, nm, _ in self.forced:
            i, j, k = row[np_], row[nm], self.layout.branch[name]
            _add(m.a, i, k, 1.0)
            _add(m.a, j, k, -1.0)
            _add(m.a, k, i, 1.0)
            _add(m.a, k, j, -1.0)
        self.g_linear = m.a
        cm = np.zeros((self.n, self.n))
        for _, i, j, c in caps:
            _stamp_admittance(cm, i, j, c)
        self.c_matrix = cm

    # excitation --------------------------------------------------------------

    def source_rhs(self, scale=1.0, t=None, values=None):
        """Right-hand side from independent sources (DC, or transient at ``t``)."""
        m = SystemMatrix(self.n, a=np.zeros((0, 0)))
        values = values or {}
        for src in self.vsources:
            v = values.get(src.name, src.dc if t is None else src.value_at(t))
            m.rhs[self.layout.branch[src.name]] += scale * v
        for src in self.isources:
            v = values.get(src.name, src.dc if t is None else src.value_at(t))
            _inject(m.rhs, self.layout.row[src.n_plus], self.layout.row[src.n_minus], scale * v)
        for name, _, _, volts in self.forced:
            m.rhs[self.layout.branch[name]] += volts
        return m.rhs

    def ac_rhs(self, only=None):
        rhs = np.zeros(self.n, dtype=complex)
        for src in self.vsources:
            if only is None or src.name == only:
                val = 1.0 if only is not None else _ac_phasor(src)
                rhs[self.layout.branch[src.name]] += val
        for src in self.isources:
            if only is None or src.name == only:
                val = 1.0 if only is not None else _ac_phasor(src)
                _inject(rhs, self.layout.row[src.n_plus], self.layout.row[src.n_minus], val)
        return rhs

    # nonlinear devices ---------------------------------------------------------

    def _node_v(self, x, i):
        return x[i] if i >= 0 else 0.0

    def nonlinear(self, x, f, jac, evals=None):
        """Add MOSFET channel and bulk-diode currents to residual and Jacobian."""
        for dev, card, d, g, s, b in self.mosfets:
            vd, vg, vs, vb = (self._node_v(x, k) for k in (d, g, s, b))
            ev = dm.eval_mos(card, dev.geom, vg - vs, vd - vs, vb - vs, limit=True)
            if evals is not None:
                evals[dev.name] = ev
            gs = -(ev.gm + ev.gds + ev.gmb)
            if d >= 0:
                f[d] += ev.id
            if s >= 0:
                f[s] -= ev.id
            for node, sgn in ((d, 1.0), (s, -1.0)):
                if node < 0:
                    continue
                _add(jac, node, d, sgn * ev.gds)
                _add(jac, node, g, sgn * ev.gm)
                _add(jac, node, b, sgn * ev.gmb)
                _add(jac, node, s, sgn * gs)
            if card.is_bulk > 0:
                sign = card.sign
                fwd = sign * (vb - vs)
                ib = sign * dm.bulk_diode_current(card, fwd, self.temp)
                gb = dm.bulk_diode_conductance(card, fwd, self.temp)
                if b >= 0:
                    f[b] += ib
                if s >= 0:
                    f[s] -= ib
                _stamp_admittance(jac, b, s, gb)

    def residual(self, x, a_lin, rhs, gmin):
        f = a_lin @ x - rhs
        jac = a_lin.copy()
        nn = self.layout.n_nodes
        if gmin:
            f[:nn] += gmin * x[:nn]
            jac[np.arange(nn), np.arange(nn)] += gmin
        self.nonlinear(x, f, jac)
        return f, jac

    def jacobian(self, x, gmin):
        _, jac = self.residual(x, self.g_linear, np.zeros(self.n), gmin)
        return jac

    # Newton ------------------------------------------------------------------------

    def newton(self, x0, rhs, opts, gmin=None, a_lin=None):
        """Damped Newton. Returns (x, iterations); raises NoConvergence."""
        a_lin = self.g_linear if a_lin is None else a_lin
        gmin = opts.gmin if gmin is None else gmin
        x = np.array(x0, dtype=float)
        nn = self.layout.n_nodes
        best = math.inf
        for it in range(1, opts.maxiter + 1):
            f, jac = self.residual(x, a_lin, rhs, gmin)
            kcl = np.max(np.abs(f[:nn])) if nn else 0.0
            branch = np.max(np.abs(f[nn:])) if self.n > nn else 0.0
            best = min(best, kcl)
            dx = LU(jac).solve(-f)
            if not np.all(np.isfinite(dx)):
                break
            dv = dx[:nn]
            vmax = np.max(np.abs(dv)) if nn else 0.0
            small = np.all(np.abs(dv) <= opts.reltol * np.abs(x[:nn]) + opts.vntol)
            if kcl <= opts.abstol and branch <= opts.vntol and small:
                return self._polish(x + dx, a_lin, rhs, gmin), it
            if vmax > opts.damping:
                dx *= opts.damping / vmax
            x = x + dx
        raise NoConvergence(f"Newton failed after {opts.maxiter} iterations "
                            f"(best KCL residual {best:.3g} A)", best)

    def _polish(self, x, a_lin, rhs, gmin, passes=2):
        # a converged point is inside the quadratic basin; a couple of extra
        # undamped steps make results independent of the approach path
        for _ in range(passes):
            f, jac = self.residual(x, a_lin, rhs, gmin)
            dx = LU(jac).solve(-f)
            if not np.all(np.isfinite(dx)) or np.max(np.abs(dx), initial=0.0) > 1e-6:
                break
            x = x + dx
            if np.max(np.abs(dx), initial=0.0) < 1e-13:
                break
        return x

    def initial_guess(self):
        x = np.zeros(self.n)
        row = self.layout.row
        for src in self.vsources:
            i, j = row[src.n_plus], row[src.n_minus]
            if i >= 0:
                x[i] = src.dc + (x[j] if j >= 0 else 0.0)
        return x

    def solve_dc(self, opts, x0=None, rhs=None):
        """Newton with gmin stepping, then source stepping, as fallbacks."""
        if x0 is None:
            x0 = self.initial_guess()
        if rhs is None:
            rhs = self.source_rhs()
        try:
            return self.newton(x0, rhs, opts)
        except (NoConvergence, SingularMatrix) as exc:
            log.info("direct Newton failed (%s); trying gmin stepping", exc)
            best = getattr(exc, "best_residual", math.inf)
        total = 0
        try:
            x = x0
            for g in np.logspace(-3, math.log10(opts.gmin), opts.gmin_steps + 1):
                x, it = self.newton(x, rhs, opts, gmin=g)
                total += it
            return x, total
        except (NoConvergence, SingularMatrix) as exc:
            log.info("gmin stepping failed (%s); trying source stepping", exc)
            best = min(best, getattr(exc, "best_residual", math.inf))
        try:
            x = np.zeros(self.n)
            for alpha in np.linspace(0.0, 1.0, opts.src_steps + 1)[1:]:
                x, it = self.newton(x, alpha * rhs, opts)
                total += it
            return x, total
        except (NoConvergence, SingularMatrix) as exc:
            best = min(best, getattr(exc, "best_residual", math.inf))
        raise NoConvergence(f"DC solve failed after gmin and source stepping "
                            f"(best KCL residual {best:.3g} A)", best)

    # results -----------------------------------------------------------------------

    def device_currents(self, x):
        """KCL residual of device currents only (no gmin), per node row."""
        f = self.g_linear @ x - self.source_rhs()
        jac = np.zeros((self.n, self.n))
        self.nonlinear(x, f, jac)
        return f[:self.layout.n_nodes]

    def op_point(self, x, iterations=0):
        evals = {}
        f = np.zeros(self.n)
        self.nonlinear(x, f, np.zeros((self.n, self.n)), evals)
        volts = {n: (float(x[i]) if i >= 0 else 0.0) for n, i in self.layout.row.items()}
        branches = {name: float(x[k]) for name, k in self.layout.branch.items()}
        supply = {src.name: branches[src.name] for src in self.vsources}
        across = {src.name: volts[src.n_plus] - volts[src.n_minus] for src in self.vsources}
        notes = []
        try:
            ratio = LU(self.jacobian(x, 0.0)).pivot_ratio
        except SingularMatrix:
            ratio = 0.0
        if ratio < 1e-12:
            notes.append(f"Jacobian nearly singular at the solution (pivot ratio {ratio:.2g})")
        for dev, card, *_ in self.mosfets:
            fwd = card.sign * (volts[dev.b] - volts[dev.s])
            if fwd > dm.LATCHUP_VBS:
                msg = (f"{dev.name}: bulk-source junction forward biased by {fwd:.3f} V "
                       f"(> {dm.LATCHUP_VBS} V), latch-up risk")
                notes.append(msg)
                warnings.warn(msg, LatchUpWarning, stacklevel=3)
        return OpPoint(x=x, voltages=volts, branch_currents=branches, devices=evals,
                       supply_current=supply, source_voltage=across, warnings=notes, iterations=iterations,
                       temp=self.temp)


def newton_dc(circuit, opts=None, initial_guess=None):
    """DC operating point of an elaborated circuit."""
    opts = opts or SolveOptions.from_circuit(circuit)
    system = MnaSystem(circuit)
    x, iterations = system.solve_dc(opts, initial_guess)
    return system.op_point(x, iterations)
