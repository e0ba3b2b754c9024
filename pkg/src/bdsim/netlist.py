"""SPICE-subset netlist front end.

Grammar (case-insensitive, one element per line):

    <title line>
    * comment
    R<name> n+ n- <ohms>
    C<name> n+ n- <farads> [IC=<volts>]
    V<name> n+ n- [DC] <value> [AC <mag> [<phase_deg>]] [PULSE(v1 v2 td tr tf pw per) | SIN(vo va freq)]
    I<name> n+ n- ...same as V, in amps...
    M<name> d g s b <model> W=<m> L=<m> [CGS=..] [CGD=..] [CDB=..] [CBS=..]
    .model <name> NMOS|PMOS (key=value ...)
    .op
    .dc <src> <start> <stop> <step> [<src2> <start2> <stop2> <step2>]
    .ac dec|lin <points> <fstart> <fstop>
    .tran <tstep> <tstop>
    .noise v(<node>) [<input source>] dec|lin <points> <fstart> <fstop>
    .temp <celsius> ...
    .options key=value ...
    .end
    + continues the previous line

Names are folded to lower case. Ground is node ``0`` (``gnd`` is an alias).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .device_model import MosGeometry, MosModelCard, T_NOMINAL
from .errors import DomainError, ParseError, TopologyError

GROUND = "0"

_SUFFIX = {"f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "m": 1e-3,
           "k": 1e3, "meg": 1e6, "g": 1e9, "t": 1e12}
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?", re.IGNORECASE)
_TAIL = re.compile(r"(meg|[fpnumkgt])?([a-z]*)$", re.IGNORECASE)


def parse_value(token):
    """Convert a SPICE number such as ``1.31meg`` or ``2pF`` to float."""
    text = token.strip()
    m = _NUMBER.match(text)
    if not m:
        raise ParseError(f"malformed number {token!r}", offset=0)
    rest = text[m.end():]
    t = _TAIL.match(rest)
    if not t:
        bad = next(i for i, ch in enumerate(rest) if not ch.isalpha())
        raise ParseError(f"malformed number {token!r}", offset=m.end() + bad)
    value = float(m.group(0))
    suffix = t.group(1)
    if suffix:
        value *= _SUFFIX[suffix.lower()]
    return value


# -- data model -------------------------------------------------------------

@dataclass(frozen=True)
class Pulse:
    v1: float
    v2: float
    delay: float = 0.0
    rise: float = 0.0
    fall: float = 0.0
    width: float = float("inf")
    period: float = 0.0

    def __call__(self, t):
        if t < self.delay:
            return self.v1
        tt = t - self.delay
        if self.period > 0:
            tt %= self.period
        if tt < self.rise:
            return self.v1 + (self.v2 - self.v1) * tt / self.rise
        tt -= self.rise
        if tt < self.width:
            return self.v2
        tt -= self.width
        if tt < self.fall:
            return self.v2 + (self.v1 - self.v2) * tt / self.fall
        return self.v1


@dataclass(frozen=True)
class Sin:
    offset: float
    amplitude: float
    freq: float

    def __call__(self, t):
        import math
        return self.offset + self.amplitude * math.sin(2 * math.pi * self.freq * t)


@dataclass(frozen=True)
class Resistor:
    name: str
    n_plus: str
    n_minus: str
    ohms: float

    @property
    def nodes(self):
        return (self.n_plus, self.n_minus)


@dataclass(frozen=True)
class Capacitor:
    name: str
    n_plus: str
    n_minus: str
    farads: float
    ic: Optional[float] = None

    @property
    def nodes(self):
        return (self.n_plus, self.n_minus)


@dataclass(frozen=True)
class VSource:
    """Independent voltage source; the branch current flows from n+ through
    the source to n- (a source delivering power reports negative current)."""

    name: str
    n_plus: str
    n_minus: str
    dc: float = 0.0
    ac_mag: float = 0.0
    ac_phase: float = 0.0
    tran: Union[Pulse, Sin, None] = None

    @property
    def nodes(self):
        return (self.n_plus, self.n_minus)

    def value_at(self, t):
        return self.dc if self.tran is None else self.tran(t)


@dataclass(frozen=True)
class ISource(VSource):
    """Independent current source, pushing current from n+ through itself to n-."""


@dataclass(frozen=True)
class Mosfet:
    name: str
    d: str
    g: str
    s: str
    b: str
    model: str
    geom: MosGeometry
    cgs: float = 0.0
    cgd: float = 0.0
    cdb: float = 0.0
    cbs: float = 0.0

    @property
    def nodes(self):
        return (self.d, self.g, self.s, self.b)

    def capacitors(self):
        """Fixed parasitic capacitors as (node_a, node_b, farads)."""
        pairs = ((self.g, self.s, self.cgs), (self.g, self.d, self.cgd),
                 (self.d, self.b, self.cdb), (self.b, self.s, self.cbs))
        return [p for p in pairs if p[2] > 0]


Device = Union[Resistor, Capacitor, VSource, ISource, Mosfet]


@dataclass(frozen=True)
class Op:
    pass


@dataclass(frozen=True)
class DcSweep:
    source: str
    start: float
    stop: float
    step: float
    source2: Optional[str] = None
    start2: float = 0.0
    stop2: float = 0.0
    step2: float = 0.0

    def __post_init__(self):
        for a, b, s in ((self.start, self.stop, self.step), (self.start2, self.stop2, self.step2)):
            if s == 0 and a != b:
                raise DomainError("sweep step must be non-zero")
            if s != 0 and (b - a) * s < 0:
                raise DomainError("sweep step sign disagrees with start/stop")


@dataclass(frozen=True)
class Ac:
    scale: str
    points: int
    fstart: float
    fstop: float

    def __post_init__(self):
        if self.scale not in ("dec", "lin"):
            raise DomainError(f"unknown frequency scale {self.scale!r}")
        if not (self.fstart > 0 and self.fstop > self.fstart and self.points >= 1):
            raise DomainError("need 0 < fstart < fstop and points >= 1")


@dataclass(frozen=True)
class Tran:
    tstep: float
    tstop: float

    def __post_init__(self):
        if not (self.tstep > 0 and self.tstop >= self.tstep):
            raise DomainError("need tstep > 0 and tstop >= tstep")


@dataclass(frozen=True)
class Noise:
    output: str
    input: Optional[str]
    sweep: Ac


@dataclass(frozen=True)
class TempSet:
    celsius: tuple


AnalysisDirective = Union[Op, DcSweep, Ac, Tran, Noise, TempSet]


@dataclass
class Circuit:
    title: str
    nodes: list
    devices: list
    models: dict
    analyses: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    temp_c: float = 27.0
    # cards at tnom; ``models`` holds the temperature-adjusted ones
    nominal_models: dict = field(default=None, compare=False, repr=False)
    branch_index: dict = field(default_factory=dict, compare=False, repr=False)
    warnings: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        if self.nominal_models is None:
            self.nominal_models = dict(self.models)

    @property
    def temp_k(self):
        return self.temp_c + 273.15

    def device(self, name):
        name = name.lower()
        for dev in self.devices:
            if dev.name == name:
                return dev
        raise KeyError(name)

    def node_index(self, name):
        return self.nodes.index(name.lower())

    def replace_device(self, name, **changes):
        """Copy of the circuit with one device's fields changed."""
        dev = self.device(name)
        devices = [replace(d, **changes) if d is dev else d for d in self.devices]
        return elaborate(replace(self, devices=devices, nominal_models=self.nominal_models))

    def with_devices(self, devices):
        return elaborate(replace(self, devices=list(devices), nodes=[GROUND],
                                 nominal_models=self.nominal_models))


# -- parsing -----------------------------------------------------------------

_KV = re.compile(r"^([a-z_][a-z0-9_]*)=(.+)$", re.IGNORECASE)

_MODEL_KEYS = {
    "vt0": "vt0", "vto": "vt0", "kp": "kp", "gamma": "gamma", "phi": "phi",
    "lambda": "lam", "lam": "lam", "kf": "kf", "af": "af", "cox": "cox",
    "is": "is_bulk", "is_bulk": "is_bulk", "tc_vth": "tc_vth", "tcv": "tc_vth",
    "mu_exp": "mu_exp", "bex": "mu_exp",
}

_OPTION_KEYS = {"abstol", "reltol", "vntol", "maxiter", "gmin", "gmin_steps",
                "src_steps", "damping"}


def _logical_lines(text):
    """Yield (first physical line number, joined text) after comments and '+'."""
    pending = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if lineno == 1:
            yield lineno, raw.rstrip("\r\n")
            continue
        if not line or line.startswith("*"):
            continue
        if line.startswith("+"):
            if pending is None:
                raise ParseError("continuation line with nothing to continue", lineno)
            pending = (pending[0], pending[1] + " " + line[1:].strip())
            continue
        if pending is not None:
            yield pending
        pending = (lineno, line)
    if pending is not None:
        yield pending


def _tokenize(line):
    # keeps "pulse(" groups together and splits "key = value" spellings
    line = re.sub(r"\s*=\s*", "=", line)
    line = re.sub(r"\(", " ( ", line)
    line = re.sub(r"\)", " ) ", line)
    return line.replace(",", " ").split()


def _value(tok, lineno):
    try:
        return parse_value(tok)
    except ParseError as exc:
        raise ParseError(exc.message, lineno, exc.offset) from None


def _group(tokens, i, lineno):
    """Parse ``( a b c )`` starting at tokens[i] == '('; return values, next index."""
    if i >= len(tokens) or tokens[i] != "(":
        raise ParseError("expected '('", lineno)
    j = tokens.index(")", i) if ")" in tokens[i:] else -1
    if j < 0:
        raise ParseError("unbalanced parenthesis", lineno)
    return [_value(t, lineno) for t in tokens[i + 1:j]], j + 1


def _parse_source(cls, name, tokens, lineno):
    if len(tokens) < 3:
        raise ParseError(f"{name}: expected two nodes", lineno)
    n_plus, n_minus = tokens[1], tokens[2]
    dc = ac_mag = ac_phase = 0.0
    tran = None
    i = 3
    while i < len(tokens):
        tok = tokens[i]
        if tok == "dc":
            if i + 1 >= len(tokens):
                raise ParseError(f"{name}: DC needs a value", lineno)
            dc = _value(tokens[i + 1], lineno)
            i += 2
        elif tok == "ac":
            if i + 1 >= len(tokens):
                raise ParseError(f"{name}: AC needs a magnitude", lineno)
            ac_mag = _value(tokens[i + 1], lineno)
            i += 2
            if i < len(tokens) and _NUMBER.match(tokens[i]):
                ac_phase = _value(tokens[i], lineno)
                i += 1
        elif tok == "pulse":
            vals, i = _group(tokens, i + 1, lineno)
            if not 2 <= len(vals) <= 7:
                raise ParseError(f"{name}: PULSE takes 2 to 7 values", lineno)
            tran = Pulse(*vals)
        elif tok == "sin":
            vals, i = _group(tokens, i + 1, lineno)
            if len(vals) != 3:
                raise ParseError(f"{name}: SIN takes offset, amplitude, frequency", lineno)
            tran = Sin(*vals)
        elif i == 3:
            dc = _value(tok, lineno)
            i += 1
        else:
            raise ParseError(f"{name}: unexpected token {tok!r}", lineno)
    return cls(name, n_plus, n_minus, dc, ac_mag, ac_phase, tran)


def _keyvals(tokens, lineno):
    out = {}
    for tok in tokens:
        if tok in ("(", ")"):
            continue
        m = _KV.match(tok)
        if not m:
            raise ParseError(f"expected key=value, got {tok!r}", lineno)
        out[m.group(1).lower()] = m.group(2)
    return out


def _parse_mosfet(name, tokens, lineno):
    if len(tokens) < 6:
        raise ParseError(f"{name}: expected 'd g s b model W= L='", lineno)
    d, g, s, b, model = tokens[1:6]
    kv = _keyvals(tokens[6:], lineno)
    unknown = set(kv) - {"w", "l", "cgs", "cgd", "cdb", "cbs"}
    if unknown:
        raise ParseError(f"{name}: unknown parameter(s) {sorted(unknown)}", lineno)
    if "w" not in kv or "l" not in kv:
        raise ParseError(f"{name}: W and L are required", lineno)
    vals = {k: _value(v, lineno) for k, v in kv.items()}
    try:
        geom = MosGeometry(vals.pop("w"), vals.pop("l"))
    except DomainError as exc:
        raise ParseError(f"{name}: {exc}", lineno) from None
    return Mosfet(name, d, g, s, b, model, geom, **vals)


def _parse_model(tokens, lineno):
    if len(tokens) < 3:
        raise ParseError(".model needs a name and a type", lineno)
    name, kind = tokens[1], tokens[2]
    if kind not in ("nmos", "pmos"):
        raise ParseError(f".model type must be NMOS or PMOS, got {kind!r}", lineno)
    params = {}
    for key, raw in _keyvals(tokens[3:], lineno).items():
        if key == "tnom":
            params["tnom"] = _value(raw, lineno) + 273.15
            continue
        if key not in _MODEL_KEYS:
            raise ParseError(f".model {name}: unknown parameter {key!r}", lineno)
        params[_MODEL_KEYS[key]] = _value(raw, lineno)
    if "vt0" in params and kind == "pmos":
        params["vt0"] = abs(params["vt0"])
    try:
        card = MosModelCard(polarity="N" if kind == "nmos" else "P", **params)
    except DomainError as exc:
        raise ParseError(f".model {name}: {exc}", lineno) from None
    return name, card


def _parse_sweep(tokens, i, lineno):
    if len(tokens) - i != 4 or tokens[i] not in ("dec", "lin"):
        raise ParseError("expected dec|lin <points> <fstart> <fstop>", lineno)
    return Ac(tokens[i], int(_value(tokens[i + 1], lineno)),
              _value(tokens[i + 2], lineno), _value(tokens[i + 3], lineno))


def _parse_directive(tokens, lineno):
    kind = tokens[0]
    try:
        if kind == ".op":
            return Op()
        if kind == ".dc":
            if len(tokens) not in (5, 9):
                raise ParseError(".dc expects 4 or 8 arguments", lineno)
            first = [_value(t, lineno) for t in tokens[2:5]]
            if len(tokens) == 9:
                second = [_value(t, lineno) for t in tokens[6:9]]
                return DcSweep(tokens[1], *first, tokens[5], *second)
            return DcSweep(tokens[1], *first)
        if kind == ".ac":
            return _parse_sweep(tokens, 1, lineno)
        if kind == ".tran":
            if len(tokens) != 3:
                raise ParseError(".tran expects <tstep> <tstop>", lineno)
            return Tran(_value(tokens[1], lineno), _value(tokens[2], lineno))
        if kind == ".noise":
            # tokens: .noise v ( out ) [src] dec n f1 f2
            if len(tokens) < 5 or tokens[1] != "v" or tokens[2] != "(" or tokens[4] != ")":
                raise ParseError(".noise expects v(<node>) first", lineno)
            rest = tokens[5:]
            src = None
            if rest and rest[0] not in ("dec", "lin"):
                src, rest = rest[0], rest[1:]
            return Noise(tokens[3], src, _parse_sweep(rest, 0, lineno))
        if kind == ".temp":
            if len(tokens) < 2:
                raise ParseError(".temp needs at least one value", lineno)
            return TempSet(tuple(_value(t, lineno) for t in tokens[1:]))
    except DomainError as exc:
        raise ParseError(f"{kind}: {exc}", lineno) from None
    raise ParseError(f"unknown directive {kind!r}", lineno)


def parse_netlist(text):
    """Parse netlist text and return an elaborated :class:`Circuit`."""
    if not text or not text.strip():
        raise ParseError("empty netlist", 1)
    title = ""
    devices, models, analyses, options = [], {}, [], {}
    model_lines = {}
    device_lines = {}
    directive_lines = []
    for lineno, line in _logical_lines(text):
        if lineno == 1:
            title = line.strip()
            continue
        tokens = [t.lower() for t in _tokenize(line)]
        head = tokens[0]
        if head == ".end":
            break
        if head == ".model":
            name, card = _parse_model(tokens, lineno)
            if name in models:
                raise ParseError(f"duplicate model {name!r}", lineno)
            models[name] = card
            model_lines[name] = lineno
            continue
        if head == ".options" or head == ".option":
            for key, raw in _keyvals(tokens[1:], lineno).items():
                if key not in _OPTION_KEYS:
                    raise ParseError(f"unknown option {key!r}", lineno)
                options[key] = _value(raw, lineno)
            continue
        if head.startswith("."):
            analyses.append(_parse_directive(tokens, lineno))
            directive_lines.append(lineno)
            continue
        name, letter = head, head[0]
        if name in device_lines:
            raise ParseError(f"duplicate device name {name!r}", lineno)
        if letter == "r":
            if len(tokens) != 4:
                raise ParseError(f"{name}: expected 'n+ n- value'", lineno)
            ohms = _value(tokens[3], lineno)
            if ohms <= 0:
                raise ParseError(f"{name}: resistance must be positive", lineno)
            dev = Resistor(name, tokens[1], tokens[2], ohms)
        elif letter == "c":
            if len(tokens) not in (4, 5):
                raise ParseError(f"{name}: expected 'n+ n- value [IC=v]'", lineno)
            farads = _value(tokens[3], lineno)
            if farads <= 0:
                raise ParseError(f"{name}: capacitance must be positive", lineno)
            ic = None
            if len(tokens) == 5:
                kv = _keyvals(tokens[4:], lineno)
                if set(kv) != {"ic"}:
                    raise ParseError(f"{name}: only IC= is accepted", lineno)
                ic = _value(kv["ic"], lineno)
            dev = Capacitor(name, tokens[1], tokens[2], farads, ic)
        elif letter == "v":
            dev = _parse_source(VSource, name, tokens, lineno)
        elif letter == "i":
            dev = _parse_source(ISource, name, tokens, lineno)
        elif letter == "m":
            dev = _parse_mosfet(name, tokens, lineno)
        else:
            raise ParseError(f"unknown device type {letter.upper()!r} in {name!r}", lineno)
        devices.append(dev)
        device_lines[name] = lineno
    for dev in devices:
        if isinstance(dev, Mosfet) and dev.model not in models:
            raise ParseError(f"{dev.name}: model {dev.model!r} is not defined",
                             device_lines[dev.name])
    sources = {d.name for d in devices if isinstance(d, VSource)}
    for a, lineno in zip(analyses, directive_lines):
        if isinstance(a, DcSweep):
            for src in (a.source, a.source2):
                if src is not None and src not in sources:
                    raise ParseError(f".dc sweeps unknown source {src!r}", lineno)
        if isinstance(a, Noise) and a.input is not None and a.input not in sources:
            raise ParseError(f".noise input {a.input!r} is not a source", lineno)
    circuit = Circuit(title, [GROUND], devices, models, analyses, options)
    for a in analyses:
        if isinstance(a, TempSet) and len(a.celsius) == 1:
            circuit.temp_c = a.celsius[0]
    if circuit.temp_c != 27.0:
        circuit = _retarget(circuit, circuit.temp_c)
    return elaborate(circuit)


def _retarget(circuit, celsius):
    from .device_model import apply_temperature
    models = {k: apply_temperature(c, celsius + 273.15) for k, c in circuit.nominal_models.items()}
    return replace(circuit, models=models, temp_c=celsius, nominal_models=circuit.nominal_models)


def elaborate(circuit):
    """Assign node and branch indices and check that every node has a DC path
    to ground. Returns the same circuit object, updated in place."""
    names = set()
    for dev in circuit.devices:
        if dev.name in names:
            raise TopologyError(f"duplicate device name {dev.name!r}")
        names.add(dev.name)
        if isinstance(dev, Mosfet) and dev.model not in circuit.models:
            raise TopologyError(f"{dev.name}: model {dev.model!r} is not defined")
    nodes = [GROUND]
    seen = {GROUND: 0}
    for dev in circuit.devices:
        for n in dev.nodes:
            n = GROUND if n == "gnd" else n
            if n not in seen:
                seen[n] = len(nodes)
                nodes.append(n)
    devices = []
    for dev in circuit.devices:
        if "gnd" in dev.nodes:
            fields = {f: GROUND for f in ("n_plus", "n_minus", "d", "g", "s", "b")
                      if getattr(dev, f, None) == "gnd"}
            dev = replace(dev, **fields)
        devices.append(dev)
    circuit.devices = devices
    circuit.nodes = nodes

    # dense branch indices follow the node indices (ground counts as 0)
    branch = {}
    for dev in devices:
        if type(dev) is VSource:
            branch[dev.name] = len(nodes) + len(branch)
    circuit.branch_index = branch

    counts = {n: 0 for n in nodes}
    for dev in devices:
        for n in dev.nodes:
            counts[n] += 1
    circuit.warnings = [f"node {n!r} has a single device terminal"
                        for n in nodes[1:] if counts[n] < 2]

    # union-find over DC-conducting branches
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    def union(a, b):
        parent[find(a)] = find(b)

    for dev in devices:
        if isinstance(dev, Resistor) or type(dev) is VSource:
            union(dev.n_plus, dev.n_minus)
        elif isinstance(dev, Mosfet):
            union(dev.d, dev.s)
            if circuit.models[dev.model].is_bulk > 0:
                union(dev.b, dev.s)
                union(dev.b, dev.d)
    root = find(GROUND)
    floating = [n for n in nodes[1:] if find(n) != root]
    if floating:
        raise TopologyError(f"no DC path to ground from node(s) {', '.join(floating)}")
    return circuit


# -- writing -----------------------------------------------------------------

def _num(x):
    return repr(float(x))


def _source_line(dev, letter):
    parts = [dev.name, dev.n_plus, dev.n_minus, "dc", _num(dev.dc)]
    if dev.ac_mag or dev.ac_phase:
        parts += ["ac", _num(dev.ac_mag), _num(dev.ac_phase)]
    if isinstance(dev.tran, Pulse):
        p = dev.tran
        vals = [p.v1, p.v2, p.delay, p.rise, p.fall, p.width, p.period]
        parts.append("pulse(" + " ".join(_num(v) for v in vals) + ")")
    elif isinstance(dev.tran, Sin):
        s = dev.tran
        parts.append("sin(" + " ".join(_num(v) for v in (s.offset, s.amplitude, s.freq)) + ")")
    return " ".join(parts)


def unparse(circuit):
    """Write a circuit back to netlist text that parses to an equal circuit."""
    lines = [circuit.title or "untitled"]
    for name, card in circuit.nominal_models.items():
        kind = "nmos" if card.polarity == "N" else "pmos"
        kv = [f"vt0={_num(card.vt0)}", f"kp={_num(card.kp)}", f"gamma={_num(card.gamma)}",
              f"phi={_num(card.phi)}", f"lambda={_num(card.lam)}", f"kf={_num(card.kf)}",
              f"af={_num(card.af)}", f"cox={_num(card.cox)}", f"is={_num(card.is_bulk)}",
              f"tnom={_num(card.tnom - 273.15)}", f"tc_vth={_num(card.tc_vth)}",
              f"mu_exp={_num(card.mu_exp)}"]
        lines.append(f".model {name} {kind} (" + " ".join(kv) + ")")
    for dev in circuit.devices:
        if isinstance(dev, Resistor):
            lines.append(f"{dev.name} {dev.n_plus} {dev.n_minus} {_num(dev.ohms)}")
        elif isinstance(dev, Capacitor):
            ic = "" if dev.ic is None else f" ic={_num(dev.ic)}"
            lines.append(f"{dev.name} {dev.n_plus} {dev.n_minus} {_num(dev.farads)}{ic}")
        elif isinstance(dev, Mosfet):
            extra = "".join(f" {k}={_num(getattr(dev, k))}"
                            for k in ("cgs", "cgd", "cdb", "cbs") if getattr(dev, k))
            lines.append(f"{dev.name} {dev.d} {dev.g} {dev.s} {dev.b} {dev.model} "
                         f"w={_num(dev.geom.w)} l={_num(dev.geom.l)}{extra}")
        else:
            lines.append(_source_line(dev, dev.name[0]))
    for a in circuit.analyses:
        lines.append(_directive_line(a))
    if circuit.options:
        lines.append(".options " + " ".join(f"{k}={_num(v)}" for k, v in circuit.options.items()))
    lines.append(".end")
    return "\n".join(lines) + "\n"


def _sweep_text(s):
    return f"{s.scale} {s.points} {_num(s.fstart)} {_num(s.fstop)}"


def _directive_line(a):
    if isinstance(a, Op):
        return ".op"
    if isinstance(a, DcSweep):
        text = f".dc {a.source} {_num(a.start)} {_num(a.stop)} {_num(a.step)}"
        if a.source2:
            text += f" {a.source2} {_num(a.start2)} {_num(a.stop2)} {_num(a.step2)}"
        return text
    if isinstance(a, Ac):
        return ".ac " + _sweep_text(a)
    if isinstance(a, Tran):
        return f".tran {_num(a.tstep)} {_num(a.tstop)}"
    if isinstance(a, Noise):
        src = f" {a.input}" if a.input else ""
        return f".noise v({a.output}){src} " + _sweep_text(a.sweep)
    if isinstance(a, TempSet):
        return ".temp " + " ".join(_num(c) for c in a.celsius)
    raise TypeError(a)


def read_netlist(path):
    with open(path, encoding="utf-8") as fh:
        return parse_netlist(fh.read())
