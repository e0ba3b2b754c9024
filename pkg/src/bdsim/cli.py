"""Command-line entry point.

    bdsim run <deck> [--analysis all|op|dc|ac|tran|noise] [--out DIR]
                     [--temp C,...] [--format csv|table] [--probe NODE]
    bdsim bench-ota [--deck FILE] [--vdd V] [--spot-noise-hz F] [--out DIR]

``<deck>`` is a netlist path or a builtin name (``ota``, ``divider``).
Exit status: 0 success, 1 parse/topology/input error, 2 convergence failure,
3 bench report with at least one failed metric.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import measure
from .analyses import (run_ac, run_dc_sweep, run_noise, run_op, run_tran,
                       set_temperature)
from .bench import BenchConfig, bench_ota
from .decks import BUILTIN
from .errors import (DomainError, NoConvergence, ParseError, SingularMatrix,
                     TopologyError)
from .netlist import Ac, DcSweep, Noise, TempSet, Tran, parse_netlist

log = logging.getLogger("bdsim")

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_PARTIAL = 0, 1, 2, 3
ANALYSES = ("all", "op", "dc", "ac", "tran", "noise")


@dataclass
class RunConfig:
    deck: str
    analysis: str = "all"
    out_dir: str = "."
    fmt: str = "csv"
    temps: list = field(default_factory=list)
    probe: str = "out"
    verbose: int = 0


def fmt(x):
    """Shortest round-trip decimal; locale independent."""
    return repr(float(x))


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(r if isinstance(r, str) else fmt(r) for r in row) + "\n")


def load_deck(name):
    if os.path.exists(name):
        with open(name, encoding="utf-8") as fh:
            return parse_netlist(fh.read())
    if name.lower() in BUILTIN:
        return parse_netlist(BUILTIN[name.lower()])
    raise FileNotFoundError(name)


# -- run ----------------------------------------------------------------------------

def op_text(circuit, op):
    lines = [f"* {circuit.title}", f"* temperature {circuit.temp_c:g} C", ""]
    for node in circuit.nodes[1:]:
        lines.append(f"v({node}) = {op.voltages[node]:.9g}")
    for name, i in op.branch_currents.items():
        lines.append(f"i({name}) = {i:.9g}")
    if op.devices:
        lines += ["", f"{'device':<8} {'region':<11} {'id':>14} {'gm':>14} {'gmb':>14} {'gds':>14}"]
        for name, ev in op.devices.items():
            lines.append(f"{name:<8} {ev.region:<11} {ev.id:>14.6e} {ev.gm:>14.6e} "
                         f"{ev.gmb:>14.6e} {ev.gds:>14.6e}")
    for w in op.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def _directive(circuit, kind):
    for a in circuit.analyses:
        if isinstance(a, kind):
            return a
    return None


def _probe(circuit, node):
    if node.lower() not in circuit.nodes:
        raise DomainError(f"probe node {node!r} is not in the circuit")
    return node.lower()


def _run_one(circuit, cfg, suffix, selected):
    outputs = []

    def path(stem):
        base, ext = os.path.splitext(stem)
        p = os.path.join(cfg.out_dir, f"{base}{suffix}{ext}")
        outputs.append(p)
        return p

    op = run_op(circuit)
    if "op" in selected:
        with open(path("op.txt"), "w", encoding="utf-8") as fh:
            fh.write(op_text(circuit, op))
        if cfg.fmt == "table":
            print(op_text(circuit, op))
    if "dc" in selected:
        d = _directive(circuit, DcSweep)
        node = _probe(circuit, cfg.probe)
        res = run_dc_sweep(circuit, d)
        header = ["vin_v", "vcm_v", "vout_v"] if d.source2 else ["vin_v", "vout_v"]
        rows = []
        for k, v2 in enumerate(res.values2):
            for j, v1 in enumerate(res.values):
                vout = res.voltages[node][k, j]
                rows.append([v1, v2, vout] if d.source2 else [v1, vout])
        write_csv(path("dc.csv"), header, rows)
        for point, msg in res.failures:
            print(f"dc point {point} failed: {msg}", file=sys.stderr)
    if "ac" in selected:
        node = _probe(circuit, cfg.probe)
        ac = run_ac(circuit, _directive(circuit, Ac), op=op)
        h = ac.transfer(node)
        with np.errstate(divide="ignore"):
            mag = 20 * np.log10(np.abs(h))
        phase = np.degrees(np.unwrap(np.angle(h)))
        write_csv(path("ac.csv"), ["freq_hz", "mag_db", "phase_deg"],
                  zip(ac.freqs, mag, phase))
        if cfg.fmt == "table":
            try:
                fu, pm = measure.ugb_and_phase_margin(ac, node)
                print(f"gain {measure.dc_gain_db(ac, node):.3f} dB, UGB {fu:.6g} Hz, PM {pm:.2f} deg")
            except Exception as exc:  # summary line only
                print(f"gain {measure.dc_gain_db(ac, node):.3f} dB ({exc})")
    if "tran" in selected:
        wave = run_tran(circuit, _directive(circuit, Tran))
        nodes = circuit.nodes[1:]
        write_csv(path("tran.csv"), ["time_s"] + [f"v_{n}" for n in nodes],
                  zip(wave.times, *(wave.v(n) for n in nodes)))
    if "noise" in selected:
        nres = run_noise(circuit, _directive(circuit, Noise), op=op)
        write_csv(path("noise.csv"), ["freq_hz", "onoise_v_rthz", "inoise_v_rthz"],
                  zip(nres.freqs, nres.onoise, nres.inoise))
    return outputs


def cmd_run(cfg):
    try:
        circuit = load_deck(cfg.deck)
    except FileNotFoundError:
        print(f"error: no such netlist file or builtin deck: {cfg.deck}", file=sys.stderr)
        return EXIT_INPUT
    except (ParseError, TopologyError) as exc:
        print(f"error: {cfg.deck}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    kinds = {"dc": DcSweep, "ac": Ac, "tran": Tran, "noise": Noise}
    if cfg.analysis == "all":
        selected = ["op"] + [k for k, t in kinds.items() if _directive(circuit, t)]
    else:
        selected = [cfg.analysis]
        if cfg.analysis in kinds and _directive(circuit, kinds[cfg.analysis]) is None:
            print(f"error: deck has no .{cfg.analysis} directive", file=sys.stderr)
            return EXIT_INPUT
    temps = cfg.temps
    if not temps:
        tset = _directive(circuit, TempSet)
        temps = list(tset.celsius) if tset and len(tset.celsius) > 1 else [circuit.temp_c]
    os.makedirs(cfg.out_dir, exist_ok=True)
    try:
        for t in temps:
            ckt = circuit if t == circuit.temp_c else set_temperature(circuit, t)
            suffix = "" if len(temps) == 1 else f"_{t:g}C"
            for p in _run_one(ckt, cfg, suffix, selected):
                log.info("wrote %s", p)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoConvergence, SingularMatrix) as exc:
        print(f"error: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


# -- bench-ota ----------------------------------------------------------------------

def report_table(report):
    rows = report.rows()
    width = max(len(r[0]) for r in rows)
    lines = [f"{'Characteristics':<{width}}  {'Simulated':>14}  unit"]
    for label, value, unit, err in rows:
        shown = "FAILED" if value is None else f"{value:.4g}"
        lines.append(f"{label:<{width}}  {shown:>14}  {unit}")
    if report.linear_range:
        lo, hi, w = report.linear_range
        lines.append(f"{'Linear range':<{width}}  {w * 1e3:>14.4g}  mV "
                     f"({lo * 1e3:.0f} to {hi * 1e3:.0f} mV)")
    for t, g in report.gain_vs_temp.items():
        lines.append(f"{f'Open loop gain at {t:g} °C':<{width}}  {g:>14.4g}  dB")
    for name, msg in report.errors.items():
        lines.append(f"failed: {name}: {msg}")
    return "\n".join(lines)


def write_bench(report, data, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for label, value, unit, err in report.rows():
        rows.append([label, "nan" if value is None else fmt(value), unit,
                     "failed" if value is None else "ok"])
    write_csv(os.path.join(out_dir, "bench.csv"), ["metric", "value", "unit", "status"], rows)
    write_csv(os.path.join(out_dir, "temperature.csv"), ["temp_c", "gain_db"],
              sorted(report.gain_vs_temp.items()))
    if report.linear_range:
        write_csv(os.path.join(out_dir, "linear_range.csv"), ["low_v", "high_v", "width_v"],
                  [report.linear_range])
    if "ac" in data:
        ac = data["ac"]
        h = ac.transfer("out")
        write_csv(os.path.join(out_dir, "ac.csv"), ["freq_hz", "mag_db", "phase_deg"],
                  zip(ac.freqs, 20 * np.log10(np.abs(h)), measure.unwrapped_phase_deg(h)))
    for key in ("tran", "swing"):
        if key in data:
            w = data[key]
            write_csv(os.path.join(out_dir, f"{key}.csv"), ["time_s", "v_inp", "v_out"],
                      zip(w.times, w.v("inp"), w.v("out")))
    if "dc" in data:
        d = data["dc"]
        rows = [[v1, v2, d.voltages["out"][k, j]]
                for k, v2 in enumerate(d.values2) for j, v1 in enumerate(d.values)
                if d.valid[k, j]]
        write_csv(os.path.join(out_dir, "dc.csv"), ["vin_v", "vcm_v", "vout_v"], rows)
    if "dc_follower" in data:
        vin, vout = data["dc_follower"].curve("out")
        write_csv(os.path.join(out_dir, "dc_follower.csv"), ["vin_v", "vout_v"], zip(vin, vout))


def cmd_bench_ota(args):
    for flag, value in (("--vdd", args.vdd), ("--spot-noise-hz", args.spot_noise_hz),
                        ("--settle-tol", args.settle_tol)):
        if not value > 0:
            print(f"error: {flag} must be positive, got {value}", file=sys.stderr)
            return EXIT_INPUT
    try:
        circuit = load_deck(args.deck)
    except FileNotFoundError:
        print(f"error: no such netlist file or builtin deck: {args.deck}", file=sys.stderr)
        return EXIT_INPUT
    except (ParseError, TopologyError) as exc:
        print(f"error: {args.deck}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg = BenchConfig(vdd=args.vdd, spot_noise_hz=args.spot_noise_hz, settle_tol=args.settle_tol)
    try:
        report, data = bench_ota(circuit, cfg)
    except KeyError as exc:
        print(f"error: deck lacks required source {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoConvergence, SingularMatrix) as exc:
        print(f"error: operating point failed: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    write_bench(report, data, args.out)
    print(report_table(report))
    return EXIT_OK if report.complete else EXIT_PARTIAL


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1 so that 2 stays reserved for convergence failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="bdsim", description="bulk-driven OTA simulator")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the analyses of a netlist")
    r.add_argument("deck")
    r.add_argument("--analysis", choices=ANALYSES, default="all")
    r.add_argument("--out", default=".")
    r.add_argument("--temp", default="", help="comma-separated temperatures in C")
    r.add_argument("--format", choices=("csv", "table"), default="csv")
    r.add_argument("--probe", default="out", help="output node for ac/dc CSVs")

    b = sub.add_parser("bench-ota", help="characterize a bulk-driven OTA deck")
    b.add_argument("--deck", default="ota")
    b.add_argument("--vdd", type=float, default=0.9)
    b.add_argument("--spot-noise-hz", type=float, default=1e3)
    b.add_argument("--settle-tol", type=float, default=0.10)
    b.add_argument("--out", default=".")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        try:
            temps = [float(t) for t in args.temp.split(",") if t.strip()]
        except ValueError:
            print(f"error: bad --temp list {args.temp!r}", file=sys.stderr)
            return EXIT_INPUT
        cfg = RunConfig(args.deck, args.analysis, args.out, args.format, temps,
                        args.probe, args.verbose)
        return cmd_run(cfg)
    return cmd_bench_ota(args)


if __name__ == "__main__":
    sys.exit(main())
