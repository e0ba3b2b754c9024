"""Write one CSV per characterization plot of the builtin OTA deck.

    python scripts/reproduce_figures.py --out figures/
"""

import argparse
import os

import numpy as np

from bdsim import (measure, parse_netlist, run_ac, run_dc_sweep, run_noise,
                   set_temperature)
from bdsim.bench import BenchConfig, bench_ota
from bdsim.cli import write_csv
from bdsim.decks import OTA_DECK
from bdsim.netlist import Ac, DcSweep, Noise


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--deck", help="netlist file (default: builtin OTA)")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    text = open(args.deck, encoding="utf-8").read() if args.deck else OTA_DECK
    ckt = parse_netlist(text)
    cfg = BenchConfig()
    report, data = bench_ota(ckt, cfg)
    path = lambda name: os.path.join(args.out, name)  # noqa: E731

    ac = data["ac"]
    h = ac.transfer("out")
    write_csv(path("gain_phase.csv"), ["freq_hz", "mag_db", "phase_deg"],
              zip(ac.freqs, 20 * np.log10(np.abs(h)), measure.unwrapped_phase_deg(h)))

    tran = data["tran"]
    write_csv(path("step_response.csv"), ["time_s", "v_inp", "v_out"],
              zip(tran.times, tran.v("inp"), tran.v("out")))

    swing = data["swing"]
    write_csv(path("output_swing.csv"), ["time_s", "v_inp", "v_out"],
              zip(swing.times, swing.v("inp"), swing.v("out")))

    rows = []
    for t in cfg.temps_c:
        s = run_ac(set_temperature(ckt, t), cfg.ac)
        rows += [[t, f, 20 * np.log10(abs(v))] for f, v in zip(s.freqs, s.transfer("out"))]
    write_csv(path("gain_vs_temperature.csv"), ["temp_c", "freq_hz", "mag_db"], rows)

    noise = run_noise(ckt, Noise("out", None, Ac("dec", 10, 1.0, 100e6)), op=data["op"])
    write_csv(path("noise.csv"), ["freq_hz", "onoise_v_rthz", "inoise_v_rthz"],
              zip(noise.freqs, noise.onoise, noise.inoise))

    dc = run_dc_sweep(ckt, DcSweep("vinp", -0.5, 0.9, 0.02, "vinn", 0.0, 0.5, 0.125))
    write_csv(path("dc_transfer.csv"), ["vin_v", "vcm_v", "vout_v"],
              [[v1, v2, dc.voltages["out"][k, j]] for k, v2 in enumerate(dc.values2)
               for j, v1 in enumerate(dc.values) if dc.valid[k, j]])

    vin, vout = data["dc_follower"].curve("out")
    write_csv(path("follower_dc.csv"), ["vin_v", "vout_v"], zip(vin, vout))

    for label, value, unit, _ in report.rows():
        print(f"{label:<34} {value:10.4g} {unit}")
    print(f"CSV files written to {args.out}")


if __name__ == "__main__":
    main()
