"""Low-frequency gain, UGB and phase margin of the builtin OTA across temperature."""

import argparse

import numpy as np

from bdsim import parse_netlist, temperature_sweep
from bdsim.cli import write_csv
from bdsim.decks import OTA_DECK
from bdsim.measure import dc_gain_db, ugb_and_phase_margin
from bdsim.netlist import Ac


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--start", type=float, default=-20.0)
    ap.add_argument("--stop", type=float, default=70.0)
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--out", default="temperature_sweep.csv")
    args = ap.parse_args()
    temps = [float(t) for t in np.linspace(args.start, args.stop, args.points)]
    sweeps = temperature_sweep(parse_netlist(OTA_DECK), temps, Ac("dec", 20, 1.0, 100e6))
    rows = []
    for t, s in sweeps.items():
        fu, pm = ugb_and_phase_margin(s, "out")
        rows.append([t, dc_gain_db(s, "out"), fu, pm])
        print(f"{t:7.2f} C  gain {rows[-1][1]:6.3f} dB  UGB {fu / 1e6:6.3f} MHz  PM {pm:6.1f} deg")
    write_csv(args.out, ["temp_c", "gain_db", "ugb_hz", "phase_margin_deg"], rows)


if __name__ == "__main__":
    main()
