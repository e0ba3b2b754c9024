"""Supply power and open-loop gain of the builtin OTA versus supply voltage.

    python scripts/power_vs_vdd.py --vdd 0.6 0.7 0.8 0.9 1.0
"""

import argparse
import sys

from bdsim import parse_netlist, run_ac, run_op
from bdsim.bench import with_supply
from bdsim.cli import write_csv
from bdsim.decks import OTA_DECK
from bdsim.errors import BdsimError
from bdsim.measure import avg_power, dc_gain_db
from bdsim.netlist import Ac


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vdd", type=float, nargs="+", default=[0.6, 0.7, 0.8, 0.9, 1.0])
    ap.add_argument("--out", default="power_vs_vdd.csv")
    args = ap.parse_args()
    base = parse_netlist(OTA_DECK)
    rows = []
    for vdd in args.vdd:
        ckt = with_supply(base, vdd)
        try:
            op = run_op(ckt)
            gain = dc_gain_db(run_ac(ckt, Ac("dec", 1, 1.0, 10.0), op=op), "out")
        except BdsimError as exc:
            print(f"vdd={vdd}: {exc}", file=sys.stderr)
            continue
        power = avg_power(op, "vdd")
        saturated = all(ev.region == "saturation" for ev in op.devices.values())
        rows.append([vdd, power, gain, "yes" if saturated else "no"])
        print(f"vdd {vdd:.2f} V  power {power * 1e6:7.3f} uW  gain {gain:6.2f} dB  "
              f"all saturated: {saturated}")
    write_csv(args.out, ["vdd_v", "power_w", "gain_db", "all_saturated"], rows)


if __name__ == "__main__":
    main()
