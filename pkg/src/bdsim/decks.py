"""Builtin netlists."""

OTA_DECK = """\
bulk-driven balanced OTA, 0.9 V supply, 1 pF load
* Inputs drive the bulks of the NMOS pair M1/M2; their gates sit at Vb = VDD.
* M3/M4 are the diode-connected PMOS active load, M5/M6 copy the two branch
* currents with mirror gain B = 1, and M7/M8 fold the M5 copy back so the
* output current at node "out" is the difference of the two branch currents.
*
* Device sizes are not published for this circuit; these are chosen so every
* transistor saturates at VDD = 0.9 V and the supply draws about 4.3 uA
* (3.9 uW). The tail source therefore carries 2.1 uA.
* Thresholds, kp and lambda approximate a 130 nm process with L = 1 um.
.model nbd nmos (vt0=0.3 kp=200u gamma=0.5 phi=0.7 lambda=0.7 kf=1e-29 af=1 cox=15m is=1e-18)
.model pbd pmos (vt0=-0.3 kp=80u gamma=0.5 phi=0.7 lambda=0.7 kf=1e-29 af=1 cox=15m is=1e-18)
Vdd vdd 0 DC 0.9
Vb vb 0 DC 0.9
* 1 V differential AC drive split +0.5 / -0.5 between the bulks
Vinp inp 0 DC 0 AC 0.5 0
Vinn inn 0 DC 0 AC 0.5 180
Ib tail 0 DC 2.1u
M1 x1 vb tail inn nbd W=1u L=1u
M2 x2 vb tail inp nbd W=1u L=1u
M3 x1 x1 vdd vdd pbd W=4u L=1u
M4 x2 x2 vdd vdd pbd W=4u L=1u
M5 x3 x1 vdd vdd pbd W=4u L=1u
M6 out x2 vdd vdd pbd W=4u L=1u
M7 x3 x3 0 0 nbd W=1.5u L=1u
M8 out x3 0 0 nbd W=1.5u L=1u
CL out 0 1p
.op
.ac dec 20 1 100meg
.noise v(out) dec 10 1 100meg
.dc Vinp -0.5 0.9 0.02 Vinn 0 0.5 0.125
.end
"""

DIVIDER_DECK = """\
resistive divider
V1 in 0 DC 1
R1 in out 1k
R2 out 0 1k
.op
.end
"""

BUILTIN = {"ota": OTA_DECK, "divider": DIVIDER_DECK}
