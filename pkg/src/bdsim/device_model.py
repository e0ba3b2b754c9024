"""Level-1 MOSFET with an explicit body (bulk) terminal.

The drain current follows the square law with the threshold shifted by the
bulk-source voltage, so the bulk works as a second, weaker gate:

    vth = vt0 + gamma * (sqrt(phi + vsb) - sqrt(phi))
    id  = kp/2 * W/L * (vgs - vth)**2 * (1 + lambda*vds)          (saturation)
    gmb = gm * gamma / (2*sqrt(phi + vsb))

Everything is written once for an N device in normal orientation
(vds >= 0). Reverse orientation swaps source and drain and P devices are
evaluated by negating every terminal voltage and the resulting current.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError

BOLTZMANN = 1.380649e-23
CHARGE = 1.602176634e-19
T_NOMINAL = 300.15

#: forward bulk bias above which a latch-up warning is emitted
LATCHUP_VBS = 0.4
#: exponent clamp for the bulk diode
DIODE_EXP_LIMIT = 80.0

CUTOFF = "cutoff"
TRIODE = "triode"
SATURATION = "saturation"


def thermal_voltage(temp):
    return BOLTZMANN * temp / CHARGE


@dataclass(frozen=True)
class MosModelCard:
    """Device parameters. ``vt0`` is the threshold magnitude in N-normal form."""

    polarity: str = "N"
    vt0: float = 0.4
    kp: float = 100e-6
    gamma: float = 0.5
    phi: float = 0.7
    lam: float = 0.05
    kf: float = 0.0
    af: float = 1.0
    cox: float = 1e-2
    is_bulk: float = 1e-18
    tnom: float = T_NOMINAL
    tc_vth: float = 2e-3
    mu_exp: float = 1.5

    def __post_init__(self):
        if self.polarity not in ("N", "P"):
            raise DomainError(f"polarity must be 'N' or 'P', got {self.polarity!r}")
        checks = [
            ("kp", self.kp > 0), ("phi", self.phi > 0), ("gamma", self.gamma >= 0),
            ("lam", self.lam >= 0), ("cox", self.cox > 0), ("is_bulk", self.is_bulk >= 0),
            ("tnom", self.tnom > 0), ("kf", self.kf >= 0), ("af", self.af >= 0),
        ]
        for name, ok in checks:
            if not ok:
                raise DomainError(f"model parameter {name}={getattr(self, name)!r} out of range")

    @property
    def sign(self):
        return 1.0 if self.polarity == "N" else -1.0


@dataclass(frozen=True)
class MosGeometry:
    w: float
    l: float

    def __post_init__(self):
        if not (self.w > 0 and self.l > 0):
            raise DomainError(f"geometry must be positive, got W={self.w} L={self.l}")

    @property
    def aspect(self):
        return self.w / self.l


@dataclass(frozen=True)
class MosEval:
    """Drain current and its partial derivatives at one bias point.

    ``gm``, ``gds`` and ``gmb`` are the true partials of ``id`` with respect to
    vgs, vds and vbs. They are non-negative in normal orientation; when the
    device conducts in reverse (``reversed``), gm and gmb turn negative.
    """

    id: float
    gm: float
    gmb: float
    gds: float
    vth_eff: float
    region: str
    reversed: bool = False


def effective_vth(card, vsb):
    """Threshold magnitude at reverse bulk bias ``vsb`` (negative = forward)."""
    s = card.phi + vsb
    if s <= 0:
        raise DomainError(f"phi + vsb = {s:g} V <= 0: bulk junction past model validity")
    return card.vt0 + card.gamma * (math.sqrt(s) - math.sqrt(card.phi))


def apply_temperature(card, temp):
    """Return ``card`` re-targeted from ``card.tnom`` to ``temp`` kelvin.

    Mobility, and with it ``kp``, falls as (T/Tnom)**-mu_exp; the threshold
    magnitude drops linearly by ``tc_vth`` per kelvin.
    """
    if temp <= 0:
        raise DomainError(f"temperature must be positive, got {temp} K")
    if temp == card.tnom:
        return card
    return replace(
        card,
        kp=card.kp * (temp / card.tnom) ** (-card.mu_exp),
        vt0=card.vt0 - card.tc_vth * (temp - card.tnom),
    )


def _sqrt_term(card, vsb, limit):
    # Returns sqrt(phi+vsb) and d/dvsb of it. With limit=True the argument is
    # continued below s0 by s0*exp((s-s0)/s0) (C1, always positive) so that
    # Newton excursions into deep forward bias stay finite.
    s = card.phi + vsb
    if limit:
        s0 = 0.1 * card.phi
        if s < s0:
            e = math.exp((s - s0) / s0)
            sq = math.sqrt(s0 * e)
            return sq, 0.5 * sq / s0
    if s <= 0:
        raise DomainError(f"phi + vsb = {s:g} V <= 0: bulk junction past model validity")
    sq = math.sqrt(s)
    return sq, 0.5 / sq


def _normal(card, beta, vgs, vds, vbs, limit):
    # N device, vds >= 0
    sq, dsq = _sqrt_term(card, -vbs, limit)
    vth = card.vt0 + card.gamma * (sq - math.sqrt(card.phi))
    vov = vgs - vth
    if vov <= 0:
        return 0.0, 0.0, 0.0, 0.0, vth, CUTOFF
    clm = 1.0 + card.lam * vds
    if vds >= vov:
        id0 = 0.5 * beta * vov * vov
        gm = beta * vov * clm
        gds = id0 * card.lam
        region = SATURATION
    else:
        id0 = beta * (vov * vds - 0.5 * vds * vds)
        gm = beta * vds * clm
        gds = beta * (vov - vds) * clm + id0 * card.lam
        region = TRIODE
    # d vth / d vbs = -gamma * dsq, and d id / d vth = -gm
    gmb = gm * card.gamma * dsq
    return id0 * clm, gm, gmb, gds, vth, region


def eval_mos(card, geom, vgs, vds, vbs, temp=None, limit=False):
    """Evaluate the device at terminal voltages referenced to the source.

    ``temp`` (kelvin) re-targets the card first; leave it ``None`` when the
    card has already been moved to the circuit temperature. ``limit`` enables
    the smooth forward-bias continuation used inside the Newton loop; the
    default raises ``DomainError`` when phi + vsb <= 0.
    """
    if temp is not None:
        card = apply_temperature(card, temp)
    beta = card.kp * geom.aspect
    sign = card.sign
    vgs, vds, vbs = sign * vgs, sign * vds, sign * vbs
    if vds >= 0:
        i, gm, gmb, gds, vth, region = _normal(card, beta, vgs, vds, vbs, limit)
        rev = False
    else:
        # source and drain trade places
        i, gm_r, gmb_r, gds_r, vth, region = _normal(
            card, beta, vgs - vds, -vds, vbs - vds, limit)
        i = -i
        gm, gmb = -gm_r, -gmb_r
        gds = gm_r + gds_r + gmb_r
        rev = True
    # P: id(v) = -idN(-v); the partials keep their sign
    return MosEval(sign * i, gm, gmb, gds, vth, region, rev)


def bulk_diode_current(card, vbs_forward, temp=T_NOMINAL):
    """Bulk-channel junction current for a forward bias ``vbs_forward``."""
    if card.is_bulk == 0:
        return 0.0
    arg = min(vbs_forward / thermal_voltage(temp), DIODE_EXP_LIMIT)
    return card.is_bulk * math.expm1(arg)


def bulk_diode_conductance(card, vbs_forward, temp=T_NOMINAL):
    if card.is_bulk == 0:
        return 0.0
    vt = thermal_voltage(temp)
    arg = vbs_forward / vt
    if arg > DIODE_EXP_LIMIT:
        return 0.0
    return card.is_bulk * math.exp(arg) / vt


def mos_noise_psd(ev, card, geom, f, temp=T_NOMINAL):
    """Drain-current noise densities (thermal, flicker) in A^2/Hz."""
    if f <= 0:
        raise DomainError(f"noise frequency must be positive, got {f}")
    thermal = 4.0 * BOLTZMANN * temp * (2.0 / 3.0) * abs(ev.gm)
    if card.kf == 0 or ev.id == 0:
        flicker = 0.0
    else:
        flicker = card.kf * abs(ev.id) ** card.af / (f * card.cox * geom.w * geom.l)
    return thermal, flicker
