"""Physical constants for circular GEO transfer computations."""

import math
from dataclasses import dataclass

MU_EARTH = 398600.4418
R_GEO = 42164.0

# Orbital period of a circular orbit at GEO radius, in hours.  This is the
# sidereal day (~23.9343 h) rather than the 24 h solar day; phasing times
# and rendezvous closure are only consistent with the physical period.
T_GEO = 2.0 * math.pi * math.sqrt(R_GEO ** 3 / MU_EARTH) / 3600.0


@dataclass(frozen=True)
class PhysicalConstants:
    """Gravitational parameter and GEO geometry.

    Units: mu in km^3/s^2, r_geo in km, t_geo in hours.  The angular rate
    omega_geo (rad/hour) is derived so that omega_geo * t_geo == 2*pi
    exactly.  t_geo is stored explicitly so a nominal 24 h variant stays
    selectable, e.g. ``PhysicalConstants(t_geo=24.0)``.
    """

    mu: float = MU_EARTH
    r_geo: float = R_GEO
    t_geo: float = T_GEO

    def __post_init__(self):
        if self.mu <= 0 or self.r_geo <= 0 or self.t_geo <= 0:
            raise ValueError("mu, r_geo and t_geo must all be positive")

    @property
    def omega_geo(self) -> float:
        """GEO angular rate in rad/hour."""
        return 2.0 * math.pi / self.t_geo

    @property
    def v_circ(self) -> float:
        """Circular orbit speed at r_geo, km/s."""
        return math.sqrt(self.mu / self.r_geo)


GEO = PhysicalConstants()

# Variant with the orbit period rounded to a solar day, kept for
# sensitivity studies against the nominal model.
GEO_SOLAR = PhysicalConstants(t_geo=24.0)
