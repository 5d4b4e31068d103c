"""Closed-form circular GEO transfer mechanics.

Combined plane-change plus phasing transfers between circular GEO orbits:
plane geometry, coast and phasing times, impulse vectors and the full
transfer leg.  Everything here is a pure function; the hot inner loop
lives in :mod:`oosplan.kernels`, this module is the typed user-facing
layer on top of it.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .constants import GEO, PhysicalConstants

TWO_PI = 2.0 * math.pi

COPLANAR_TOL = kernels.COPLANAR_TOL
DEFAULT_REF_RATE = kernels.DEFAULT_REF_RATE
LEGACY_REF_RATE = kernels.LEGACY_REF_RATE


class CoplanarOrbits(ValueError):
    """The two orbital planes coincide; there is no intersection line."""


class PointOffOrbit(ValueError):
    """A supplied position does not lie on the expected orbit."""


class NonPositivePhasingTime(ValueError):
    """2*pi*k + theta <= 0; cannot happen for k >= 1 and theta > -pi."""


def wrap_pi(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    return kernels.wrap_pi(float(angle))


def wrap_two_pi(angle: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    return kernels.wrap_two_pi(float(angle))


@dataclass(frozen=True)
class OrbitalElements:
    """Circular GEO orbit: inclination, RAAN and anomaly at epoch (rad)."""

    inclination: float
    raan: float
    true_anomaly_at_epoch: float
    semi_major_axis: float = GEO.r_geo

    def __post_init__(self):
        object.__setattr__(self, "inclination",
                           float(self.inclination) % math.pi)
        object.__setattr__(self, "raan", wrap_two_pi(self.raan))
        object.__setattr__(self, "true_anomaly_at_epoch",
                           wrap_two_pi(self.true_anomaly_at_epoch))
        if self.semi_major_axis <= 0:
            raise ValueError("semi_major_axis must be positive")

    @classmethod
    def from_degrees(cls, inclination, raan, true_anomaly,
                     semi_major_axis: float = GEO.r_geo):
        return cls(math.radians(inclination), math.radians(raan),
                   math.radians(true_anomaly), semi_major_axis)


@dataclass(frozen=True)
class TransferLeg:
    """One task-to-task transfer with all temporal and impulse components.

    Times in hours, impulses in m/s, positions in km.
    """

    departure_time: float
    coast_time: float
    phase_angle: float
    rotations: int
    phasing_time: float
    phasing_sma: float
    impulse_1: np.ndarray
    impulse_2: np.ndarray
    dv_total: float
    maneuver_point: np.ndarray
    plane_change_dv: float
    phasing_dv: float
    plane_separation: float

    @property
    def duration(self) -> float:
        return self.coast_time + self.phasing_time

    @property
    def arrival_time(self) -> float:
        return self.departure_time + self.duration


def angular_momentum_dir(elements: OrbitalElements) -> np.ndarray:
    """Unit normal of the orbital plane (Rz(raan) @ Rx(inc) @ z-hat)."""
    return kernels.plane_normal(elements.inclination, elements.raan)


def angular_separation(src: OrbitalElements, tgt: OrbitalElements) -> float:
    """Angle between the two orbital planes, [0, pi]."""
    arg = (math.cos(src.inclination) * math.cos(tgt.inclination)
           + math.sin(src.inclination) * math.sin(tgt.inclination)
           * math.cos(src.raan - tgt.raan))
    return math.acos(kernels.clamp_unit(arg))


def intersection_points(src: OrbitalElements, tgt: OrbitalElements,
                        constants: PhysicalConstants = GEO,
                        ) -> Tuple[np.ndarray, np.ndarray]:
    """The two antipodal points where the orbital planes cross."""
    h_s = angular_momentum_dir(src)
    h_t = angular_momentum_dir(tgt)
    c = np.cross(h_s, h_t)
    n = np.linalg.norm(c)
    if n < COPLANAR_TOL:
        raise CoplanarOrbits(
            "orbital planes are coincident; no plane-change point")
    r_m1 = constants.r_geo * c / n
    return r_m1, -r_m1


def position_at(elements: OrbitalElements, t: float,
                constants: PhysicalConstants = GEO) -> np.ndarray:
    """Position on the circular orbit t hours after epoch."""
    u = elements.true_anomaly_at_epoch + constants.omega_geo * t
    return kernels.orbit_position(elements.inclination, elements.raan, u,
                                  constants.r_geo)


def velocity_at_position(elements: OrbitalElements, r: np.ndarray,
                         constants: PhysicalConstants = GEO) -> np.ndarray:
    """Circular-orbit velocity vector at a position on the orbit, km/s."""
    h = angular_momentum_dir(elements)
    t_hat = np.cross(h, r)
    n = np.linalg.norm(t_hat)
    if n == 0.0:
        raise PointOffOrbit("position is on the plane normal")
    return constants.v_circ * t_hat / n


def coast_time(elements: OrbitalElements, depart_position: np.ndarray,
               maneuver_point: np.ndarray,
               constants: PhysicalConstants = GEO,
               tol_km: float = 1.0) -> float:
    """Prograde travel time from a position to the maneuver point, hours."""
    h = angular_momentum_dir(elements)
    for name, r in (("depart_position", depart_position),
                    ("maneuver_point", maneuver_point)):
        r = np.asarray(r, float)
        if abs(float(np.dot(r, h))) > tol_km:
            raise PointOffOrbit(f"{name} is {float(np.dot(r, h)):.3f} km "
                                "out of the orbital plane")
    ang = kernels.prograde_angle(np.asarray(depart_position, float),
                                 np.asarray(maneuver_point, float), h)
    return ang / constants.omega_geo


def phase_angle(ssc_longitude: float, tgt_longitude: float) -> float:
    """Signed phasing angle between SSC and target, wrapped into (-pi, pi]."""
    return wrap_pi(float(ssc_longitude) - float(tgt_longitude))


def phasing_time(theta: float, k: int,
                 constants: PhysicalConstants = GEO) -> float:
    """Duration of a k-revolution phasing maneuver, hours."""
    if k < 1:
        raise ValueError("rotation count k must be >= 1")
    total = TWO_PI * k + theta
    if total <= 0.0:
        raise NonPositivePhasingTime(
            f"2*pi*k + theta = {total:.6f} is not positive")
    return total / TWO_PI * constants.t_geo


def phasing_sma(theta: float, k: int,
                constants: PhysicalConstants = GEO) -> float:
    """Semi-major axis of the phasing orbit, km."""
    if k < 1:
        raise ValueError("rotation count k must be >= 1")
    return constants.r_geo * ((TWO_PI * k + theta) / (TWO_PI * k)) ** (2.0 / 3.0)


def phasing_dv(theta: float, k: int, velocity_at_maneuver: np.ndarray,
               constants: PhysicalConstants = GEO,
               ) -> Tuple[float, np.ndarray, np.ndarray]:
    """Total phasing delta-v (m/s) split into two opposite impulses.

    The scalar is the vis-viva speed difference between GEO and the
    phasing orbit at r_geo, counted twice (injection and capture).
    """
    v = np.asarray(velocity_at_maneuver, float)
    vn = np.linalg.norm(v)
    if vn == 0.0:
        raise ValueError("velocity_at_maneuver must be nonzero")
    a_ph = phasing_sma(theta, k, constants)
    mu = constants.mu
    r = constants.r_geo
    scalar = 2.0 * abs(math.sqrt(mu)
                       * (math.sqrt(2.0 / r - 1.0 / a_ph)
                          - math.sqrt(1.0 / r))) * 1000.0
    impulse_a = 0.5 * scalar * float(np.sign(theta)) * v / vn
    return scalar, impulse_a, -impulse_a


def transfer(src: OrbitalElements, tgt: OrbitalElements,
             tgt_anomaly_at_epoch: Optional[float] = None,
             depart_time: float = 0.0,
             depart_position: Optional[np.ndarray] = None,
             k: int = 1,
             constants: PhysicalConstants = GEO,
             ref_rate: float = DEFAULT_REF_RATE) -> TransferLeg:
    """Full plane-change + phasing transfer leg from src to tgt.

    ``tgt_anomaly_at_epoch`` defaults to the anomaly stored on ``tgt``.
    When ``depart_position`` is given it is checked for consistency with
    the source orbit propagated to ``depart_time``.  ``ref_rate`` selects
    the coast convention (see :func:`oosplan.kernels.transfer_leg`).
    """
    if k < 1:
        raise ValueError("rotation count k must be >= 1")
    u_t0 = (tgt.true_anomaly_at_epoch if tgt_anomaly_at_epoch is None
            else float(tgt_anomaly_at_epoch))
    if depart_position is not None:
        expected = position_at(src, depart_time, constants)
        err = float(np.linalg.norm(np.asarray(depart_position, float)
                                   - expected))
        if err > 1.0:
            raise PointOffOrbit(
                f"depart_position is {err:.3f} km from the source orbit "
                f"position at t={depart_time:.3f} h")
    row = np.zeros(kernels.LEG_COLS)
    kernels.transfer_leg(src.inclination, src.raan,
                         src.true_anomaly_at_epoch,
                         tgt.inclination, tgt.raan, u_t0,
                         float(depart_time), int(k), float(ref_rate),
                         constants.mu, constants.r_geo, constants.t_geo, row)
    return TransferLeg(
        departure_time=float(depart_time),
        coast_time=row[kernels.COL_COAST],
        phase_angle=row[kernels.COL_THETA],
        rotations=int(k),
        phasing_time=row[kernels.COL_TPHASE],
        phasing_sma=row[kernels.COL_APHASE],
        impulse_1=row[kernels.COL_IMP1:kernels.COL_IMP1 + 3].copy(),
        impulse_2=row[kernels.COL_IMP2:kernels.COL_IMP2 + 3].copy(),
        dv_total=row[kernels.COL_DV],
        maneuver_point=row[kernels.COL_RM:kernels.COL_RM + 3].copy(),
        plane_change_dv=row[kernels.COL_PLANE_DV],
        phasing_dv=row[kernels.COL_PHASE_DV],
        plane_separation=row[kernels.COL_ALPHA],
    )
