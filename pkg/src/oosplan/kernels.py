"""Hot numeric kernels: single transfer legs and whole-route propagation.

These functions are compiled with numba when available (see
:mod:`oosplan.accel`); they deliberately use only scalars, small numpy
arrays and ``math`` calls so the same source runs unmodified on the
pure-Python fallback path.

A transfer between two circular GEO orbits is a plane-change impulse at
an intersection point of the two orbital planes followed by a two-impulse
phasing maneuver of ``k`` revolutions in the target plane.  Each leg is
written into a flat row of :data:`LEG_COLS` floats so route propagation
can stay allocation-light inside the GA inner loop.

Row layout (times in hours, impulses in m/s, positions in km):

    0  coast time          7  impulse1 z         14 plane-change |dv|
    1  phase angle (rad)   8  impulse2 x         15 phasing |dv|
    2  phasing time        9  impulse2 y         16 plane separation (rad)
    3  phasing sma (km)    10 impulse2 z         17 departure time
    4  total leg dv        11 maneuver point x   18 arrival time
    5  impulse1 x          12 maneuver point y   19 completion time
    6  impulse1 y          13 maneuver point z
"""

import math

import numpy as np

from .accel import njit

TWO_PI = 2.0 * math.pi

# Below this plane separation (rad) the orbits are treated as coplanar and
# the plane-change step is skipped entirely.
COPLANAR_TOL = 1e-6

# Rate (as a fraction of the orbital rate) at which the coast reference
# position advances from its epoch value; see transfer_leg.  The default
# uses the true departure position, which puts the maneuver point exactly
# on the plane-intersection line and closes the rendezvous to numerical
# precision.  LEGACY_REF_RATE reproduces published schedules whose coast
# reference creeps off epoch at 1/3600 of the orbital rate.
DEFAULT_REF_RATE = 1.0
LEGACY_REF_RATE = 1.0 / 3600.0

LEG_COLS = 20

COL_COAST = 0
COL_THETA = 1
COL_TPHASE = 2
COL_APHASE = 3
COL_DV = 4
COL_IMP1 = 5
COL_IMP2 = 8
COL_RM = 11
COL_PLANE_DV = 14
COL_PHASE_DV = 15
COL_ALPHA = 16
COL_DEPART = 17
COL_ARRIVE = 18
COL_END = 19


@njit(cache=True)
def wrap_pi(x):
    """Wrap an angle into (-pi, pi]."""
    w = x % TWO_PI
    if w > math.pi:
        w -= TWO_PI
    return w


@njit(cache=True)
def wrap_two_pi(x):
    """Wrap an angle into [0, 2*pi)."""
    return x % TWO_PI


@njit(cache=True)
def clamp_unit(x):
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


@njit(cache=True)
def plane_normal(inc, raan):
    """Unit normal of an orbital plane: Rz(raan) @ Rx(inc) @ z-hat."""
    h = np.empty(3)
    si = math.sin(inc)
    h[0] = math.sin(raan) * si
    h[1] = -math.cos(raan) * si
    h[2] = math.cos(inc)
    return h


@njit(cache=True)
def orbit_position(inc, raan, u, radius):
    """Position at argument of latitude u on a circular orbit."""
    cu = math.cos(u)
    su = math.sin(u)
    ci = math.cos(inc)
    si = math.sin(inc)
    co = math.cos(raan)
    so = math.sin(raan)
    r = np.empty(3)
    r[0] = radius * (cu * co - su * ci * so)
    r[1] = radius * (cu * so + su * ci * co)
    r[2] = radius * (su * si)
    return r


@njit(cache=True)
def _cross(a, b):
    c = np.empty(3)
    c[0] = a[1] * b[2] - a[2] * b[1]
    c[1] = a[2] * b[0] - a[0] * b[2]
    c[2] = a[0] * b[1] - a[1] * b[0]
    return c


@njit(cache=True)
def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@njit(cache=True)
def _norm(a):
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


@njit(cache=True)
def prograde_angle(r0, rm, h):
    """Prograde angular distance from r0 to rm about plane normal h, [0, 2pi)."""
    ang = math.acos(clamp_unit(_dot(r0, rm) / (_norm(r0) * _norm(rm))))
    if _dot(_cross(r0, rm), h) >= 0.0:
        return ang
    return TWO_PI - ang


@njit(cache=True)
def transfer_leg(inc_s, raan_s, u_s0, inc_t, raan_t, u_t0,
                 t_dep, k, ref_rate, mu, r_geo, t_geo, out):
    """One plane-change + phasing transfer leg departing at ``t_dep``.

    ``u_s0`` / ``u_t0`` are the servicer and target arguments of latitude
    at the mission epoch (t=0); positions at any instant follow from the
    common GEO rate.  ``k`` is the integer phasing rotation count.

    ``ref_rate`` sets the coast-time convention.  The coast duration is
    the prograde angle from a reference position on the source orbit to
    the nearer plane-intersection point; the reference advances from the
    epoch position at ``ref_rate`` times the orbital rate.  1.0 coasts
    from the true departure position, so the plane-change burn happens
    exactly on the node line.  0.0 freezes the reference at epoch, making
    the coast a constant of the orbit pair.  The default used by the
    mission layer, 1/3600, reproduces legacy schedules whose reference
    position advances at a per-second angular rate over hour-valued
    times.  The plane-change impulse is always evaluated on the node
    line; the phasing closure uses wherever the servicer actually is once
    the coast elapses.

    Writes columns 0..16 of ``out``; returns nothing.
    """
    omega = TWO_PI / t_geo
    h_s = plane_normal(inc_s, raan_s)
    h_t = plane_normal(inc_t, raan_t)
    alpha = math.acos(clamp_unit(_dot(h_s, h_t)))

    if alpha < COPLANAR_TOL:
        # Degenerate plane-change geometry: phasing-only transfer from the
        # current position.
        coast = 0.0
        rman = orbit_position(inc_s, raan_s, u_s0 + omega * t_dep, r_geo)
        plane_dv = np.zeros(3)
    else:
        c = _cross(h_s, h_t)
        cn = _norm(c)
        rm = np.empty(3)
        rm[0] = r_geo * c[0] / cn
        rm[1] = r_geo * c[1] / cn
        rm[2] = r_geo * c[2] / cn
        r_ref = orbit_position(inc_s, raan_s,
                               u_s0 + omega * t_dep * ref_rate, r_geo)
        d1 = prograde_angle(r_ref, rm, h_s)
        rm2 = -rm
        d2 = prograde_angle(r_ref, rm2, h_s)
        if d2 < d1:
            rm = rm2
            d1 = d2
        coast = d1 / omega
        # Plane-change impulse evaluated on the node line, where the two
        # circular velocities differ by 2 v sin(alpha/2).
        v_circ = math.sqrt(mu / r_geo)
        t_hat_s = _cross(h_s, rm)
        t_hat_t = _cross(h_t, rm)
        ns = _norm(t_hat_s)
        nt = _norm(t_hat_t)
        plane_dv = np.empty(3)
        for i in range(3):
            plane_dv[i] = v_circ * (t_hat_t[i] / nt - t_hat_s[i] / ns)
        rman = orbit_position(inc_s, raan_s,
                              u_s0 + omega * (t_dep + coast), r_geo)

    # Phase angle measured in the target plane at the plane-change epoch:
    # signed angle from the target's position to the maneuver point about
    # the target normal, so that after 2*pi*k + theta of target motion the
    # target is exactly at the maneuver point (rendezvous closure).
    rt = orbit_position(inc_t, raan_t, u_t0 + omega * (t_dep + coast),
                        r_geo)
    s = _dot(_cross(rt, rman), h_t)
    theta = math.atan2(s / (r_geo * r_geo), _dot(rt, rman) / (r_geo * r_geo))
    theta = wrap_pi(theta)

    t_phase = (TWO_PI * k + theta) / TWO_PI * t_geo
    a_phase = r_geo * ((TWO_PI * k + theta) / (TWO_PI * k)) ** (2.0 / 3.0)

    phase_dv = 2.0 * abs(
        math.sqrt(mu) * (math.sqrt(2.0 / r_geo - 1.0 / a_phase)
                         - math.sqrt(1.0 / r_geo)))

    # The phasing injection/capture impulses are applied along the source
    # orbit's velocity direction at the maneuver point (its magnitude is
    # set by the phasing ellipse; the direction predates the plane
    # rotation in the impulse bookkeeping).
    v_hat = _cross(h_s, rman)
    vn = _norm(v_hat)
    sgn = 0.0
    if theta > 0.0:
        sgn = 1.0
    elif theta < 0.0:
        sgn = -1.0

    imp1 = np.empty(3)
    imp2 = np.empty(3)
    for i in range(3):
        p1 = 0.5 * phase_dv * sgn * v_hat[i] / vn
        imp1[i] = plane_dv[i] + p1
        imp2[i] = -p1

    dv_total = (_norm(imp1) + _norm(imp2)) * 1000.0

    out[COL_COAST] = coast
    out[COL_THETA] = theta
    out[COL_TPHASE] = t_phase
    out[COL_APHASE] = a_phase
    out[COL_DV] = dv_total
    for i in range(3):
        out[COL_IMP1 + i] = imp1[i] * 1000.0
        out[COL_IMP2 + i] = imp2[i] * 1000.0
        out[COL_RM + i] = rman[i]
    out[COL_PLANE_DV] = _norm(plane_dv) * 1000.0
    out[COL_PHASE_DV] = phase_dv * 1000.0
    out[COL_ALPHA] = alpha


@njit(cache=True)
def route_schedule(inc0, raan0, u0, task_inc, task_raan, task_u0,
                   task_repair, order, rot, ref_rate,
                   mu, r_geo, t_geo, out):
    """Propagate one servicer route, chaining legs through repair stops.

    ``order`` holds task indices, ``rot`` the aligned rotation genes.  The
    servicer departs its own orbit at t=0 and stays co-orbital with each
    serviced satellite until the next departure; after a rendezvous its
    epoch anomaly coincides with the serviced satellite's.  Fills one
    LEG_COLS row per leg in ``out``.
    """
    ci = inc0
    cr = raan0
    cu = u0
    t = 0.0
    for j in range(order.shape[0]):
        tk = order[j]
        transfer_leg(ci, cr, cu, task_inc[tk], task_raan[tk], task_u0[tk],
                     t, rot[j], ref_rate, mu, r_geo, t_geo, out[j])
        t_arrive = t + out[j, COL_COAST] + out[j, COL_TPHASE]
        out[j, COL_DEPART] = t
        out[j, COL_ARRIVE] = t_arrive
        t = t_arrive + task_repair[tk]
        out[j, COL_END] = t
        ci = task_inc[tk]
        cr = task_raan[tk]
        cu = task_u0[tk]


@njit(cache=True)
def evaluate_genes(ssc_inc, ssc_raan, ssc_u0, task_inc, task_raan, task_u0,
                   task_repair, route, rot, splits, dv_max, t_max,
                   w_dv, w_t, lam, kappa, ref_rate, mu, r_geo, t_geo,
                   dv_out, end_out, scratch):
    """Fitness of one RPS chromosome: total dv plus team/infeasibility penalty.

    ``route`` is a permutation of task indices, ``rot`` the aligned
    rotation genes, ``splits`` the per-servicer block lengths.  Per-servicer
    route dv and final completion time are written into ``dv_out`` /
    ``end_out``; ``scratch`` is a reusable (N, LEG_COLS) work array.

    Returns (fitness, p_team, p_infeasible).
    """
    pos = 0
    total = 0.0
    p_sum = 0.0
    p_sq = 0.0
    for i in range(splits.shape[0]):
        n = splits[i]
        dv = 0.0
        end = 0.0
        if n > 0:
            route_schedule(ssc_inc[i], ssc_raan[i], ssc_u0[i],
                           task_inc, task_raan, task_u0, task_repair,
                           route[pos:pos + n], rot[pos:pos + n], ref_rate,
                           mu, r_geo, t_geo, scratch[:n])
            for j in range(n):
                dv += scratch[j, COL_DV]
            end = scratch[n - 1, COL_END]
        dv_out[i] = dv
        end_out[i] = end
        p_s = w_dv * max(0.0, dv - dv_max) + w_t * max(0.0, end - t_max)
        p_sum += p_s
        p_sq += p_s * p_s
        total += dv
        pos += n
    p_team = p_sum * p_sum + lam * p_sq
    p_inf = kappa if p_team != 0.0 else 0.0
    return total + p_team + p_inf, p_team, p_inf
