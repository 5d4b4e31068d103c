"""Shared fixtures: the 14-task case study scenario and its published plan.

The scenario here is typed in from the mission element table rather than
loaded through the package's own I/O, so it can serve as an independent
cross-check for the bundled YAML fixture.
"""

import numpy as np
import pytest

from oosplan.mission import Scenario, Servicer, Task
from oosplan.orbits import LEGACY_REF_RATE, OrbitalElements

GEO14_SERVICERS = [
    ("SSC1", 0.0, 0.0, 0.0),
    ("SSC2", 5.00, 0.00, 160.00),
]

# (inclination, raan, true anomaly) degrees, repair 20 h each
GEO14_TASKS = {
    1: (1.60, 66.76, 278.27),
    2: (0.30, 328.08, 156.03),
    3: (1.80, 45.11, 252.16),
    4: (7.77, 52.63, 328.00),
    5: (1.89, 52.10, 274.21),
    6: (1.06, 59.65, 144.68),
    7: (1.45, 67.40, 288.52),
    8: (1.86, 85.65, 319.30),
    9: (0.09, 103.25, 331.94),
    10: (5.00, 68.04, 285.07),
    11: (2.80, 83.11, 224.48),
    12: (4.81, 71.74, 337.75),
    13: (2.21, 74.98, 229.24),
    14: (0.99, 98.18, 230.86),
}

# published best plan: routes, rotations, and the reported schedule
BEST_PLAN = {
    "ssc1_order": [7, 1, 14, 5, 11, 13, 3, 6],
    "ssc1_rot": [2, 3, 3, 1, 3, 2, 2, 5],
    "ssc1_coast": [4.48, 4.28, 3.10, 3.41, 10.30, 10.69, 0.19, 5.75],
    "ssc1_phase": [48.14, 72.53, 72.87, 24.12, 73.05, 48.09, 48.33, 125.85],
    "ssc1_end": [72.62, 169.43, 265.40, 312.92, 416.28, 495.06, 563.58,
                 715.18],
    "ssc1_dv": [83.73, 23.27, 66.15, 83.07, 101.16, 41.94, 69.89, 116.89],
    "ssc1_total": 586.09,
    "ssc2_order": [2, 9, 8, 12, 10, 4],
    "ssc2_rot": [4, 5, 4, 2, 5, 4],
    "ssc2_coast": [1.46, 0.90, 0.56, 1.11, 9.27, 2.18],
    "ssc2_phase": [98.12, 122.92, 97.75, 47.57, 123.42, 93.91],
    "ssc2_end": [119.58, 263.41, 381.72, 450.40, 603.09, 719.19],
    "ssc2_dv": [279.83, 60.66, 118.28, 169.45, 67.97, 194.05],
    "ssc2_total": 890.23,
    "mission_total": 1476.32,
}

# published ablation plan (no route/rotation coordination), infeasible
ABLATION_PLAN = {
    "ssc1_order": [14, 5, 3, 13, 11, 10, 12, 4],
    "ssc1_rot": [3, 1, 3, 1, 1, 4, 5, 3],
    "ssc2_order": [6, 2, 9, 8, 7, 1],
    "ssc2_rot": [4, 5, 5, 3, 5, 2],
    "ssc2_end": 720.92,
}


def build_geo14() -> Scenario:
    servicers = [Servicer(i, name, OrbitalElements.from_degrees(*el))
                 for i, (name, *el) in enumerate(GEO14_SERVICERS)]
    tasks = [Task(tid, f"T{tid}", OrbitalElements.from_degrees(*el), 20.0)
             for tid, el in sorted(GEO14_TASKS.items())]
    # legacy coast-reference convention matches the published schedules
    return Scenario(servicers=servicers, tasks=tasks,
                    dv_max=1000.0, t_max=720.0,
                    coast_ref_rate=LEGACY_REF_RATE)


@pytest.fixture(scope="session")
def geo14() -> Scenario:
    return build_geo14()


@pytest.fixture(scope="session")
def best_plan_routes():
    return [(BEST_PLAN["ssc1_order"], BEST_PLAN["ssc1_rot"]),
            (BEST_PLAN["ssc2_order"], BEST_PLAN["ssc2_rot"])]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
