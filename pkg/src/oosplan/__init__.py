"""Multi-servicer GEO on-orbit servicing mission planner.

Joint optimization of task sequencing, integer phasing rotations and
route partitioning for a fleet of circular-GEO servicing spacecraft,
via an adaptive genetic algorithm with large neighborhood search.
"""

from .accel import USING_NUMBA
from .constants import GEO, GEO_SOLAR, PhysicalConstants
from .orbits import (DEFAULT_REF_RATE, LEGACY_REF_RATE,
                     CoplanarOrbits, NonPositivePhasingTime, OrbitalElements,
                     PointOffOrbit, TransferLeg, angular_momentum_dir,
                     angular_separation, coast_time, intersection_points,
                     phase_angle, phasing_dv, phasing_sma, phasing_time,
                     position_at, transfer, velocity_at_position)
from .mission import (DuplicateTask, Evaluator, MissingTask, MissionPlan,
                      PenaltyBreakdown, RouteSchedule, Scenario,
                      ScheduledLeg, Servicer, Task, check_feasible,
                      evaluate, propagate_route)
from .rps import (InvalidChromosome, RpsChromosome, decode,
                  random_chromosome, repair, repair_rotations,
                  repair_splits, repair_uniqueness, validate)
from .ga import GaConfig, GaResult, GenerationTrace, run
from .lns import LnsConfig, PartialPlan, destroy, lns_improve, regret_repair
from .io import (ParseError, SchemaError, build_config, load_config,
                 load_plan_routes, load_scenario, save_plan, save_scenario,
                 write_trace)

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA", "GEO", "GEO_SOLAR", "PhysicalConstants",
    "DEFAULT_REF_RATE", "LEGACY_REF_RATE",
    "CoplanarOrbits", "NonPositivePhasingTime", "OrbitalElements",
    "PointOffOrbit", "TransferLeg", "angular_momentum_dir",
    "angular_separation", "coast_time", "intersection_points",
    "phase_angle", "phasing_dv", "phasing_sma", "phasing_time",
    "position_at", "transfer", "velocity_at_position",
    "DuplicateTask", "Evaluator", "MissingTask", "MissionPlan",
    "PenaltyBreakdown", "RouteSchedule", "Scenario", "ScheduledLeg",
    "Servicer", "Task", "check_feasible", "evaluate", "propagate_route",
    "InvalidChromosome", "RpsChromosome", "decode", "random_chromosome",
    "repair", "repair_rotations", "repair_splits", "repair_uniqueness",
    "validate",
    "GaConfig", "GaResult", "GenerationTrace", "run",
    "LnsConfig", "PartialPlan", "destroy", "lns_improve", "regret_repair",
    "ParseError", "SchemaError", "build_config", "load_config",
    "load_plan_routes", "load_scenario", "save_plan", "save_scenario",
    "write_trace",
]
