"""Scenario/config loading and plan/trace serialization.

Scenarios and solver configs are YAML (angles in degrees on disk, radians
in memory).  Plans are JSON, traces are CSV.  Parse failures raise
ParseError, structurally invalid documents raise SchemaError, so the CLI
can map them to distinct exit codes.
"""

import csv
import dataclasses
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from .constants import GEO, PhysicalConstants
from .ga import GaConfig, GenerationTrace
from .lns import LnsConfig
from .mission import (MissionPlan, Scenario, Servicer, Task, evaluate)
from .orbits import DEFAULT_REF_RATE, OrbitalElements

PathLike = Union[str, Path]


class ParseError(ValueError):
    """The file is not syntactically valid YAML/JSON/CSV."""


class SchemaError(ValueError):
    """The document parsed but does not match the expected structure."""


def _require(mapping: Dict[str, Any], key: str, ctx: str) -> Any:
    if not isinstance(mapping, dict) or key not in mapping:
        raise SchemaError(f"{ctx}: missing required key {key!r}")
    return mapping[key]


def _elements_from_dict(d: Dict[str, Any], ctx: str) -> OrbitalElements:
    try:
        return OrbitalElements.from_degrees(
            float(_require(d, "inclination_deg", ctx)),
            float(_require(d, "raan_deg", ctx)),
            float(_require(d, "true_anomaly_deg", ctx)))
    except (TypeError, ValueError) as e:
        if isinstance(e, SchemaError):
            raise
        raise SchemaError(f"{ctx}: bad orbital elements: {e}")


def _elements_to_dict(e: OrbitalElements) -> Dict[str, float]:
    import math
    return {"inclination_deg": math.degrees(e.inclination),
            "raan_deg": math.degrees(e.raan),
            "true_anomaly_deg": math.degrees(e.true_anomaly_at_epoch)}


def load_scenario(path: PathLike) -> Scenario:
    """Read a YAML scenario file into a Scenario."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise OSError(f"cannot read scenario {path}: {e}")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ParseError(f"{path}: invalid YAML: {e}")
    return scenario_from_dict(doc, str(path))


def scenario_from_dict(doc: Any, ctx: str = "scenario") -> Scenario:
    if not isinstance(doc, dict):
        raise SchemaError(f"{ctx}: top level must be a mapping")
    cdoc = doc.get("constants", {})
    if not isinstance(cdoc, dict):
        raise SchemaError(f"{ctx}: constants must be a mapping")
    constants = PhysicalConstants(
        mu=float(cdoc.get("mu", GEO.mu)),
        r_geo=float(cdoc.get("r_geo", GEO.r_geo)),
        t_geo=float(cdoc.get("t_geo", GEO.t_geo)))
    budgets = _require(doc, "budgets", ctx)
    servicers = []
    for i, sd in enumerate(_require(doc, "servicers", ctx)):
        sctx = f"{ctx}.servicers[{i}]"
        servicers.append(Servicer(
            id=int(_require(sd, "id", sctx)),
            name=str(sd.get("name", f"SSC{i + 1}")),
            orbit=_elements_from_dict(_require(sd, "elements", sctx), sctx)))
    tasks = []
    for i, td in enumerate(_require(doc, "tasks", ctx)):
        tctx = f"{ctx}.tasks[{i}]"
        tasks.append(Task(
            id=int(_require(td, "id", tctx)),
            name=str(td.get("name", f"T{i + 1}")),
            orbit=_elements_from_dict(_require(td, "elements", tctx), tctx),
            repair_duration=float(_require(td, "repair_duration", tctx))))
    try:
        return Scenario(
            servicers=servicers, tasks=tasks,
            dv_max=float(_require(budgets, "dv_max", f"{ctx}.budgets")),
            t_max=float(_require(budgets, "t_max", f"{ctx}.budgets")),
            constants=constants,
            rotation_max=int(doc.get("rotation_max", 5)),
            coast_ref_rate=float(doc.get("coast_ref_rate",
                                         DEFAULT_REF_RATE)))
    except ValueError as e:
        raise SchemaError(f"{ctx}: {e}")


def scenario_to_dict(scenario: Scenario, name: str = "scenario",
                     ) -> Dict[str, Any]:
    return {
        "name": name,
        "constants": {"mu": scenario.constants.mu,
                      "r_geo": scenario.constants.r_geo,
                      "t_geo": scenario.constants.t_geo},
        "budgets": {"dv_max": scenario.dv_max, "t_max": scenario.t_max},
        "rotation_max": scenario.rotation_max,
        "coast_ref_rate": scenario.coast_ref_rate,
        "servicers": [{"id": s.id, "name": s.name,
                       "elements": _elements_to_dict(s.orbit)}
                      for s in scenario.servicers],
        "tasks": [{"id": t.id, "name": t.name,
                   "elements": _elements_to_dict(t.orbit),
                   "repair_duration": t.repair_duration}
                  for t in scenario.tasks],
    }


def save_scenario(scenario: Scenario, path: PathLike,
                  name: str = "scenario") -> None:
    Path(path).write_text(yaml.safe_dump(scenario_to_dict(scenario, name),
                                         sort_keys=False))


_CONFIG_KEYS = {f.name for f in dataclasses.fields(GaConfig)} - {"lns"}
_LNS_KEYS = {f.name for f in dataclasses.fields(LnsConfig)}


def load_config(path: PathLike) -> Dict[str, Any]:
    """Read a YAML solver config into a flat override dict."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise OSError(f"cannot read config {path}: {e}")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ParseError(f"{path}: invalid YAML: {e}")
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: config must be a mapping")
    for key in doc:
        if key == "lns":
            for lk in doc["lns"] or {}:
                if lk not in _LNS_KEYS:
                    raise SchemaError(f"{path}: unknown lns option {lk!r}")
        elif key not in _CONFIG_KEYS:
            raise SchemaError(f"{path}: unknown config option {key!r}")
    return doc


def build_config(*layers: Optional[Dict[str, Any]]) -> GaConfig:
    """Merge override dicts over the built-in defaults, later layers win."""
    merged: Dict[str, Any] = {}
    lns: Dict[str, Any] = {}
    for layer in layers:
        if not layer:
            continue
        for k, v in layer.items():
            if v is None:
                continue
            if k == "lns":
                lns.update(v)
            else:
                merged[k] = v
    try:
        return GaConfig(lns=LnsConfig(**lns), **merged)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"invalid solver config: {e}")


def plan_to_dict(plan: MissionPlan, scenario: Scenario,
                 fmt: str = "full",
                 meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Serialize an evaluated plan.

    ``full`` keeps every impulse vector and penalty term; ``paper`` keeps
    only the per-leg summary columns of a results table.
    """
    if fmt not in ("full", "paper"):
        raise ValueError(f"unknown plan format {fmt!r}")
    doc: Dict[str, Any] = {
        "format": fmt,
        "fitness": plan.fitness,
        "feasible": plan.feasible,
        "total_dv": plan.total_dv,
        "final_completion": plan.final_completion,
        "routes": [],
    }
    if meta:
        doc["meta"] = meta
    by_id = {s.id: s for s in scenario.servicers}
    for r in plan.routes:
        route_doc: Dict[str, Any] = {
            "servicer_id": r.servicer_id,
            "servicer_name": by_id[r.servicer_id].name,
            "task_order": [l.task_id for l in r.legs],
            "rotations": [l.leg.rotations for l in r.legs],
            "total_dv": r.total_dv,
            "final_completion": r.final_completion,
        }
        legs = []
        for l in r.legs:
            leg_doc = {"task_id": l.task_id,
                       "rotations": l.leg.rotations,
                       "coast_time": l.leg.coast_time,
                       "phasing_time": l.leg.phasing_time,
                       "completion_time": l.completion_time,
                       "dv": l.leg.dv_total}
            if fmt == "full":
                leg_doc.update({
                    "departure_time": l.leg.departure_time,
                    "arrive_time": l.arrive_time,
                    "phase_angle": l.leg.phase_angle,
                    "phasing_sma": l.leg.phasing_sma,
                    "plane_change_dv": l.leg.plane_change_dv,
                    "phasing_dv": l.leg.phasing_dv,
                    "plane_separation": l.leg.plane_separation,
                    "impulse_1": list(map(float, l.leg.impulse_1)),
                    "impulse_2": list(map(float, l.leg.impulse_2)),
                    "maneuver_point": list(map(float, l.leg.maneuver_point)),
                })
            legs.append(leg_doc)
        route_doc["legs"] = legs
        doc["routes"].append(route_doc)
    if fmt == "full":
        doc["penalty"] = {
            "per_servicer": [{"p_dv": a, "p_t": b, "p_s": c}
                             for a, b, c in plan.penalty.per_servicer],
            "p_team": plan.penalty.p_team,
            "p_infeasible": plan.penalty.p_infeasible,
            "lam": plan.penalty.lam,
            "kappa": plan.penalty.kappa,
        }
    return doc


def save_plan(plan: MissionPlan, scenario: Scenario, path: PathLike,
              fmt: str = "full",
              meta: Optional[Dict[str, Any]] = None) -> None:
    Path(path).write_text(
        json.dumps(plan_to_dict(plan, scenario, fmt, meta), indent=2)
        + "\n")


def load_plan_routes(path: PathLike) -> List:
    """Read a plan JSON back into (task_order, rotations) route pairs."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise OSError(f"cannot read plan {path}: {e}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON: {e}")
    if not isinstance(doc, dict) or "routes" not in doc:
        raise SchemaError(f"{path}: plan must be a mapping with 'routes'")
    pairs = []
    for i, r in enumerate(doc["routes"]):
        order = _require(r, "task_order", f"{path}: routes[{i}]")
        rot = _require(r, "rotations", f"{path}: routes[{i}]")
        if len(order) != len(rot):
            raise SchemaError(f"{path}: routes[{i}]: task_order and "
                              "rotations lengths differ")
        pairs.append(([int(t) for t in order], [int(k) for k in rot]))
    return pairs


def evaluate_plan_file(path: PathLike, scenario: Scenario,
                       **kwargs) -> MissionPlan:
    """Load a plan file and re-propagate it against a scenario."""
    return evaluate(load_plan_routes(path), scenario, **kwargs)


TRACE_FIELDS = ["generation", "best_fitness", "mean_fitness",
                "worst_fitness", "best_feasible", "feasible_count",
                "pc_mean", "pm_mean", "injected", "lns_improved"]


def write_trace(history: List[GenerationTrace], path: PathLike) -> None:
    """Write per-generation convergence data as CSV (plot-ready columns)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_FIELDS)
        for t in history:
            w.writerow([t.generation, t.best_fitness, t.mean_fitness,
                        t.worst_fitness, int(t.best_feasible),
                        t.feasible_count, t.pc_mean, t.pm_mean,
                        int(t.injected), int(t.lns_improved)])


def read_trace(path: PathLike) -> List[Dict[str, float]]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != TRACE_FIELDS:
                raise SchemaError(f"{path}: unexpected trace header "
                                  f"{reader.fieldnames}")
            return [{k: float(v) for k, v in row.items()}
                    for row in reader]
    except csv.Error as e:
        raise ParseError(f"{path}: invalid CSV: {e}")
