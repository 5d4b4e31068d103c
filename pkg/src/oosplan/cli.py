"""Command line front end: solve, batch, evaluate, transfer, improve.

Exit codes: 0 success, 2 parse error (bad file syntax or arguments),
3 schema error, 4 solver failure, 5 I/O error.
"""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import io as oio
from . import lns as olns
from .ga import GaConfig, GaResult, run as ga_run
from .mission import (DuplicateTask, Evaluator, MissingTask, Scenario,
                      evaluate)
from .orbits import CoplanarOrbits, transfer
from .rps import RpsChromosome, decode

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SCHEMA = 3
EXIT_SOLVER = 4
EXIT_IO = 5

DEFAULT_SCENARIO = Path(__file__).parent / "data" / "scenario_geo14.yaml"


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", default=str(DEFAULT_SCENARIO),
                   help="scenario YAML (default: bundled geo14 case)")
    p.add_argument("--config", default=None,
                   help="solver config YAML; CLI flags override it")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output file path")
    p.add_argument("--format", choices=["full", "paper"], default="full",
                   help="plan serialization detail")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="oosplan",
        description="Multi-servicer GEO servicing mission planner")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run the GA+LNS solver once")
    _add_common(s)
    s.add_argument("--trace", default=None,
                   help="write per-generation CSV trace here")
    s.add_argument("--pop-size", type=int, default=None)
    s.add_argument("--min-generations", type=int, default=None)
    s.add_argument("--max-generations", type=int, default=None)
    s.add_argument("--kappa", type=float, default=None)
    s.add_argument("--no-lns", action="store_true")

    b = sub.add_parser("batch", help="run the solver over several seeds")
    _add_common(b)
    b.add_argument("--runs", type=int, default=10)
    b.add_argument("--out-dir", default=None,
                   help="write one plan JSON per run into this directory")

    e = sub.add_parser("evaluate", help="re-propagate a saved plan")
    _add_common(e)
    e.add_argument("--plan", required=True, help="plan JSON to evaluate")

    t = sub.add_parser("transfer", help="price one transfer leg")
    _add_common(t)
    t.add_argument("--source", required=True,
                   help="S<id> for a servicer or T<id> for a task")
    t.add_argument("--target", required=True, help="T<id> target task")
    t.add_argument("--depart-time", type=float, default=0.0)
    t.add_argument("--rotations", type=int, default=1)

    i = sub.add_parser("improve", help="LNS-polish a saved plan")
    _add_common(i)
    i.add_argument("--plan", required=True, help="plan JSON to improve")
    i.add_argument("--iterations", type=int, default=None)
    return p


def _config_from_args(args) -> GaConfig:
    file_layer = oio.load_config(args.config) if args.config else {}
    cli_layer = {"seed": args.seed}
    for flag in ("pop_size", "min_generations", "max_generations", "kappa"):
        if hasattr(args, flag):
            cli_layer[flag] = getattr(args, flag)
    if getattr(args, "no_lns", False):
        cli_layer["lns_enabled"] = False
    return oio.build_config(file_layer, cli_layer)


def _plan_from_result(res: GaResult, scenario: Scenario, cfg: GaConfig):
    routes = decode(res.best, scenario)
    return evaluate(routes, scenario, lam=cfg.lam, kappa=cfg.kappa,
                    w_dv=cfg.w_dv, w_t=cfg.w_t)


def _print_summary(tag: str, plan) -> None:
    print(f"{tag}: fitness={plan.fitness:.2f} dv={plan.total_dv:.2f} m/s "
          f"completion={plan.final_completion:.2f} h "
          f"feasible={plan.feasible}")
    for r in plan.routes:
        order = " ".join(f"T{l.task_id}" for l in r.legs) or "(idle)"
        print(f"  servicer {r.servicer_id}: dv={r.total_dv:.2f} "
              f"end={r.final_completion:.2f}  {order}")


def cmd_solve(args) -> int:
    scenario = oio.load_scenario(args.scenario)
    cfg = _config_from_args(args)
    res = ga_run(scenario, cfg)
    plan = _plan_from_result(res, scenario, cfg)
    _print_summary("solve", plan)
    print(f"  generations={res.generations} evals={res.n_evals}")
    meta = {"seed": cfg.seed, "generations": res.generations,
            "n_evals": res.n_evals}
    if args.out:
        oio.save_plan(plan, scenario, args.out, args.format, meta)
    if args.trace:
        oio.write_trace(res.history, args.trace)
    return EXIT_OK


def cmd_batch(args) -> int:
    scenario = oio.load_scenario(args.scenario)
    file_layer = oio.load_config(args.config) if args.config else {}
    base_seed = args.seed if args.seed is not None else 0
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    best_plan = None
    for i in range(args.runs):
        cfg = oio.build_config(file_layer, {"seed": base_seed + i})
        res = ga_run(scenario, cfg)
        plan = _plan_from_result(res, scenario, cfg)
        print(f"run {i} (seed {base_seed + i}): "
              f"fitness={plan.fitness:.2f} feasible={plan.feasible} "
              f"generations={res.generations}")
        rows.append({"run": i, "seed": base_seed + i,
                     "fitness": plan.fitness, "total_dv": plan.total_dv,
                     "final_completion": plan.final_completion,
                     "feasible": plan.feasible,
                     "generations": res.generations})
        if best_plan is None or plan.fitness < best_plan.fitness:
            best_plan = plan
        if out_dir:
            oio.save_plan(plan, scenario,
                          out_dir / f"plan_seed{base_seed + i}.json",
                          args.format, {"seed": base_seed + i})
    best = min(rows, key=lambda r: r["fitness"])
    fits = np.array([r["fitness"] for r in rows])
    hist_counts, hist_edges = np.histogram(fits, bins=min(10, len(rows)))
    aggregate = {
        "min": float(fits.min()), "mean": float(fits.mean()),
        "max": float(fits.max()), "std": float(fits.std()),
        "feasibility_rate": sum(r["feasible"] for r in rows) / len(rows),
        "histogram": {"counts": hist_counts.tolist(),
                      "edges": hist_edges.tolist()},
    }
    print(f"best: seed {best['seed']} fitness={best['fitness']:.2f} "
          f"(feasible {aggregate['feasibility_rate']:.0%})")
    if args.out:
        Path(args.out).write_text(json.dumps(
            {"runs": rows, "best_seed": best["seed"],
             "best_fitness": best["fitness"],
             "aggregate": aggregate}, indent=2) + "\n")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    scenario = oio.load_scenario(args.scenario)
    plan = oio.evaluate_plan_file(args.plan, scenario)
    _print_summary("evaluate", plan)
    if args.out:
        oio.save_plan(plan, scenario, args.out, args.format)
    return EXIT_OK


def _resolve_orbit(scenario: Scenario, spec: str):
    try:
        ident = int(spec[1:])
    except (ValueError, IndexError):
        raise oio.SchemaError(f"bad body spec {spec!r}; use S<id> or T<id>")
    if spec[0].upper() == "S":
        for s in scenario.servicers:
            if s.id == ident:
                return s.orbit, s.name
    elif spec[0].upper() == "T":
        for t in scenario.tasks:
            if t.id == ident:
                return t.orbit, t.name
    raise oio.SchemaError(f"no such body {spec!r} in scenario")


def cmd_transfer(args) -> int:
    scenario = oio.load_scenario(args.scenario)
    src, src_name = _resolve_orbit(scenario, args.source)
    tgt, tgt_name = _resolve_orbit(scenario, args.target)
    leg = transfer(src, tgt, depart_time=args.depart_time,
                   k=args.rotations, constants=scenario.constants,
                   ref_rate=scenario.coast_ref_rate)
    doc = {"source": src_name, "target": tgt_name,
           "departure_time": leg.departure_time,
           "coast_time": leg.coast_time,
           "phase_angle_deg": math.degrees(leg.phase_angle),
           "rotations": leg.rotations,
           "phasing_time": leg.phasing_time,
           "phasing_sma": leg.phasing_sma,
           "arrival_time": leg.arrival_time,
           "plane_change_dv": leg.plane_change_dv,
           "phasing_dv": leg.phasing_dv,
           "dv_total": leg.dv_total,
           "impulse_1": list(map(float, leg.impulse_1)),
           "impulse_2": list(map(float, leg.impulse_2))}
    text = json.dumps(doc, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return EXIT_OK


def cmd_improve(args) -> int:
    scenario = oio.load_scenario(args.scenario)
    cfg = _config_from_args(args)
    if args.iterations is not None:
        cfg.lns.iterations = args.iterations
    pairs = oio.load_plan_routes(args.plan)
    if len(pairs) != scenario.n_servicers:
        raise oio.SchemaError("plan servicer count does not match scenario")
    index_of = scenario.packed().index_of
    try:
        route = np.array([index_of[t] for order, _ in pairs for t in order],
                         np.int64)
    except KeyError as e:
        raise oio.SchemaError(f"plan references unknown task {e}")
    rot = np.array([k for _, rots in pairs for k in rots], np.int64)
    splits = np.array([len(order) for order, _ in pairs], np.int64)
    chrom = RpsChromosome(route, rot, splits)
    ev = Evaluator(scenario, lam=cfg.lam, kappa=cfg.kappa,
                   w_dv=cfg.w_dv, w_t=cfg.w_t)
    f0, _ = ev.fitness(chrom.route, chrom.rotations, chrom.splits)
    rng = np.random.default_rng(cfg.seed)
    best, f = olns.lns_improve(chrom, f0, ev, scenario.rotation_max, rng,
                               cfg.lns)
    plan = evaluate(decode(best, scenario), scenario, lam=cfg.lam,
                    kappa=cfg.kappa, w_dv=cfg.w_dv, w_t=cfg.w_t)
    print(f"improve: {f0:.2f} -> {plan.fitness:.2f}")
    _print_summary("improved", plan)
    if args.out:
        oio.save_plan(plan, scenario, args.out, args.format)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "batch": cmd_batch,
            "evaluate": cmd_evaluate, "transfer": cmd_transfer,
            "improve": cmd_improve}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except oio.ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (oio.SchemaError, DuplicateTask, MissingTask) as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except (CoplanarOrbits, ValueError, ArithmeticError) as e:
        print(f"solver error: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
