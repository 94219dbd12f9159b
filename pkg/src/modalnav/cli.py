"""Command-line front end for scenario runs, rendering, and path validation.

Exit codes: 0 on success, 1 when no path exists (or a path fails
validation), 2 on I/O or configuration errors.
"""

import argparse
import sys
from typing import Dict, List, Optional

from .costmap import ModalCostmap, generate_costmap
from .gridmap import HeightmapFormatError, load_grid_layer, load_heightmap
from .perception import compute_traversability
from .planner import NoPathError
from .postprocess import validate_path
from .scenario import (ScenarioConfigError, ScenarioStageError,
                       config_from_values, load_scenario_config, read_path_file,
                       render_costmap_ppm, run_scenario)

EXIT_OK = 0
EXIT_NO_PATH = 1
EXIT_ERROR = 2


def _parse_overrides(pairs: Optional[List[str]]) -> Dict[str, str]:
    overrides: Dict[str, str] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ScenarioConfigError(f"--set expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def _print_metrics(rows) -> None:
    print(f"{'agent':<8}{'energy_J':>12}{'time_s':>10}{'length_m':>11}{'morphs':>8}")
    for agent, m in rows:
        print(f"{agent:<8}{m.energy:>12.2f}{m.time:>10.2f}{m.length:>11.2f}"
              f"{m.morph_count:>8d}")


def _cmd_run(args, simulate: bool) -> int:
    config = load_scenario_config(args.config, _parse_overrides(args.set))
    result = run_scenario(config, simulate=simulate)
    n_wp = len(result.pruned_path.waypoints)
    print(f"{config.name}: {n_wp} waypoints, planner cost {result.pruned_path.total_g:.3f}")
    _print_metrics([("m4", result.m4_metrics), ("drone", result.drone_metrics)])
    for label, path in sorted(result.files.items()):
        print(f"  {label}: {path}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = load_scenario_config(args.config, _parse_overrides(args.set))
    result = run_scenario(config, simulate=False)
    _print_metrics([("m4", result.m4_metrics), ("drone", result.drone_metrics)])
    ratio = result.m4_metrics.energy / result.drone_metrics.energy
    print(f"energy ratio m4/drone: {ratio:.3f}")
    return EXIT_OK


def _cmd_render(args) -> int:
    meta, costs = load_grid_layer(args.costmap)
    costmap = ModalCostmap(meta, costs, costs.copy(), aerial_energy_ratio=args.le)
    path = read_path_file(args.path) if args.path else None
    render_costmap_ppm(costmap, path, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    overrides = _parse_overrides(args.set)
    values = {"heightmap": args.heightmap,
              "start_x": "0", "start_y": "0", "goal_x": "0", "goal_y": "0"}
    values.update(overrides)
    config = config_from_values(values)
    elev = load_heightmap(config.heightmap, variance_prior=config.variance_prior)
    trav = compute_traversability(elev, config.traversability)
    costmap = generate_costmap(elev, trav,
                               aerial_energy_ratio=config.energy_ratio,
                               inflation_radius=config.inflation_radius)
    path = read_path_file(args.path_file)
    problems = validate_path(path, costmap, elev, config.planner)
    if problems:
        for p in problems:
            print(p)
        return EXIT_NO_PATH
    print(f"{args.path_file}: {len(path.waypoints)} waypoints, all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modalnav",
        description="Multimodal ground/aerial path planning over 2.5D elevation grids")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_set(p):
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config value (repeatable)")

    p_plan = sub.add_parser("plan", help="plan a scenario and write path/report files")
    p_plan.add_argument("config")
    add_set(p_plan)

    p_sim = sub.add_parser("simulate", help="plan plus kinematic execution trace")
    p_sim.add_argument("config")
    add_set(p_sim)

    p_cmp = sub.add_parser("compare", help="compare plan energy against the drone baseline")
    p_cmp.add_argument("config")
    add_set(p_cmp)

    p_render = sub.add_parser("render", help="render a costmap (and optional path) to PPM")
    p_render.add_argument("costmap")
    p_render.add_argument("path", nargs="?", default=None)
    p_render.add_argument("out")
    p_render.add_argument("--le", type=float, default=60.0,
                          help="aerial energy ratio used for the color scale")

    p_val = sub.add_parser("validate", help="check a path file against a heightmap")
    p_val.add_argument("path_file")
    p_val.add_argument("heightmap")
    add_set(p_val)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plan":
            return _cmd_run(args, simulate=False)
        if args.command == "simulate":
            return _cmd_run(args, simulate=True)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "render":
            return _cmd_render(args)
        if args.command == "validate":
            return _cmd_validate(args)
        raise AssertionError(f"unhandled command {args.command}")
    except ScenarioStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, NoPathError):
            return EXIT_NO_PATH
        return EXIT_ERROR
    except NoPathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_PATH
    except (ScenarioConfigError, HeightmapFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
