import math

import numpy as np
import pytest

from conftest import dijkstra_cost, flat_scene, random_query, random_scene, wall_scene
from modalnav.gridmap import OutOfBoundsError, UnobservedCellError, world_to_grid
from modalnav.planner import (LocomotionMode, NoPathError, PlannerParams,
                              heuristic, neighbors, plan, step_cost)


class TestHeuristic:
    def test_three_four_five(self):
        assert heuristic((0, 0), (3, 4)) == 5.0

    def test_identity(self):
        assert heuristic((2.5, -1.0), (2.5, -1.0)) == 0.0

    def test_unit_diagonal(self):
        assert heuristic((0, 0), (1, 1)) == pytest.approx(1.41421356, abs=1e-8)


class TestStepCost:
    def test_ground_branch(self):
        elev, trav, cm = flat_scene(n=10, res=0.1, inflation=0)
        cm.cost_at[5, 6] = 0.2
        g, flag, z = step_cost((5, 5), (5, 6), cm, elev)
        assert g == pytest.approx(0.1 + 0.2, abs=1e-12)
        assert flag is LocomotionMode.GROUND
        assert z == 0.0

    def test_aerial_branch(self):
        elev, trav, cm = wall_scene(n=21, res=0.1)
        elev.height_at[9, :] = 0.0
        elev.height_at[10, :] = 1.5
        cm.cost_at[10, 5] = 60.02
        g, flag, z = step_cost((9, 5), (10, 5), cm, elev)
        # delta_e = round(1.5 / 0.1) = 15
        assert g == pytest.approx(0.1 + 60.02 * 15 + 60.02, abs=1e-9)
        assert flag is LocomotionMode.AERIAL
        assert z == pytest.approx(1.5 + 0.5)

    def test_zero_cost_terrain_is_pure_distance(self):
        elev, trav, cm = flat_scene(n=10, res=0.1, inflation=0)
        g, flag, _ = step_cost((3, 3), (4, 4), cm, elev)
        assert g == pytest.approx(0.1 * math.sqrt(2), abs=1e-12)
        assert flag is LocomotionMode.GROUND

    def test_unobserved_neighbor_raises(self):
        elev, trav, cm = flat_scene(n=10)
        elev.height_at[4, 4] = np.nan
        with pytest.raises(UnobservedCellError):
            step_cost((4, 3), (4, 4), cm, elev)

    def test_non_adjacent_cells_rejected(self):
        elev, trav, cm = flat_scene(n=10)
        with pytest.raises(ValueError):
            step_cost((0, 0), (0, 2), cm, elev)

    def test_increment_at_least_euclidean(self):
        elev, trav, cm, rng = random_scene(seed=5, n=15)
        params = PlannerParams()
        for _ in range(200):
            r, c = rng.integers(0, 15, 2)
            for nb in neighbors((r, c), cm, elev, params):
                g, _, _ = step_cost((r, c), nb, cm, elev, params)
                assert g >= heuristic((0, 0), (0.1 * (nb[0] - r), 0.1 * (nb[1] - c))) - 1e-12


class TestPlanFlat:
    def test_diagonal_across_flat_grid(self):
        elev, trav, cm = flat_scene(n=5, res=0.1, inflation=0)
        start = (-0.2, -0.2)  # cell (0, 0)
        goal = (0.2, 0.2)     # cell (4, 4)
        path = plan(cm, elev, start, goal, PlannerParams(goal_threshold=0.0))
        cells = [world_to_grid(w.xy, cm.meta) for w in path.waypoints]
        assert cells == [(i, i) for i in range(5)]
        assert all(w.flag is LocomotionMode.GROUND for w in path.waypoints)
        oracle = dijkstra_cost(cm, elev, start, goal, PlannerParams(goal_threshold=0.0))
        assert path.total_g == pytest.approx(oracle, abs=1e-9)
        assert path.total_g == pytest.approx(4 * 0.1 * math.sqrt(2), abs=1e-9)

    def test_start_equals_goal(self):
        elev, trav, cm = flat_scene(n=5)
        path = plan(cm, elev, (0.0, 0.0), (0.0, 0.0))
        assert len(path.waypoints) == 1
        assert path.total_g == 0.0

    def test_out_of_bounds_raises(self):
        elev, trav, cm = flat_scene(n=5)
        with pytest.raises(OutOfBoundsError):
            plan(cm, elev, (99.0, 0.0), (0.0, 0.0))
        with pytest.raises(OutOfBoundsError):
            plan(cm, elev, (0.0, 0.0), (99.0, 0.0))

    def test_start_on_aerial_cell_rejected(self):
        elev, trav, cm = wall_scene(n=21)
        start_on_wall = ((10 + 0.5) * 0.1 - 1.05, 0.0)
        with pytest.raises(ValueError):
            plan(cm, elev, start_on_wall, (0.9, 0.9))


class TestPlanWall:
    def test_flies_over_wall_with_clearance(self):
        elev, trav, cm = wall_scene(n=21, res=0.1, wall_height=1.5)
        start = (-0.8, 0.0)
        goal = (0.8, 0.0)
        params = PlannerParams(clearance=0.5)
        path = plan(cm, elev, start, goal, params)

        flags = [w.flag for w in path.waypoints]
        assert LocomotionMode.AERIAL in flags
        # contiguous single aerial run: G+ A+ G+
        runs = [flags[0]]
        for f in flags[1:]:
            if f is not runs[-1]:
                runs.append(f)
        assert runs == [LocomotionMode.GROUND, LocomotionMode.AERIAL,
                        LocomotionMode.GROUND]

        for w in path.waypoints:
            r, _ = world_to_grid(w.xy, cm.meta)
            if r == 10:  # directly over the wall
                assert w.flag is LocomotionMode.AERIAL
                assert w.z == pytest.approx(2.0, abs=1e-9)

        oracle = dijkstra_cost(cm, elev, start, goal, params)
        assert path.total_g == pytest.approx(oracle, abs=1e-9)

    def test_no_path_when_wall_impassable(self):
        elev, trav, cm = wall_scene(n=21)
        cm.cost_at[8:13, :] = math.inf
        with pytest.raises(NoPathError):
            plan(cm, elev, (-0.8, 0.0), (0.8, 0.0))

    def test_flag_consistency(self):
        elev, trav, cm = wall_scene(n=21)
        path = plan(cm, elev, (-0.8, 0.0), (0.8, 0.0))
        for w in path.waypoints:
            cell = world_to_grid(w.xy, cm.meta)
            aerial = cm.cost_at[cell] >= cm.aerial_energy_ratio
            assert (w.flag is LocomotionMode.AERIAL) == aerial

    def test_altitude_clears_footprint(self):
        from modalnav.gridmap import max_elevation_footprint
        elev, trav, cm = wall_scene(n=21)
        params = PlannerParams(clearance=0.5)
        path = plan(cm, elev, (-0.8, 0.0), (0.8, 0.0), params)
        for w in path.waypoints:
            if w.flag is LocomotionMode.AERIAL:
                cell = world_to_grid(w.xy, cm.meta)
                assert w.z >= max_elevation_footprint(elev, cell) + params.clearance - 1e-9


class TestPlanProperties:
    def test_oracle_equivalence_random_maps(self):
        params = PlannerParams()
        solved = 0
        for seed in range(20):
            elev, trav, cm, rng = random_scene(seed, n=20)
            query = random_query(cm, elev, rng)
            if query is None:
                continue
            start, goal = query
            oracle = dijkstra_cost(cm, elev, start, goal, params)
            if oracle is None:
                with pytest.raises(NoPathError):
                    plan(cm, elev, start, goal, params)
            else:
                path = plan(cm, elev, start, goal, params)
                assert path.total_g == pytest.approx(oracle, abs=1e-9)
                solved += 1
        assert solved >= 10  # the bias should make most maps solvable

    def test_deterministic(self):
        elev, trav, cm, rng = random_scene(seed=42, n=20)
        start, goal = random_query(cm, elev, rng)
        a = plan(cm, elev, start, goal)
        b = plan(cm, elev, start, goal)
        assert a.waypoints == b.waypoints
        assert a.total_g == b.total_g

    def test_connectivity_four(self):
        elev, trav, cm = flat_scene(n=5, res=0.1, inflation=0)
        params = PlannerParams(connectivity=4, goal_threshold=0.0)
        path = plan(cm, elev, (-0.2, -0.2), (0.2, 0.2), params)
        assert path.total_g == pytest.approx(8 * 0.1, abs=1e-9)
        oracle = dijkstra_cost(cm, elev, (-0.2, -0.2), (0.2, 0.2), params)
        assert path.total_g == pytest.approx(oracle, abs=1e-9)

    def test_goal_threshold_stops_early(self):
        elev, trav, cm = flat_scene(n=9, res=0.1, inflation=0)
        params = PlannerParams(goal_threshold=0.3)
        path = plan(cm, elev, (-0.4, 0.0), (0.4, 0.0), params)
        end = path.waypoints[-1]
        assert heuristic(end.xy, (0.4, 0.0)) <= 0.3 + 1e-9

    def test_neighbors_exclude_corner_cuts(self):
        elev, trav, cm = flat_scene(n=3, res=0.1, inflation=0)
        cm.cost_at[0, 1] = 60.0
        cm.cost_at[1, 0] = 60.0
        nbrs = list(neighbors((0, 0), cm, elev))
        assert (1, 1) not in nbrs
        cm.cost_at[1, 0] = 0.0
        nbrs = list(neighbors((0, 0), cm, elev))
        assert (1, 1) not in nbrs  # one blocked corner is enough
        cm.cost_at[0, 1] = 0.0
        nbrs = list(neighbors((0, 0), cm, elev))
        assert (1, 1) in nbrs
