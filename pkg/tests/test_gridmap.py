import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modalnav.gridmap import (ElevationGrid, GridMeta, HeightmapFormatError,
                              OutOfBoundsError, UnobservedCellError,
                              footprint_max_field, grid_to_world,
                              load_grid_layer, load_heightmap,
                              max_elevation_footprint, save_grid_layer,
                              save_heightmap, world_to_grid)

META = GridMeta(0.1, 20.0, 20.0, (0.0, 0.0))


class TestGridMeta:
    def test_shape_follows_extent(self):
        assert META.rows == 200
        assert META.cols == 200
        assert META.shape == (200, 200)

    def test_from_shape_round_trips(self):
        meta = GridMeta.from_shape(30, 40, 0.25)
        assert meta.rows == 30
        assert meta.cols == 40
        assert meta.height == pytest.approx(7.5)
        assert meta.width == pytest.approx(10.0)

    def test_rejects_bad_resolution(self):
        with pytest.raises(ValueError):
            GridMeta(0.0, 10.0, 10.0)
        with pytest.raises(ValueError):
            GridMeta(-0.1, 10.0, 10.0)


class TestWorldToGrid:
    def test_reference_point(self):
        assert world_to_grid((1.0, 2.0), META) == (110, 120)

    def test_map_corner_is_first_cell(self):
        assert world_to_grid((-10.0, -10.0), META) == (0, 0)

    def test_outside_extent_raises(self):
        with pytest.raises(OutOfBoundsError):
            world_to_grid((15.0, 0.0), META)
        with pytest.raises(OutOfBoundsError):
            world_to_grid((0.0, 10.0), META)  # max edge is exclusive

    def test_origin_shifts_frame(self):
        meta = GridMeta(0.1, 20.0, 20.0, (1.0, -2.0))
        r, c = world_to_grid((0.0, 0.0), meta)
        assert (r, c) == (110, 80)


class TestGridToWorld:
    def test_cell_center(self):
        x, y = grid_to_world((110, 120), META)
        assert x == pytest.approx(1.05, abs=1e-9)
        assert y == pytest.approx(2.05, abs=1e-9)

    def test_first_cell_center(self):
        assert grid_to_world((0, 0), META) == pytest.approx((-9.95, -9.95))

    def test_invalid_index_raises(self):
        with pytest.raises(OutOfBoundsError):
            grid_to_world((200, 0), META)
        with pytest.raises(OutOfBoundsError):
            grid_to_world((0, -1), META)

    def test_round_trip_all_cells_small_grid(self):
        meta = GridMeta.from_shape(5, 5, 0.2, (0.3, -0.7))
        for r in range(5):
            for c in range(5):
                assert world_to_grid(grid_to_world((r, c), meta), meta) == (r, c)

    @given(st.floats(-9.999, 9.999), st.floats(-9.999, 9.999))
    @settings(max_examples=200)
    def test_round_trip_position_stays_within_half_cell(self, x, y):
        r, c = world_to_grid((x, y), META)
        cx, cy = grid_to_world((r, c), META)
        half = META.resolution / 2 + 1e-7
        assert abs(cx - x) <= half
        assert abs(cy - y) <= half


class TestFootprintMax:
    def _grid(self, heights):
        arr = np.asarray(heights, dtype=float)
        meta = GridMeta.from_shape(*arr.shape, resolution=0.1)
        return ElevationGrid.from_heights(meta, arr)

    def test_max_of_block(self):
        grid = self._grid([[1.0, 2.5, 0.0], [0.3, 2.4, 0.0], [0.0, 0.0, 0.0]])
        assert max_elevation_footprint(grid, (0, 0)) == 2.5

    def test_uniform_block(self):
        grid = self._grid(np.zeros((3, 3)))
        assert max_elevation_footprint(grid, (1, 1)) == 0.0

    def test_corner_clamps_to_in_bounds(self):
        grid = self._grid([[0.0, 0.0], [0.0, 0.8]])
        # anchor at the far corner: only itself and its one in-bounds diagonal
        grid.height_at[1, 1] = 0.8
        grid.height_at[1, 0] = 1.2
        assert max_elevation_footprint(grid, (1, 0)) == 1.2
        assert max_elevation_footprint(grid, (1, 1)) == 0.8

    def test_all_unobserved_raises(self):
        grid = self._grid(np.zeros((3, 3)))
        grid.height_at[:2, :2] = np.nan
        with pytest.raises(UnobservedCellError):
            max_elevation_footprint(grid, (0, 0))

    def test_partial_observation_uses_observed_cells(self):
        grid = self._grid(np.zeros((3, 3)))
        grid.height_at[0, 1] = np.nan
        grid.height_at[1, 1] = 0.7
        assert max_elevation_footprint(grid, (0, 0)) == 0.7

    def test_footprint_at_least_own_height(self):
        rng = np.random.default_rng(3)
        grid = self._grid(rng.uniform(0, 2, (8, 8)))
        for r in range(8):
            for c in range(8):
                assert max_elevation_footprint(grid, (r, c)) >= grid.height_at[r, c]

    def test_field_matches_scalar_op(self):
        rng = np.random.default_rng(4)
        grid = self._grid(rng.uniform(0, 2, (6, 6)))
        grid.height_at[2, 3] = np.nan
        field = footprint_max_field(grid)
        for r in range(6):
            for c in range(6):
                assert field[r, c] == max_elevation_footprint(grid, (r, c))


class TestHeightmapIO:
    def test_flat_file(self, tmp_path):
        p = tmp_path / "flat.txt"
        p.write_text("3 3 0.500000 0.000000 0.000000\n"
                     + "\n".join(["0.000000 0.000000 0.000000"] * 3) + "\n")
        grid = load_heightmap(p)
        assert grid.meta.shape == (3, 3)
        assert np.all(grid.height_at == 0.0)
        assert np.all(grid.variance_at > 0.0)

    def test_row_count_mismatch(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("2 2 0.5 0.0 0.0\n0 0\n0 0\n0 0\n")
        with pytest.raises(HeightmapFormatError):
            load_heightmap(p)

    def test_column_count_mismatch_reports_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("2 2 0.5 0.0 0.0\n0 0\n0 0 0\n")
        with pytest.raises(HeightmapFormatError) as err:
            load_heightmap(p)
        assert err.value.line == 3

    def test_non_numeric_cell_reports_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("2 2 0.5 0.0 0.0\n0 x\n0 0\n")
        with pytest.raises(HeightmapFormatError) as err:
            load_heightmap(p)
        assert err.value.line == 2

    def test_bad_header(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("2 2 0.5\n0 0\n0 0\n")
        with pytest.raises(HeightmapFormatError) as err:
            load_heightmap(p)
        assert err.value.line == 1

    def test_step_fixture_reads_back(self, tmp_path):
        from modalnav.terrains import step_terrain
        grid = step_terrain()
        p = tmp_path / "step.txt"
        save_heightmap(grid, p)
        loaded = load_heightmap(p)
        assert loaded.height_at.max() == 1.5
        assert np.array_equal(loaded.height_at, grid.height_at)

    def test_nan_round_trips_as_unobserved(self, tmp_path):
        meta = GridMeta.from_shape(2, 2, 0.5)
        grid = ElevationGrid.from_heights(meta, [[0.0, np.nan], [1.25, 0.5]])
        p = tmp_path / "g.txt"
        save_heightmap(grid, p)
        loaded = load_heightmap(p)
        assert np.isnan(loaded.height_at[0, 1])
        assert np.isnan(loaded.variance_at[0, 1])
        assert loaded.height_at[1, 0] == 1.25

    def test_serialization_byte_identical(self, tmp_path):
        rng = np.random.default_rng(7)
        meta = GridMeta.from_shape(4, 6, 0.25, (1.0, -0.5))
        values = np.round(rng.uniform(-2, 2, (4, 6)), 6)
        values[1, 2] = np.nan
        first = tmp_path / "a.txt"
        save_grid_layer(meta, values, first)
        loaded_meta, loaded = load_grid_layer(first)
        second = tmp_path / "b.txt"
        save_grid_layer(loaded_meta, loaded, second)
        assert first.read_bytes() == second.read_bytes()
