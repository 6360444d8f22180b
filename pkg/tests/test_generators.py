"""
Test the seeded point-set generators.
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest

from spanners.exceptions import BadInputFile, BadSpec
from spanners.generators import GENERATORS, GenKind, GenSpec, generate


def test_collinear():
    points = generate(GenSpec("collinear", n=3)).points
    assert points.tolist() == [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]


def test_grid_square():
    points = generate(GenSpec("grid", n=4)).points
    assert points.tolist() == [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]


def test_grid_truncates_the_last_row():
    points = generate(GenSpec("grid", n=5)).points
    assert points.shape == (5, 2)
    assert points.max() == 2.0
    assert len({tuple(p) for p in points.tolist()}) == 5


def test_grid_cube():
    points = generate(GenSpec("grid", n=8, dim=3)).points
    assert points.shape == (8, 3)
    assert set(points.ravel().tolist()) == {0.0, 1.0}


def test_circle():
    points = generate(GenSpec("circle", n=12, dim=3)).points
    assert np.allclose(np.linalg.norm(points, axis=1), 1.0)
    assert np.all(points[:, 2] == 0.0)


@pytest.mark.parametrize("kind", [k for k in GENERATORS])
def test_same_seed_same_points(kind):
    spec = GenSpec(kind, n=64, dim=3, seed=42)
    first = generate(spec).points
    second = generate(GenSpec(kind, n=64, dim=3, seed=42)).points
    assert first.shape == (64, 3)
    assert first.tobytes() == second.tobytes()


@pytest.mark.parametrize("kind", [GenKind.UNIFORM_CUBE, GenKind.CLUSTERED_GAUSSIAN])
def test_seed_changes_random_generators(kind):
    first = generate(GenSpec(kind, n=32, seed=1)).points
    second = generate(GenSpec(kind, n=32, seed=2)).points
    assert not np.array_equal(first, second)


def test_uniform_cube_range():
    points = generate(GenSpec("uniform-cube", n=200, dim=4, seed=-5)).points
    assert points.min() >= 0.0
    assert points.max() < 1.0


def test_explicit_file(tmp_path):
    path = tmp_path / "points.txt"
    path.write_text("# three points\n0 0\n1,0\n0 2\n")
    points = generate(GenSpec("explicit-file", path=path)).points
    assert points.tolist() == [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]


def test_explicit_file_missing(tmp_path):
    with pytest.raises(BadInputFile):
        generate(GenSpec("explicit-file", path=tmp_path / "nope.txt"))


def test_bad_specs():
    with pytest.raises(BadSpec):
        GenSpec("spiral", n=10)
    with pytest.raises(BadSpec):
        GenSpec("grid", n=1)
    with pytest.raises(BadSpec):
        GenSpec("grid", n=10, dim=0)
    with pytest.raises(BadSpec):
        GenSpec("circle", n=10, dim=1)
    with pytest.raises(BadSpec):
        GenSpec("explicit-file")
    with pytest.raises(BadSpec):
        GenSpec("uniform-cube", n=10, seed=2**64)


def test_label():
    assert GenSpec("grid", n=9, seed=3).label == "grid(n=9, dim=2, seed=3)"
