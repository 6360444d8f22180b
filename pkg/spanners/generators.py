"""
Seeded point-set generators.

Every generator is a pure function of its GenSpec: the same spec yields
byte-identical coordinates.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

import numpy as np
from sklearn.datasets import make_blobs

from .exceptions import BadSpec
from .fileio import read_points
from .metric import PointSet


class GenKind(StrEnum):
    UNIFORM_CUBE = "uniform-cube"
    GRID = "grid"
    CLUSTERED_GAUSSIAN = "clustered-gaussian"
    CIRCLE = "circle"
    COLLINEAR = "collinear"
    EXPLICIT_FILE = "explicit-file"


@dataclass(frozen=True)
class GenSpec:
    kind: GenKind | str
    n: int = 0
    dim: int = 2
    seed: int = 0
    path: Path | str | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", GenKind(self.kind))
        except ValueError:
            choices = ", ".join(k.value for k in GenKind)
            raise BadSpec(f"unknown generator {self.kind!r}; expected one of {choices}") from None
        if self.kind == GenKind.EXPLICIT_FILE:
            if self.path is None:
                raise BadSpec("explicit-file needs a path")
            return
        if self.n < 2:
            raise BadSpec(f"n must be at least 2, got {self.n}")
        if self.dim < 1:
            raise BadSpec(f"dim must be at least 1, got {self.dim}")
        if self.kind == GenKind.CIRCLE and self.dim < 2:
            raise BadSpec("circle needs dim >= 2")
        if not -(2**63) <= self.seed < 2**64:
            raise BadSpec(f"seed {self.seed} is not a 64-bit integer")

    @property
    def label(self) -> str:
        if self.kind == GenKind.EXPLICIT_FILE:
            return f"{self.kind}:{self.path}"
        return f"{self.kind}(n={self.n}, dim={self.dim}, seed={self.seed})"


def _uniform_cube(spec: GenSpec) -> np.ndarray:
    rng = np.random.default_rng(spec.seed % 2**64)
    return rng.random((spec.n, spec.dim))


def _grid(spec: GenSpec) -> np.ndarray:
    side = math.ceil(round(spec.n ** (1.0 / spec.dim), 9))
    while side**spec.dim < spec.n:
        side += 1
    axes = np.indices((side,) * spec.dim).reshape(spec.dim, -1).T
    return axes[: spec.n].astype(float)


def _clustered_gaussian(spec: GenSpec) -> np.ndarray:
    points, _ = make_blobs(
        n_samples=spec.n,
        n_features=spec.dim,
        centers=max(1, spec.n // 32),
        cluster_std=0.05,
        center_box=(0.0, 1.0),
        random_state=spec.seed % 2**32,
    )
    return points


def _circle(spec: GenSpec) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(spec.n) / spec.n
    points = np.zeros((spec.n, spec.dim))
    points[:, 0] = np.cos(theta)
    points[:, 1] = np.sin(theta)
    return points


def _collinear(spec: GenSpec) -> np.ndarray:
    points = np.zeros((spec.n, spec.dim))
    points[:, 0] = np.arange(spec.n, dtype=float)
    return points


GENERATORS: dict[GenKind, Callable[[GenSpec], np.ndarray]] = {
    GenKind.UNIFORM_CUBE: _uniform_cube,
    GenKind.GRID: _grid,
    GenKind.CLUSTERED_GAUSSIAN: _clustered_gaussian,
    GenKind.CIRCLE: _circle,
    GenKind.COLLINEAR: _collinear,
}


def generate(spec: GenSpec) -> PointSet:
    """
    Generate the point set described by ``spec``.

    Raises:
        BadSpec: The spec is invalid.
        BadInputFile: An explicit file can't be read.
    """
    if spec.kind == GenKind.EXPLICIT_FILE:
        return read_points(spec.path)
    return PointSet(GENERATORS[spec.kind](spec))
