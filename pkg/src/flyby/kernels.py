"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

The hot loops (ray casting for the depth camera, segment checks for the
expert planner, point collision masks for the simulator) have two
implementations: ``flyby._native._kernels`` (Cython) and ``flyby.kernels_py``
(numpy). They are bit-identical by construction and tested for exact
equality, so artifacts do not depend on which backend produced them.

Backend selection: the compiled extension is preferred when importable.
Override with the environment variable ``FLYBY_KERNELS=python|native`` or at
runtime via ``set_backend``.

Obstacle culling (by camera range or planner sensing radius) happens here,
once, so both backends receive identical inputs.
"""

from __future__ import annotations

import os

import numpy as np

from . import kernels_py
from .geometry import PackedScene

try:
    from ._native import _kernels as _native
except ImportError:  # pragma: no cover - build-dependent
    _native = None

_env = os.environ.get("FLYBY_KERNELS", "auto")
if _env == "native" and _native is None:
    raise ImportError("FLYBY_KERNELS=native but the compiled extension is not built")
_backend = "python" if _env == "python" or _native is None else "native"


def available_backends() -> tuple:
    return ("python",) if _native is None else ("python", "native")


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in available_backends():
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    _backend = name


def _impl():
    return _native if _backend == "native" else kernels_py


# ---------------------------------------------------------------------------

def _cull_by_distance(packed: PackedScene, point: np.ndarray, radius: float | None):
    """Packed arrays restricted to obstacles whose sensing center is within
    ``radius`` of ``point`` (inclusive). ``None`` keeps everything."""
    if radius is None:
        return packed.spheres, packed.cylinders, packed.walls
    d = np.sqrt(np.sum((packed.centers - point[None, :]) ** 2, axis=1))
    keep = d <= radius
    return (
        packed.spheres[keep[packed.sphere_index]],
        packed.cylinders[keep[packed.cylinder_index]],
        packed.walls[keep[packed.wall_index]],
    )


def _cull_by_reach(packed: PackedScene, origin: np.ndarray, max_range: float | None):
    """Drop obstacles that cannot produce a hit closer than ``max_range``."""
    if max_range is None:
        return packed.spheres, packed.cylinders, packed.walls
    d = np.sqrt(np.sum((packed.centers - origin[None, :]) ** 2, axis=1))
    keep = d - packed.reach <= max_range
    return (
        packed.spheres[keep[packed.sphere_index]],
        packed.cylinders[keep[packed.cylinder_index]],
        packed.walls[keep[packed.wall_index]],
    )


def ray_cast(origin: np.ndarray, dirs: np.ndarray, packed: PackedScene,
             max_range: float | None = None) -> np.ndarray:
    """Smallest positive hit distance per unit-direction ray; inf for miss.

    When ``max_range`` is given, obstacles that cannot yield a hit at or
    below it are skipped; reported distances beyond max_range are then only
    meaningful as "farther than max_range".
    """
    sp, cy, wa = _cull_by_reach(packed, origin, max_range)
    return _impl().ray_cast(np.ascontiguousarray(origin, dtype=np.float64),
                            np.ascontiguousarray(dirs, dtype=np.float64),
                            sp, cy, wa)


def point_obstacle_mask(p: np.ndarray, packed: PackedScene, margin: float) -> np.ndarray:
    """Per-obstacle collision flags for one point, indexed like Scene.obstacles."""
    flags = _impl().point_mask(np.ascontiguousarray(p, dtype=np.float64),
                               packed.spheres, packed.cylinders, packed.walls,
                               float(margin))
    flags = np.asarray(flags, dtype=bool)
    out = np.zeros(packed.n_obstacles, dtype=bool)
    ns, nc = packed.sphere_index.size, packed.cylinder_index.size
    out[packed.sphere_index] = flags[:ns]
    out[packed.cylinder_index] = flags[ns:ns + nc]
    out[packed.wall_index] = flags[ns + nc:]
    return out


def points_any_collision(points: np.ndarray, packed: PackedScene, margin: float) -> np.ndarray:
    """Vectorized any-obstacle collision test (python backend; not hot)."""
    return kernels_py.points_any_collision(
        np.ascontiguousarray(points, dtype=np.float64),
        packed.spheres, packed.cylinders, packed.walls, float(margin))


def segments_blocked(p0: np.ndarray, p1s: np.ndarray, packed: PackedScene,
                     margin: float, sense_radius: float | None) -> np.ndarray:
    """True per segment iff a sensed obstacle's inflated region intersects it."""
    sp, cy, wa = _cull_by_distance(packed, p0, sense_radius)
    out = _impl().segments_blocked(np.ascontiguousarray(p0, dtype=np.float64),
                                   np.ascontiguousarray(p1s, dtype=np.float64),
                                   sp, cy, wa, float(margin))
    return np.asarray(out, dtype=bool)


def segment_clearances(p0: np.ndarray, p1s: np.ndarray, packed: PackedScene,
                       sense_radius: float | None) -> np.ndarray:
    """Minimum pseudo-distance to any sensed obstacle along each segment."""
    sp, cy, wa = _cull_by_distance(packed, p0, sense_radius)
    return kernels_py.segment_clearances(np.ascontiguousarray(p0, dtype=np.float64),
                                         np.ascontiguousarray(p1s, dtype=np.float64),
                                         sp, cy, wa)
