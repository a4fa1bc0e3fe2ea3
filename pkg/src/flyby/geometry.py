"""Core geometry: vectors, quaternions, vehicle state, obstacles, scenes.

Conventions used throughout the package:
  * World frame: +x is the flight direction, +z is up, so the lateral-vertical
    plane is y-z.
  * Vectors are numpy float64 arrays of shape (3,).
  * Quaternions are numpy float64 arrays of shape (4,), scalar-first [w, x, y, z].
  * The vehicle's collision body is a sphere of radius DRONE_RADIUS; a state is
    in collision iff ``point_in_collision(pos, scene, DRONE_RADIUS)``.

All types here are immutable value types and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

# Vehicle body: sphere of half the 0.25 m airframe diameter.
DRONE_RADIUS = 0.125


def vec3(x: float, y: float, z: float) -> np.ndarray:
    """Build a (3,) float64 vector."""
    return np.array([x, y, z], dtype=np.float64)


def _require_finite(name: str, a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite components: {a}")


# ---------------------------------------------------------------------------
# Quaternions (scalar-first, unit norm)
# ---------------------------------------------------------------------------

def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if n == 0.0 or not math.isfinite(n):
        raise ValueError(f"cannot normalize quaternion {q}")
    return q / n


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """3x3 rotation matrix for a unit quaternion."""
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector ``v`` by unit quaternion ``q``. Preserves the norm of v."""
    _require_finite("quaternion", q)
    _require_finite("vector", v)
    w, x, y, z = q
    # q * (0, v) * q^-1 expanded; cheaper than building the matrix.
    tx = 2.0 * (y * v[2] - z * v[1])
    ty = 2.0 * (z * v[0] - x * v[2])
    tz = 2.0 * (x * v[1] - y * v[0])
    return np.array(
        [
            v[0] + w * tx + (y * tz - z * ty),
            v[1] + w * ty + (z * tx - x * tz),
            v[2] + w * tz + (x * ty - y * tx),
        ]
    )


def quat_tilt_to(direction: np.ndarray) -> np.ndarray:
    """Shortest-arc quaternion taking body +z to ``direction`` (zero yaw twist).

    Used by the simulator to pose the vehicle from its commanded acceleration.
    """
    n = math.sqrt(direction[0] ** 2 + direction[1] ** 2 + direction[2] ** 2)
    if n == 0.0:
        return quat_identity()
    d = direction / n
    w = 1.0 + d[2]
    if w < 1e-12:
        # Pointing straight down: 180 degree tilt about x.
        return np.array([0.0, 1.0, 0.0, 0.0])
    q = np.array([w, -d[1], d[0], 0.0])
    return quat_normalize(q)


# ---------------------------------------------------------------------------
# Vehicle state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadState:
    """Vehicle state: world position/velocity [m, m/s], attitude, time [s].

    ``forward_speed`` (the world-frame x velocity) is the scalar speed input
    given to the learned models.
    """

    pos: np.ndarray
    vel: np.ndarray
    att: np.ndarray
    t: float

    @property
    def forward_speed(self) -> float:
        return float(self.vel[0])

    @staticmethod
    def at_rest(pos: np.ndarray | None = None) -> "QuadState":
        p = np.zeros(3) if pos is None else np.asarray(pos, dtype=np.float64)
        return QuadState(pos=p, vel=np.zeros(3), att=quat_identity(), t=0.0)


# ---------------------------------------------------------------------------
# Obstacles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"sphere radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Cylinder:
    """Vertical (z-aligned) finite cylinder; ``base`` is the bottom-cap center."""

    base: np.ndarray
    radius: float
    height: float

    def __post_init__(self):
        if self.radius <= 0 or self.height <= 0:
            raise ValueError("cylinder radius and height must be positive")


@dataclass(frozen=True)
class WallWithWindow:
    """Infinite wall occupying the slab ``|x - x0| <= thickness/2`` with a
    rectangular opening centered at (window_y, window_z).

    The wall spans the whole y-z cross-section; the scene bounds determine the
    wall's effective extent (the vehicle cannot leave bounds).
    """

    x0: float
    window_y: float
    window_z: float
    window_width: float
    window_height: float
    thickness: float

    def __post_init__(self):
        if self.window_width <= 0 or self.window_height <= 0 or self.thickness <= 0:
            raise ValueError("wall window dimensions and thickness must be positive")


Obstacle = Union[Sphere, Cylinder, WallWithWindow]


def obstacle_center(ob: Obstacle) -> np.ndarray:
    """Reference point used for sensing-radius queries."""
    if isinstance(ob, Sphere):
        return ob.center
    if isinstance(ob, Cylinder):
        return ob.base + vec3(0.0, 0.0, 0.5 * ob.height)
    return vec3(ob.x0, ob.window_y, ob.window_z)


# ---------------------------------------------------------------------------
# Scene
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Aabb:
    lo: np.ndarray
    hi: np.ndarray

    def contains(self, p: np.ndarray) -> bool:
        return bool(np.all(p >= self.lo) and np.all(p <= self.hi))


@dataclass(frozen=True)
class PackedScene:
    """Struct-of-arrays obstacle layout consumed by the collision kernels.

    ``*_index`` arrays map each packed row back to its position in
    ``Scene.obstacles`` so collision bookkeeping can report obstacle indices.
    """

    spheres: np.ndarray        # (ns, 4): cx, cy, cz, r
    sphere_index: np.ndarray   # (ns,) int64
    cylinders: np.ndarray      # (nc, 5): cx, cy, z_base, r, h
    cylinder_index: np.ndarray
    walls: np.ndarray          # (nw, 6): x0, half_thickness, wy, wz, half_w, half_h
    wall_index: np.ndarray
    n_obstacles: int
    centers: np.ndarray        # (n, 3) sensing reference point per obstacle
    reach: np.ndarray          # (n,) max distance from center to any surface point*

    # *walls are unbounded; their reach entry is +inf so they are never culled.


@dataclass(frozen=True)
class Scene:
    obstacles: tuple
    bounds: Aabb
    goal_distance: float
    _packed_cache: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.goal_distance <= 0:
            raise ValueError("goal_distance must be positive")

    def packed(self) -> PackedScene:
        if not self._packed_cache:
            self._packed_cache.append(pack_scene(self))
        return self._packed_cache[0]


def pack_scene(scene: Scene) -> PackedScene:
    sp, si, cy, ci, wa, wi = [], [], [], [], [], []
    centers = np.zeros((len(scene.obstacles), 3))
    reach = np.zeros(len(scene.obstacles))
    for i, ob in enumerate(scene.obstacles):
        centers[i] = obstacle_center(ob)
        if isinstance(ob, Sphere):
            sp.append([ob.center[0], ob.center[1], ob.center[2], ob.radius])
            si.append(i)
            reach[i] = ob.radius
        elif isinstance(ob, Cylinder):
            cy.append([ob.base[0], ob.base[1], ob.base[2], ob.radius, ob.height])
            ci.append(i)
            reach[i] = math.hypot(ob.radius, 0.5 * ob.height)
        elif isinstance(ob, WallWithWindow):
            wa.append([ob.x0, 0.5 * ob.thickness, ob.window_y, ob.window_z,
                       0.5 * ob.window_width, 0.5 * ob.window_height])
            wi.append(i)
            reach[i] = math.inf
        else:  # pragma: no cover
            raise TypeError(f"unknown obstacle type {type(ob)}")
    return PackedScene(
        spheres=np.array(sp, dtype=np.float64).reshape(-1, 4),
        sphere_index=np.array(si, dtype=np.int64),
        cylinders=np.array(cy, dtype=np.float64).reshape(-1, 5),
        cylinder_index=np.array(ci, dtype=np.int64),
        walls=np.array(wa, dtype=np.float64).reshape(-1, 6),
        wall_index=np.array(wi, dtype=np.int64),
        n_obstacles=len(scene.obstacles),
        centers=centers,
        reach=reach,
    )


# ---------------------------------------------------------------------------
# Collision predicate
# ---------------------------------------------------------------------------
#
# The margin-inflated membership tests, shared by the simulator, the expert
# planner, and the collision kernels:
#   sphere:   |p - c| < r + margin
#   cylinder: radial distance < r + margin and the [z-margin, z+margin] band
#             overlaps [z_base, z_base + h]
#   wall:     |x - x0| < thickness/2 + margin and (y, z) not inside the window
#             opening shrunk inward by margin
# Strict inequalities throughout: a point at exactly the inflated surface is
# not in collision. The predicate is monotone in margin.

def point_in_collision(p: np.ndarray, scene: Scene, margin: float) -> bool:
    """True iff ``p`` is within ``margin`` of any obstacle (per-primitive test)."""
    if margin < 0:
        raise ValueError("margin must be non-negative")
    from . import kernels  # local import: kernels imports geometry

    return bool(kernels.point_obstacle_mask(np.asarray(p, dtype=np.float64),
                                            scene.packed(), margin).any())


def point_obstacle_hits(p: np.ndarray, scene: Scene, margin: float) -> np.ndarray:
    """Per-obstacle boolean collision mask for ``p`` (indices match ``scene.obstacles``)."""
    from . import kernels

    return kernels.point_obstacle_mask(np.asarray(p, dtype=np.float64),
                                       scene.packed(), margin)
