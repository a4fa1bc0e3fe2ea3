"""Ray-cast depth camera producing the policy's visual input.

Pinhole model with half-pixel-center convention: pixel (row r, col c) casts
through image-plane coordinates u = (c + 0.5 - cx) / fx (rightward) and
v = (r + 0.5 - cy) / fy (downward). In the body frame (+x forward, +y left,
+z up) the ray direction is (1, -u, -v), normalized, then rotated into the
world frame by the vehicle attitude. Depth is the Euclidean hit distance
along the ray divided by max_range, clamped to [0, 1]; 1.0 means no hit
within range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .geometry import QuadState, Scene, Sphere, Cylinder, WallWithWindow, Obstacle, Scene as _Scene
from .geometry import quat_to_matrix, Aabb, pack_scene

DEPTH_HEIGHT = 60
DEPTH_WIDTH = 90


@dataclass(frozen=True)
class CameraIntrinsics:
    """Forward-mounted depth camera, aligned with the body frame.

    The policy input camera is fixed at 90x60; other sizes are permitted only
    for internal consistency checks (see ``supersampled``).
    """

    width: int = DEPTH_WIDTH
    height: int = DEPTH_HEIGHT
    hfov: float = math.radians(87.0)
    max_range: float = 10.0
    fx: float | None = None
    fy: float | None = None
    cx: float | None = None
    cy: float | None = None

    def __post_init__(self):
        if not (0.0 < self.hfov < math.pi):
            raise ValueError("horizontal FOV must be in (0, pi)")
        if self.max_range <= 0:
            raise ValueError("max_range must be positive")
        if self.fx is None:
            object.__setattr__(self, "fx", (self.width / 2.0) / math.tan(self.hfov / 2.0))
        if self.fy is None:
            object.__setattr__(self, "fy", self.fx)
        if self.cx is None:
            object.__setattr__(self, "cx", self.width / 2.0)
        if self.cy is None:
            object.__setattr__(self, "cy", self.height / 2.0)

    def supersampled(self, factor: int) -> "CameraIntrinsics":
        """Camera at factor x resolution whose pixel grid refines this one.

        Alignment choice: fx, fy, cx, cy all scale by ``factor``, so for odd
        factors the center subpixel of each factor x factor block casts exactly
        the same ray as the parent pixel (subpixel offset (factor-1)/2). Even
        factors have no coincident subpixel; min-pooling such a render gives a
        conservative (closer-or-equal) depth, not an identical one.
        """
        return CameraIntrinsics(width=self.width * factor, height=self.height * factor,
                                hfov=self.hfov, max_range=self.max_range,
                                fx=self.fx * factor, fy=self.fy * factor,
                                cx=self.cx * factor, cy=self.cy * factor)


@dataclass(frozen=True)
class DepthImage:
    """60x90 grid of normalized depths in [0, 1] (float32)."""

    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.shape != (DEPTH_HEIGHT, DEPTH_WIDTH):
            raise ValueError(f"depth image must be {DEPTH_HEIGHT}x{DEPTH_WIDTH}, got {v.shape}")
        if v.dtype != np.float32:
            raise ValueError("depth image must be float32")
        if v.min() < 0.0 or v.max() > 1.0:
            raise ValueError("depth values must lie in [0, 1]")


@lru_cache(maxsize=8)
def _body_dirs(cam: CameraIntrinsics) -> np.ndarray:
    """Unit ray directions in the body frame, row-major (H*W, 3)."""
    cols = np.arange(cam.width, dtype=np.float64)
    rows = np.arange(cam.height, dtype=np.float64)
    u = (cols + 0.5 - cam.cx) / cam.fx
    v = (rows + 0.5 - cam.cy) / cam.fy
    uu, vv = np.meshgrid(u, v)  # (H, W)
    d = np.stack([np.ones_like(uu), -uu, -vv], axis=-1).reshape(-1, 3)
    norm = np.sqrt(np.sum(d * d, axis=1, keepdims=True))
    return np.ascontiguousarray(d / norm)


def render_distances(state: QuadState, scene: Scene, cam: CameraIntrinsics) -> np.ndarray:
    """Raw per-pixel hit distances (H, W) float64; np.inf where nothing hit.

    Distances beyond max_range are not exact (obstacles that cannot hit
    within range are culled) but always exceed max_range.
    """
    r = quat_to_matrix(state.att)
    dirs = _body_dirs(cam) @ r.T
    dist = kernels.ray_cast(state.pos, np.ascontiguousarray(dirs),
                            scene.packed(), cam.max_range)
    return dist.reshape(cam.height, cam.width)


def render_depth(state: QuadState, scene: Scene,
                 cam: CameraIntrinsics | None = None) -> DepthImage:
    """Normalized 60x90 depth image for the camera pose given by ``state``."""
    cam = cam or CameraIntrinsics()
    if (cam.height, cam.width) != (DEPTH_HEIGHT, DEPTH_WIDTH):
        raise ValueError("policy depth images are fixed at 60x90")
    dist = render_distances(state, scene, cam)
    vals = np.minimum(dist / cam.max_range, 1.0).astype(np.float32)
    return DepthImage(values=vals)


def min_pool(values: np.ndarray, factor: int) -> np.ndarray:
    """Min-pool a (k*H, k*W) array down to (H, W)."""
    h, w = values.shape
    if h % factor or w % factor:
        raise ValueError("array dimensions must be divisible by the pooling factor")
    return values.reshape(h // factor, factor, w // factor, factor).min(axis=(1, 3))


def center_subsample(values: np.ndarray, factor: int) -> np.ndarray:
    """Take the center subpixel of each block; factor must be odd.

    With ``CameraIntrinsics.supersampled``, this reproduces the base-resolution
    render exactly (the center subpixel rays coincide).
    """
    if factor % 2 == 0:
        raise ValueError("center subsampling requires an odd factor")
    off = (factor - 1) // 2
    return values[off::factor, off::factor]


def ray_hit(origin: np.ndarray, direction: np.ndarray, obstacle: Obstacle) -> float | None:
    """Smallest positive intersection distance of a unit ray with one obstacle."""
    scene = _Scene(obstacles=(obstacle,),
                   bounds=Aabb(lo=np.full(3, -np.inf), hi=np.full(3, np.inf)),
                   goal_distance=1.0)
    d = kernels.ray_cast(np.asarray(origin, dtype=np.float64),
                         np.asarray(direction, dtype=np.float64).reshape(1, 3),
                         pack_scene(scene), None)[0]
    return None if math.isinf(d) else float(d)
