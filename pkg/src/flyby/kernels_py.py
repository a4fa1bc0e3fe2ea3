"""Pure-numpy collision and ray-casting kernels.

This is the fallback backend; ``flyby._native._kernels`` implements the same
functions in C via Cython. Both backends must produce bit-identical results,
so every formula here is written as an explicit sequence of IEEE operations
that the C code replicates in the same order (and the extension is compiled
with -ffp-contract=off). Do not "simplify" float expressions in one backend
without changing the other.

Obstacle array layouts (see geometry.PackedScene):
  spheres   (ns, 4): cx, cy, cz, r
  cylinders (nc, 5): cx, cy, z_base, r, h   (vertical, finite, capped)
  walls     (nw, 6): x0, half_thickness, window_y, window_z, half_w, half_h
"""

from __future__ import annotations

import numpy as np

_POS_EPS = 1e-12  # hits closer than this are treated as "at the origin", not hits


# ---------------------------------------------------------------------------
# Ray casting
# ---------------------------------------------------------------------------

def ray_cast(origin, dirs, spheres, cylinders, walls):
    """Smallest positive hit distance per ray; np.inf where nothing is hit.

    ``origin`` is (3,), ``dirs`` is (N, 3) with unit rows. A ray starting
    inside a solid reports the exit crossing (smallest positive boundary
    crossing).
    """
    n = dirs.shape[0]
    best = np.full(n, np.inf)
    ox, oy, oz = origin[0], origin[1], origin[2]
    dx, dy, dz = dirs[:, 0], dirs[:, 1], dirs[:, 2]

    with np.errstate(invalid="ignore", divide="ignore"):
        for s in range(spheres.shape[0]):
            cx, cy, cz, r = spheres[s]
            ocx = ox - cx
            ocy = oy - cy
            ocz = oz - cz
            b = dx * ocx + dy * ocy + dz * ocz
            cq = ocx * ocx + ocy * ocy + ocz * ocz - r * r
            disc = b * b - cq
            valid = disc >= 0.0
            sq = np.sqrt(np.where(valid, disc, 0.0))
            t1 = -b - sq
            t2 = -b + sq
            t = np.where(t1 > _POS_EPS, t1, np.where(t2 > _POS_EPS, t2, np.inf))
            t = np.where(valid, t, np.inf)
            best = np.minimum(best, t)

        for c in range(cylinders.shape[0]):
            cx, cy, zb, r, h = cylinders[c]
            ocx = ox - cx
            ocy = oy - cy
            a = dx * dx + dy * dy
            b = dx * ocx + dy * ocy
            cq = ocx * ocx + ocy * ocy - r * r
            radial = a > 0.0
            disc = b * b - a * cq
            hit_r = radial & (disc >= 0.0)
            sq = np.sqrt(np.where(hit_r, disc, 0.0))
            tr1 = np.where(hit_r, (-b - sq) / np.where(radial, a, 1.0), np.inf)
            tr2 = np.where(hit_r, (-b + sq) / np.where(radial, a, 1.0), -np.inf)
            # Vertical rays: radially inside forever or never.
            inside_r = (~radial) & (cq < 0.0)
            tr1 = np.where(inside_r, -np.inf, tr1)
            tr2 = np.where(inside_r, np.inf, tr2)

            vert = dz != 0.0
            za = (zb - oz) / np.where(vert, dz, 1.0)
            zbnd = (zb + h - oz) / np.where(vert, dz, 1.0)
            tz1 = np.where(vert, np.minimum(za, zbnd), -np.inf)
            tz2 = np.where(vert, np.maximum(za, zbnd), np.inf)
            inside_z = (zb <= oz) & (oz <= zb + h)
            tz1 = np.where(vert, tz1, np.where(inside_z, -np.inf, np.inf))
            tz2 = np.where(vert, tz2, np.where(inside_z, np.inf, -np.inf))

            t_in = np.maximum(tr1, tz1)
            t_out = np.minimum(tr2, tz2)
            ok = t_in <= t_out
            t = np.where(t_in > _POS_EPS, t_in, np.where(t_out > _POS_EPS, t_out, np.inf))
            best = np.minimum(best, np.where(ok, t, np.inf))

        for w in range(walls.shape[0]):
            x0, ht, wy, wz, hw, hh = walls[w]
            xl = x0 - ht
            xr = x0 + ht
            moving = dx != 0.0
            ta = (xl - ox) / np.where(moving, dx, 1.0)
            tb = (xr - ox) / np.where(moving, dx, 1.0)
            t_in = np.where(moving, np.minimum(ta, tb), -np.inf)
            t_out = np.where(moving, np.maximum(ta, tb), np.inf)
            inside_slab = (xl <= ox) & (ox <= xr)
            t_in = np.where(moving, t_in, np.where(inside_slab, -np.inf, np.inf))
            t_out = np.where(moving, t_out, np.where(inside_slab, np.inf, -np.inf))

            t = np.full(n, np.inf)
            # Slab faces: boundary wherever (y, z) is outside the opening.
            for tc in (t_in, t_out):
                py = oy + tc * dy
                pz = oz + tc * dz
                outside = ~((np.abs(py - wy) < hw) & (np.abs(pz - wz) < hh))
                good = (tc > _POS_EPS) & np.isfinite(tc) & outside
                t = np.where(good & (tc < t), tc, t)
            # Window tunnel surfaces (the four inner faces of the opening).
            for yp in (wy - hw, wy + hw):
                my = dy != 0.0
                tc = (yp - oy) / np.where(my, dy, 1.0)
                pz = oz + tc * dz
                good = my & (tc > _POS_EPS) & (tc >= t_in) & (tc <= t_out) \
                    & (np.abs(pz - wz) <= hh)
                t = np.where(good & (tc < t), tc, t)
            for zp in (wz - hh, wz + hh):
                mz = dz != 0.0
                tc = (zp - oz) / np.where(mz, dz, 1.0)
                py = oy + tc * dy
                good = mz & (tc > _POS_EPS) & (tc >= t_in) & (tc <= t_out) \
                    & (np.abs(py - wy) <= hw)
                t = np.where(good & (tc < t), tc, t)
            best = np.minimum(best, t)

    return best


# ---------------------------------------------------------------------------
# Point collision masks
# ---------------------------------------------------------------------------

def point_mask(p, spheres, cylinders, walls, margin):
    """Per-packed-row collision flags for one point, in (spheres, cylinders,
    walls) order. Strict inequalities; see geometry.point_in_collision."""
    px, py, pz = p[0], p[1], p[2]
    out = []
    for s in range(spheres.shape[0]):
        cx, cy, cz, r = spheres[s]
        ddx = px - cx
        ddy = py - cy
        ddz = pz - cz
        rm = r + margin
        out.append(ddx * ddx + ddy * ddy + ddz * ddz < rm * rm)
    for c in range(cylinders.shape[0]):
        cx, cy, zb, r, h = cylinders[c]
        ddx = px - cx
        ddy = py - cy
        rm = r + margin
        out.append((ddx * ddx + ddy * ddy < rm * rm)
                   and (pz > zb - margin) and (pz < zb + h + margin))
    for w in range(walls.shape[0]):
        x0, ht, wy, wz, hw, hh = walls[w]
        in_slab = abs(px - x0) < ht + margin
        in_window = (abs(py - wy) < hw - margin) and (abs(pz - wz) < hh - margin)
        out.append(in_slab and not in_window)
    return np.array(out, dtype=bool)


def points_any_collision(points, spheres, cylinders, walls, margin):
    """Vectorized any-obstacle collision test for (N, 3) points."""
    px, py, pz = points[:, 0], points[:, 1], points[:, 2]
    hit = np.zeros(points.shape[0], dtype=bool)
    for s in range(spheres.shape[0]):
        cx, cy, cz, r = spheres[s]
        ddx = px - cx
        ddy = py - cy
        ddz = pz - cz
        rm = r + margin
        hit |= ddx * ddx + ddy * ddy + ddz * ddz < rm * rm
    for c in range(cylinders.shape[0]):
        cx, cy, zb, r, h = cylinders[c]
        ddx = px - cx
        ddy = py - cy
        rm = r + margin
        hit |= (ddx * ddx + ddy * ddy < rm * rm) & (pz > zb - margin) & (pz < zb + h + margin)
    for w in range(walls.shape[0]):
        x0, ht, wy, wz, hw, hh = walls[w]
        in_slab = np.abs(px - x0) < ht + margin
        in_window = (np.abs(py - wy) < hw - margin) & (np.abs(pz - wz) < hh - margin)
        hit |= in_slab & ~in_window
    return hit


# ---------------------------------------------------------------------------
# Segment queries (expert planner)
# ---------------------------------------------------------------------------

def segments_blocked(p0, p1s, spheres, cylinders, walls, margin):
    """For each segment p0 -> p1s[k], True iff some obstacle's inflated region
    intersects the segment. Obstacle culling by sensing radius happens in the
    dispatcher; every obstacle passed here is tested.

    The test is the exact continuous version of the point predicate: a segment
    is blocked iff some point on it satisfies point_mask's inequality.
    """
    k = p1s.shape[0]
    blocked = np.zeros(k, dtype=bool)
    ox, oy, oz = p0[0], p0[1], p0[2]
    wx = p1s[:, 0] - ox
    wy_ = p1s[:, 1] - oy
    wz_ = p1s[:, 2] - oz

    with np.errstate(invalid="ignore", divide="ignore"):
        for s in range(spheres.shape[0]):
            cx, cy, cz, r = spheres[s]
            fx = ox - cx
            fy = oy - cy
            fz = oz - cz
            ww = wx * wx + wy_ * wy_ + wz_ * wz_
            proj = -(fx * wx + fy * wy_ + fz * wz_)
            tt = np.where(ww > 0.0, proj / np.where(ww > 0.0, ww, 1.0), 0.0)
            tt = np.minimum(np.maximum(tt, 0.0), 1.0)
            qx = fx + tt * wx
            qy = fy + tt * wy_
            qz = fz + tt * wz_
            rm = r + margin
            blocked |= qx * qx + qy * qy + qz * qz < rm * rm

        for c in range(cylinders.shape[0]):
            cx, cy, zb, r, h = cylinders[c]
            fx = ox - cx
            fy = oy - cy
            rm = r + margin
            a = wx * wx + wy_ * wy_
            b = fx * wx + fy * wy_
            cq = fx * fx + fy * fy - rm * rm
            disc = b * b - a * cq
            has_a = a > 0.0
            ok_r = has_a & (disc > 0.0)
            sq = np.sqrt(np.where(ok_r, disc, 0.0))
            tr1 = np.where(ok_r, (-b - sq) / np.where(has_a, a, 1.0), np.inf)
            tr2 = np.where(ok_r, (-b + sq) / np.where(has_a, a, 1.0), -np.inf)
            inside_r = (~has_a) & (cq < 0.0)
            tr1 = np.where(inside_r, -np.inf, tr1)
            tr2 = np.where(inside_r, np.inf, tr2)

            zlo = zb - margin
            zhi = zb + h + margin
            vert = wz_ != 0.0
            za = (zlo - oz) / np.where(vert, wz_, 1.0)
            zc = (zhi - oz) / np.where(vert, wz_, 1.0)
            tz1 = np.where(vert, np.minimum(za, zc), -np.inf)
            tz2 = np.where(vert, np.maximum(za, zc), np.inf)
            inside_z = (zlo < oz) & (oz < zhi)
            tz1 = np.where(vert, tz1, np.where(inside_z, -np.inf, np.inf))
            tz2 = np.where(vert, tz2, np.where(inside_z, np.inf, -np.inf))

            lo = np.maximum(np.maximum(tr1, tz1), 0.0)
            hi = np.minimum(np.minimum(tr2, tz2), 1.0)
            blocked |= lo < hi

        for w in range(walls.shape[0]):
            x0, ht, wy, wz, hw, hh = walls[w]
            sl = ht + margin
            moving = wx != 0.0
            ta = (x0 - sl - ox) / np.where(moving, wx, 1.0)
            tb = (x0 + sl - ox) / np.where(moving, wx, 1.0)
            t_in = np.where(moving, np.minimum(ta, tb), -np.inf)
            t_out = np.where(moving, np.maximum(ta, tb), np.inf)
            inside_slab = np.abs(ox - x0) < sl
            t_in = np.where(moving, t_in, np.where(inside_slab, -np.inf, np.inf))
            t_out = np.where(moving, t_out, np.where(inside_slab, np.inf, -np.inf))
            lo = np.maximum(t_in, 0.0)
            hi = np.minimum(t_out, 1.0)
            crosses = lo <= hi
            # Within the slab span, free only if the whole (y, z) sub-segment
            # stays strictly inside the margin-shrunk opening.
            ey = hw - margin
            ez = hh - margin
            y_lo = oy + lo * wy_
            z_lo = oz + lo * wz_
            y_hi = oy + hi * wy_
            z_hi = oz + hi * wz_
            inside = (np.abs(y_lo - wy) < ey) & (np.abs(z_lo - wz) < ez) \
                & (np.abs(y_hi - wy) < ey) & (np.abs(z_hi - wz) < ez)
            blocked |= crosses & ~inside

    return blocked


def segment_clearances(p0, p1s, spheres, cylinders, walls):
    """Minimum obstacle pseudo-distance along each segment (negative inside).

    Used only to rank fallback waypoints when every segment is blocked, so it
    runs on the python backend regardless of kernel selection. The
    pseudo-distance matches the collision predicate: an obstacle blocks at
    margin m iff its pseudo-distance drops below m. Sphere distances are
    exact; cylinder and wall distances are minimized by dense sampling with
    local refinement (deterministic).
    """
    k = p1s.shape[0]
    clear = np.full(k, np.inf)
    seg = p1s - p0[None, :]

    for s in range(spheres.shape[0]):
        c = spheres[s, :3]
        r = spheres[s, 3]
        f = p0 - c
        ww = np.einsum("ij,ij->i", seg, seg)
        tt = np.clip(-(seg @ f) / np.where(ww > 0, ww, 1.0), 0.0, 1.0)
        q = f[None, :] + tt[:, None] * seg
        d = np.sqrt(np.einsum("ij,ij->i", q, q)) - r
        clear = np.minimum(clear, d)

    def _sampled_min(dist_fn):
        ts = np.linspace(0.0, 1.0, 65)
        pts = p0[None, None, :] + ts[None, :, None] * seg[:, None, :]  # (k, 65, 3)
        d = dist_fn(pts.reshape(-1, 3)).reshape(k, ts.size)
        arg = np.argmin(d, axis=1)
        lo = np.clip(ts[arg] - 1.0 / 64.0, 0.0, 1.0)
        hi = np.clip(ts[arg] + 1.0 / 64.0, 0.0, 1.0)
        fine = np.linspace(0.0, 1.0, 33)
        tf = lo[:, None] + (hi - lo)[:, None] * fine[None, :]
        pf = p0[None, None, :] + tf[..., None] * seg[:, None, :]
        df = dist_fn(pf.reshape(-1, 3)).reshape(k, fine.size)
        return df.min(axis=1)

    for c in range(cylinders.shape[0]):
        cx, cy, zb, r, h = cylinders[c]

        def cyl_dist(p, cx=cx, cy=cy, zb=zb, r=r, h=h):
            radial = np.hypot(p[:, 0] - cx, p[:, 1] - cy) - r
            return np.maximum(radial, np.maximum(zb - p[:, 2], p[:, 2] - (zb + h)))

        clear = np.minimum(clear, _sampled_min(cyl_dist))

    for w in range(walls.shape[0]):
        x0, ht, wy, wz, hw, hh = walls[w]

        def wall_dist(p, x0=x0, ht=ht, wy=wy, wz=wz, hw=hw, hh=hh):
            slab = np.abs(p[:, 0] - x0) - ht
            escape = np.maximum(np.abs(p[:, 1] - wy) - hw, np.abs(p[:, 2] - wz) - hh)
            return np.maximum(slab, -escape)

        clear = np.minimum(clear, _sampled_min(wall_dist))

    return clear
