# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled collision and ray-casting kernels.

Bit-identical to flyby.kernels_py: the same IEEE operations in the same
order (the build uses -ffp-contract=off to prevent FMA contraction). Any
formula change here must be mirrored there.
"""

from libc.math cimport sqrt, fabs, INFINITY

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double _POS_EPS = 1e-12


cdef inline double _dmin(double a, double b) nogil:
    return a if a < b else b


cdef inline double _dmax(double a, double b) nogil:
    return a if a > b else b


def ray_cast(double[::1] origin, double[:, ::1] dirs,
             double[:, ::1] spheres, double[:, ::1] cylinders,
             double[:, ::1] walls):
    cdef Py_ssize_t n = dirs.shape[0]
    out = np.full(n, np.inf)
    cdef double[::1] best = out
    cdef double ox = origin[0], oy = origin[1], oz = origin[2]
    cdef Py_ssize_t i, s, c, w, f
    cdef double dx, dy, dz, cx, cy, cz, r, zb, h
    cdef double ocx, ocy, ocz, b, cq, disc, sq, t1, t2, t, a
    cdef double tr1, tr2, tz1, tz2, za, zbnd, t_in, t_out
    cdef double x0, ht, wy, wz, hw, hh, xl, xr, ta, tb, tc, py, pz, yp, zp

    with nogil:
        for i in range(n):
            dx = dirs[i, 0]
            dy = dirs[i, 1]
            dz = dirs[i, 2]

            for s in range(spheres.shape[0]):
                cx = spheres[s, 0]
                cy = spheres[s, 1]
                cz = spheres[s, 2]
                r = spheres[s, 3]
                ocx = ox - cx
                ocy = oy - cy
                ocz = oz - cz
                b = dx * ocx + dy * ocy + dz * ocz
                cq = ocx * ocx + ocy * ocy + ocz * ocz - r * r
                disc = b * b - cq
                if disc >= 0.0:
                    sq = sqrt(disc)
                    t1 = -b - sq
                    t2 = -b + sq
                    t = t1 if t1 > _POS_EPS else (t2 if t2 > _POS_EPS else INFINITY)
                    if t < best[i]:
                        best[i] = t

            for c in range(cylinders.shape[0]):
                cx = cylinders[c, 0]
                cy = cylinders[c, 1]
                zb = cylinders[c, 2]
                r = cylinders[c, 3]
                h = cylinders[c, 4]
                ocx = ox - cx
                ocy = oy - cy
                a = dx * dx + dy * dy
                b = dx * ocx + dy * ocy
                cq = ocx * ocx + ocy * ocy - r * r
                if a > 0.0:
                    disc = b * b - a * cq
                    if disc >= 0.0:
                        sq = sqrt(disc)
                        tr1 = (-b - sq) / a
                        tr2 = (-b + sq) / a
                    else:
                        continue
                else:
                    if cq < 0.0:
                        tr1 = -INFINITY
                        tr2 = INFINITY
                    else:
                        continue
                if dz != 0.0:
                    za = (zb - oz) / dz
                    zbnd = (zb + h - oz) / dz
                    tz1 = _dmin(za, zbnd)
                    tz2 = _dmax(za, zbnd)
                else:
                    if zb <= oz and oz <= zb + h:
                        tz1 = -INFINITY
                        tz2 = INFINITY
                    else:
                        continue
                t_in = _dmax(tr1, tz1)
                t_out = _dmin(tr2, tz2)
                if t_in <= t_out:
                    t = t_in if t_in > _POS_EPS else (t_out if t_out > _POS_EPS else INFINITY)
                    if t < best[i]:
                        best[i] = t

            for w in range(walls.shape[0]):
                x0 = walls[w, 0]
                ht = walls[w, 1]
                wy = walls[w, 2]
                wz = walls[w, 3]
                hw = walls[w, 4]
                hh = walls[w, 5]
                xl = x0 - ht
                xr = x0 + ht
                if dx != 0.0:
                    ta = (xl - ox) / dx
                    tb = (xr - ox) / dx
                    t_in = _dmin(ta, tb)
                    t_out = _dmax(ta, tb)
                else:
                    if xl <= ox and ox <= xr:
                        t_in = -INFINITY
                        t_out = INFINITY
                    else:
                        continue
                t = INFINITY
                for f in range(2):
                    tc = t_in if f == 0 else t_out
                    if tc > _POS_EPS and tc != INFINITY and tc != -INFINITY:
                        py = oy + tc * dy
                        pz = oz + tc * dz
                        if not (fabs(py - wy) < hw and fabs(pz - wz) < hh):
                            if tc < t:
                                t = tc
                for f in range(2):
                    yp = wy - hw if f == 0 else wy + hw
                    if dy != 0.0:
                        tc = (yp - oy) / dy
                        pz = oz + tc * dz
                        if tc > _POS_EPS and tc >= t_in and tc <= t_out and fabs(pz - wz) <= hh:
                            if tc < t:
                                t = tc
                for f in range(2):
                    zp = wz - hh if f == 0 else wz + hh
                    if dz != 0.0:
                        tc = (zp - oz) / dz
                        py = oy + tc * dy
                        if tc > _POS_EPS and tc >= t_in and tc <= t_out and fabs(py - wy) <= hw:
                            if tc < t:
                                t = tc
                if t < best[i]:
                    best[i] = t

    return out


def point_mask(double[::1] p, double[:, ::1] spheres, double[:, ::1] cylinders,
               double[:, ::1] walls, double margin):
    cdef Py_ssize_t ns = spheres.shape[0]
    cdef Py_ssize_t nc = cylinders.shape[0]
    cdef Py_ssize_t nw = walls.shape[0]
    out = np.zeros(ns + nc + nw, dtype=np.uint8)
    cdef cnp.uint8_t[::1] m = out
    cdef double px = p[0], py = p[1], pz = p[2]
    cdef Py_ssize_t s, c, w
    cdef double cx, cy, cz, r, rm, ddx, ddy, ddz, zb, h
    cdef double x0, ht, wy, wz, hw, hh
    cdef bint in_slab, in_window

    for s in range(ns):
        cx = spheres[s, 0]
        cy = spheres[s, 1]
        cz = spheres[s, 2]
        r = spheres[s, 3]
        ddx = px - cx
        ddy = py - cy
        ddz = pz - cz
        rm = r + margin
        m[s] = ddx * ddx + ddy * ddy + ddz * ddz < rm * rm
    for c in range(nc):
        cx = cylinders[c, 0]
        cy = cylinders[c, 1]
        zb = cylinders[c, 2]
        r = cylinders[c, 3]
        h = cylinders[c, 4]
        ddx = px - cx
        ddy = py - cy
        rm = r + margin
        m[ns + c] = (ddx * ddx + ddy * ddy < rm * rm) and (pz > zb - margin) \
            and (pz < zb + h + margin)
    for w in range(nw):
        x0 = walls[w, 0]
        ht = walls[w, 1]
        wy = walls[w, 2]
        wz = walls[w, 3]
        hw = walls[w, 4]
        hh = walls[w, 5]
        in_slab = fabs(px - x0) < ht + margin
        in_window = (fabs(py - wy) < hw - margin) and (fabs(pz - wz) < hh - margin)
        m[ns + nc + w] = in_slab and not in_window
    return out


def segments_blocked(double[::1] p0, double[:, ::1] p1s,
                     double[:, ::1] spheres, double[:, ::1] cylinders,
                     double[:, ::1] walls, double margin):
    cdef Py_ssize_t k = p1s.shape[0]
    out = np.zeros(k, dtype=np.uint8)
    cdef cnp.uint8_t[::1] blocked = out
    cdef double ox = p0[0], oy = p0[1], oz = p0[2]
    cdef Py_ssize_t i, s, c, w
    cdef double wx, wy_, wz_, cx, cy, cz, r, rm, fx, fy, fz
    cdef double ww, proj, tt, qx, qy, qz, zb, h
    cdef double a, b, cq, disc, sq, tr1, tr2, tz1, tz2, za, zc, zlo, zhi, lo, hi
    cdef double x0, ht, wy, wz, hw, hh, sl, ta, tb, t_in, t_out
    cdef double ey, ez, y_lo, z_lo, y_hi, z_hi

    with nogil:
        for i in range(k):
            if blocked[i]:
                continue
            wx = p1s[i, 0] - ox
            wy_ = p1s[i, 1] - oy
            wz_ = p1s[i, 2] - oz

            for s in range(spheres.shape[0]):
                cx = spheres[s, 0]
                cy = spheres[s, 1]
                cz = spheres[s, 2]
                r = spheres[s, 3]
                fx = ox - cx
                fy = oy - cy
                fz = oz - cz
                ww = wx * wx + wy_ * wy_ + wz_ * wz_
                proj = -(fx * wx + fy * wy_ + fz * wz_)
                tt = proj / ww if ww > 0.0 else 0.0
                if tt < 0.0:
                    tt = 0.0
                if tt > 1.0:
                    tt = 1.0
                qx = fx + tt * wx
                qy = fy + tt * wy_
                qz = fz + tt * wz_
                rm = r + margin
                if qx * qx + qy * qy + qz * qz < rm * rm:
                    blocked[i] = 1
                    break
            if blocked[i]:
                continue

            for c in range(cylinders.shape[0]):
                cx = cylinders[c, 0]
                cy = cylinders[c, 1]
                zb = cylinders[c, 2]
                r = cylinders[c, 3]
                h = cylinders[c, 4]
                fx = ox - cx
                fy = oy - cy
                rm = r + margin
                a = wx * wx + wy_ * wy_
                b = fx * wx + fy * wy_
                cq = fx * fx + fy * fy - rm * rm
                if a > 0.0:
                    disc = b * b - a * cq
                    if disc > 0.0:
                        sq = sqrt(disc)
                        tr1 = (-b - sq) / a
                        tr2 = (-b + sq) / a
                    else:
                        continue
                else:
                    if cq < 0.0:
                        tr1 = -INFINITY
                        tr2 = INFINITY
                    else:
                        continue
                zlo = zb - margin
                zhi = zb + h + margin
                if wz_ != 0.0:
                    za = (zlo - oz) / wz_
                    zc = (zhi - oz) / wz_
                    tz1 = _dmin(za, zc)
                    tz2 = _dmax(za, zc)
                else:
                    if zlo < oz and oz < zhi:
                        tz1 = -INFINITY
                        tz2 = INFINITY
                    else:
                        continue
                lo = _dmax(_dmax(tr1, tz1), 0.0)
                hi = _dmin(_dmin(tr2, tz2), 1.0)
                if lo < hi:
                    blocked[i] = 1
                    break
            if blocked[i]:
                continue

            for w in range(walls.shape[0]):
                x0 = walls[w, 0]
                ht = walls[w, 1]
                wy = walls[w, 2]
                wz = walls[w, 3]
                hw = walls[w, 4]
                hh = walls[w, 5]
                sl = ht + margin
                if wx != 0.0:
                    ta = (x0 - sl - ox) / wx
                    tb = (x0 + sl - ox) / wx
                    t_in = _dmin(ta, tb)
                    t_out = _dmax(ta, tb)
                else:
                    if fabs(ox - x0) < sl:
                        t_in = -INFINITY
                        t_out = INFINITY
                    else:
                        continue
                lo = _dmax(t_in, 0.0)
                hi = _dmin(t_out, 1.0)
                if lo <= hi:
                    ey = hw - margin
                    ez = hh - margin
                    y_lo = oy + lo * wy_
                    z_lo = oz + lo * wz_
                    y_hi = oy + hi * wy_
                    z_hi = oz + hi * wz_
                    if not (fabs(y_lo - wy) < ey and fabs(z_lo - wz) < ez
                            and fabs(y_hi - wy) < ey and fabs(z_hi - wz) < ez):
                        blocked[i] = 1
                        break

    return out
