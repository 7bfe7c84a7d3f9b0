# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the kernels in numpy_backend.py.

Bit parity contract: every arithmetic expression here keeps the exact
association order of its numpy counterpart. Do not "simplify" formulas
independently in one file.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, floor, ceil, sqrt

cnp.import_array()

ACCUM_ADD = 0
ACCUM_MAX = 1


def project_points(double[:, ::1] positions, double[:, ::1] rot,
                   double[::1] trans, double fx, double fy,
                   double cx, double cy):
    cdef Py_ssize_t n = positions.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u_arr = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v_arr = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] zv = z_arr
    cdef double r00 = rot[0, 0], r01 = rot[0, 1], r02 = rot[0, 2]
    cdef double r10 = rot[1, 0], r11 = rot[1, 1], r12 = rot[1, 2]
    cdef double r20 = rot[2, 0], r21 = rot[2, 1], r22 = rot[2, 2]
    cdef double t0 = trans[0], t1 = trans[1], t2 = trans[2]
    cdef double x, y, z, xc, yc, zc
    cdef Py_ssize_t i
    for i in range(n):
        x = positions[i, 0]
        y = positions[i, 1]
        z = positions[i, 2]
        xc = r00 * x + r01 * y + r02 * z + t0
        yc = r10 * x + r11 * y + r12 * z + t1
        zc = r20 * x + r21 * y + r22 * z + t2
        u[i] = fx * (xc / zc) + cx
        v[i] = fy * (yc / zc) + cy
        zv[i] = zc
    return u_arr, v_arr, z_arr


cdef inline double _bilinear_one(float[:, ::1] values, Py_ssize_t h,
                                 Py_ssize_t w, double uu, double vv) nogil:
    cdef double x0 = floor(uu)
    cdef double y0 = floor(vv)
    cdef double fu = uu - x0
    cdef double fv = vv - y0
    cdef Py_ssize_t x0i = <Py_ssize_t>x0
    cdef Py_ssize_t y0i = <Py_ssize_t>y0
    cdef Py_ssize_t x1i = x0i + 1
    cdef Py_ssize_t y1i = y0i + 1
    if x1i > w - 1:
        x1i = w - 1
    if y1i > h - 1:
        y1i = h - 1
    cdef double m00 = <double>values[y0i, x0i]
    cdef double m01 = <double>values[y0i, x1i]
    cdef double m10 = <double>values[y1i, x0i]
    cdef double m11 = <double>values[y1i, x1i]
    cdef double top = m00 + fu * (m01 - m00)
    cdef double bot = m10 + fu * (m11 - m10)
    return top + fv * (bot - top)


def sample_bilinear_many(float[:, ::1] values, double[::1] u, double[::1] v):
    cdef Py_ssize_t h = values.shape[0]
    cdef Py_ssize_t w = values.shape[1]
    cdef Py_ssize_t n = u.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = _bilinear_one(values, h, w, u[i], v[i])
    return out_arr


def visible_mask(double[:, ::1] positions, double[:, ::1] rot,
                 double[::1] trans, double fx, double fy, double cx, double cy,
                 float[:, ::1] depth, double rel_tol, double abs_tol):
    cdef Py_ssize_t n = positions.shape[0]
    cdef Py_ssize_t h = depth.shape[0]
    cdef Py_ssize_t w = depth.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] out = out_arr
    cdef double r00 = rot[0, 0], r01 = rot[0, 1], r02 = rot[0, 2]
    cdef double r10 = rot[1, 0], r11 = rot[1, 1], r12 = rot[1, 2]
    cdef double r20 = rot[2, 0], r21 = rot[2, 1], r22 = rot[2, 2]
    cdef double t0 = trans[0], t1 = trans[1], t2 = trans[2]
    cdef double x, y, z, xc, yc, zc, u, v, d
    cdef Py_ssize_t i, px, py
    for i in range(n):
        x = positions[i, 0]
        y = positions[i, 1]
        z = positions[i, 2]
        xc = r00 * x + r01 * y + r02 * z + t0
        yc = r10 * x + r11 * y + r12 * z + t1
        zc = r20 * x + r21 * y + r22 * z + t2
        if zc <= 0.0:
            continue
        u = fx * (xc / zc) + cx
        v = fy * (yc / zc) + cy
        if u < 0.0 or u > w - 1.0 or v < 0.0 or v > h - 1.0:
            continue
        px = <Py_ssize_t>floor(u + 0.5)
        py = <Py_ssize_t>floor(v + 0.5)
        d = <double>depth[py, px]
        # reject NaN / non-positive / infinite depth samples
        if not (d > 0.0) or d - d != 0.0:
            continue
        if fabs(zc - d) <= rel_tol * d + abs_tol:
            out[i] = 1
    return out_arr.view(bool)


def accumulate_view(double[:, ::1] positions, double[:, ::1] rot,
                    double[::1] trans, double fx, double fy, double cx, double cy,
                    float[:, ::1] depth, float[:, ::1] heat,
                    double rel_tol, double abs_tol,
                    double[::1] acc, cnp.uint32_t[::1] cnt, int mode):
    cdef Py_ssize_t n = positions.shape[0]
    cdef Py_ssize_t h = depth.shape[0]
    cdef Py_ssize_t w = depth.shape[1]
    cdef double r00 = rot[0, 0], r01 = rot[0, 1], r02 = rot[0, 2]
    cdef double r10 = rot[1, 0], r11 = rot[1, 1], r12 = rot[1, 2]
    cdef double r20 = rot[2, 0], r21 = rot[2, 1], r22 = rot[2, 2]
    cdef double t0 = trans[0], t1 = trans[1], t2 = trans[2]
    cdef double x, y, z, xc, yc, zc, u, v, d, s
    cdef Py_ssize_t i, px, py
    for i in range(n):
        x = positions[i, 0]
        y = positions[i, 1]
        z = positions[i, 2]
        xc = r00 * x + r01 * y + r02 * z + t0
        yc = r10 * x + r11 * y + r12 * z + t1
        zc = r20 * x + r21 * y + r22 * z + t2
        if zc <= 0.0:
            continue
        u = fx * (xc / zc) + cx
        v = fy * (yc / zc) + cy
        if u < 0.0 or u > w - 1.0 or v < 0.0 or v > h - 1.0:
            continue
        px = <Py_ssize_t>floor(u + 0.5)
        py = <Py_ssize_t>floor(v + 0.5)
        d = <double>depth[py, px]
        if not (d > 0.0) or d - d != 0.0:
            continue
        if fabs(zc - d) > rel_tol * d + abs_tol:
            continue
        s = _bilinear_one(heat, h, w, u, v)
        if mode == ACCUM_ADD:
            acc[i] += s
        else:
            if s > acc[i]:
                acc[i] = s
        cnt[i] += 1


def fps_select(double[:, ::1] positions, Py_ssize_t k, Py_ssize_t start):
    cdef Py_ssize_t n = positions.shape[0]
    if k > n:
        k = n
    cdef cnp.ndarray[cnp.int64_t, ndim=1] sel_arr = np.empty(k, dtype=np.int64)
    cdef cnp.int64_t[::1] sel = sel_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dmin_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] dmin = dmin_arr
    cdef double dx, dy, dz, d, best
    cdef Py_ssize_t i, t, cur, nxt
    sel[0] = start
    cur = start
    for i in range(n):
        dx = positions[i, 0] - positions[cur, 0]
        dy = positions[i, 1] - positions[cur, 1]
        dz = positions[i, 2] - positions[cur, 2]
        dmin[i] = dx * dx + dy * dy + dz * dz
    for t in range(1, k):
        nxt = 0
        best = dmin[0]
        for i in range(1, n):
            if dmin[i] > best:
                best = dmin[i]
                nxt = i
        sel[t] = nxt
        for i in range(n):
            dx = positions[i, 0] - positions[nxt, 0]
            dy = positions[i, 1] - positions[nxt, 1]
            dz = positions[i, 2] - positions[nxt, 2]
            d = dx * dx + dy * dy + dz * dz
            if d < dmin[i]:
                dmin[i] = d
    return sel_arr


def splat_max(double[::1] u, double[::1] v, double[::1] heat,
              cnp.uint8_t[::1] visible, Py_ssize_t height, Py_ssize_t width,
              double radius):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] img_arr = np.zeros((height, width), dtype=np.float64)
    cdef double[:, ::1] img = img_arr
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t span = <Py_ssize_t>ceil(radius)
    cdef double r2 = radius * radius
    cdef double uu, vv, hh, dx, dy
    cdef Py_ssize_t i, bx, by, px, py, ox, oy
    for i in range(n):
        if not visible[i]:
            continue
        uu = u[i]
        vv = v[i]
        hh = heat[i]
        bx = <Py_ssize_t>floor(uu)
        by = <Py_ssize_t>floor(vv)
        for oy in range(-span, span + 2):
            py = by + oy
            if py < 0 or py >= height:
                continue
            dy = <double>py - vv
            for ox in range(-span, span + 2):
                px = bx + ox
                if px < 0 or px >= width:
                    continue
                dx = <double>px - uu
                if dx * dx + dy * dy <= r2:
                    if hh > img[py, px]:
                        img[py, px] = hh
    return img_arr
