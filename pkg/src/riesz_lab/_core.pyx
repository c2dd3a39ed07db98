# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: ordered-pair energies, gradients, Metropolis blocks.

Mirrors riesz_lab._purepy; the pure lane is the reference implementation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, isfinite, log, pow, sqrt, INFINITY

cnp.import_array()


cdef inline double _g(double r2, double s, bint is_log) nogil:
    if is_log:
        return -0.5 * log(r2)
    return pow(r2, -0.5 * s)


def pair_energy(cnp.ndarray[cnp.float64_t, ndim=2] pts, double s, bint is_log):
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double r2, diff, acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for k in range(d):
                diff = pts[i, k] - pts[j, k]
                r2 += diff * diff
            if r2 == 0.0:
                return INFINITY
            acc += _g(r2, s, is_log)
    return 2.0 * acc


def pair_gradient(cnp.ndarray[cnp.float64_t, ndim=2] pts, double s, bint is_log):
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grad = np.zeros((n, d))
    cdef Py_ssize_t i, j, k
    cdef double r2, w, diff
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for k in range(d):
                diff = pts[i, k] - pts[j, k]
                r2 += diff * diff
            if r2 == 0.0:
                raise FloatingPointError("coincident points in gradient evaluation")
            if is_log:
                w = -1.0 / r2
            else:
                w = -s * pow(r2, -0.5 * s - 1.0)
            for k in range(d):
                diff = pts[i, k] - pts[j, k]
                grad[i, k] += 2.0 * w * diff
                grad[j, k] -= 2.0 * w * diff
    return grad


def total_energy(cnp.ndarray[cnp.float64_t, ndim=2] pts, double s, bint is_log,
                 double v_coeff):
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef Py_ssize_t i, k
    cdef double v = 0.0
    for i in range(n):
        for k in range(d):
            v += pts[i, k] * pts[i, k]
    return pair_energy(pts, s, is_log) + n * v_coeff * v


def total_gradient(cnp.ndarray[cnp.float64_t, ndim=2] pts, double s, bint is_log,
                   double v_coeff):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grad = pair_gradient(pts, s, is_log)
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef Py_ssize_t i, k
    for i in range(n):
        for k in range(d):
            grad[i, k] += 2.0 * n * v_coeff * pts[i, k]
    return grad


def mh_block(cnp.ndarray[cnp.float64_t, ndim=2] pts, double s, bint is_log,
             double v_coeff, double beta, double sigma,
             cnp.ndarray[cnp.int64_t, ndim=1] sites,
             cnp.ndarray[cnp.float64_t, ndim=2] normals,
             cnp.ndarray[cnp.float64_t, ndim=1] uniforms,
             double energy_in):
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1], m = sites.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] energies = np.empty(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x_new = np.empty(d)
    cdef Py_ssize_t t, i, j, k
    cdef double energy = energy_in
    cdef double e_old, e_new, r2o, r2n, diff, dh, q_old, q_new
    cdef long acc = 0
    cdef bint collide, take
    for t in range(m):
        i = sites[t]
        q_old = 0.0
        q_new = 0.0
        for k in range(d):
            x_new[k] = pts[i, k] + sigma * normals[t, k]
            q_old += pts[i, k] * pts[i, k]
            q_new += x_new[k] * x_new[k]
        e_old = 0.0
        e_new = 0.0
        collide = False
        for j in range(n):
            if j == i:
                continue
            r2o = 0.0
            r2n = 0.0
            for k in range(d):
                diff = pts[i, k] - pts[j, k]
                r2o += diff * diff
                diff = x_new[k] - pts[j, k]
                r2n += diff * diff
            if r2n == 0.0:
                collide = True
                break
            e_old += _g(r2o, s, is_log)
            e_new += _g(r2n, s, is_log)
        if collide:
            energies[t] = energy
            continue
        dh = 2.0 * (e_new - e_old) + n * v_coeff * (q_new - q_old)
        if dh <= 0.0:
            take = True
        elif isfinite(dh):
            take = uniforms[t] < exp(-beta * dh)
        else:
            take = False
        if take:
            for k in range(d):
                pts[i, k] = x_new[k]
            energy += dh
            acc += 1
        energies[t] = energy
    return energies, acc
