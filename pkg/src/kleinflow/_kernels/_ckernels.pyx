# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled plane-wave summation kernels."""
from libc.math cimport cos, sin
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline void _sum_one(double x0, double x1, const double[::1] p,
                          const double[::1] E, const double complex[::1] c1,
                          const double complex[::1] c2, double* out) noexcept nogil:
    cdef Py_ssize_t j, n = p.shape[0]
    cdef double ph, cs, sn
    cdef double a1r = 0.0, a1i = 0.0, a2r = 0.0, a2i = 0.0
    for j in range(n):
        ph = p[j] * x1 - E[j] * x0
        cs = cos(ph)
        sn = sin(ph)
        a1r += c1[j].real * cs - c1[j].imag * sn
        a1i += c1[j].real * sn + c1[j].imag * cs
        a2r += c2[j].real * cs - c2[j].imag * sn
        a2i += c2[j].real * sn + c2[j].imag * cs
    out[0] = a1r
    out[1] = a1i
    out[2] = a2r
    out[3] = a2i


def plane_wave_sum(const double[::1] x0, const double[::1] x1,
                   const double[::1] p, const double[::1] E,
                   const double complex[::1] c1, const double complex[::1] c2):
    cdef Py_ssize_t m, npts = x0.shape[0]
    cdef double buf[4]
    psi1 = np.empty(npts, dtype=np.complex128)
    psi2 = np.empty(npts, dtype=np.complex128)
    cdef double complex[::1] o1 = psi1
    cdef double complex[::1] o2 = psi2
    with nogil:
        for m in range(npts):
            _sum_one(x0[m], x1[m], p, E, c1, c2, buf)
            o1[m] = buf[0] + 1j * buf[1]
            o2[m] = buf[2] + 1j * buf[3]
    return psi1, psi2


def current_at(double x0, double x1, const double[::1] p, const double[::1] E,
               const double complex[::1] c1, const double complex[::1] c2):
    cdef double buf[4]
    cdef double a, b
    with nogil:
        _sum_one(x0, x1, p, E, c1, c2, buf)
    a = buf[0] * buf[0] + buf[1] * buf[1]
    b = buf[2] * buf[2] + buf[3] * buf[3]
    return a + b, a - b
