# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: dense matrix product and seeded Gaussian fill.

Bit-compatible with ocmeta._kernels_py by construction: identical operation
order, identical rounding (the build disables FP contraction), identical
xorshift64* / Box-Muller stream. Both backends call the platform libm for
log/cos/sin/sqrt, so their outputs match bit for bit on a given machine.
"""

from libc.math cimport M_PI, cos, log, sin, sqrt

cdef double TWO_PI = 2.0 * M_PI
# top 53 bits of a 64-bit word -> double in [0, 1)
cdef double INV_2_53 = 1.0 / 9007199254740992.0

cdef unsigned long long MULT = 0x2545F4914F6CDD1DULL


def matmul(double[:, ::1] a, double[:, ::1] b, double[:, ::1] out):
    """out = a @ b with the inner sum accumulated strictly in k order."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t kk = a.shape[1]
    cdef Py_ssize_t m = b.shape[1]
    cdef Py_ssize_t i, k, j
    cdef double aik
    with nogil:
        for i in range(n):
            for j in range(m):
                out[i, j] = 0.0
            for k in range(kk):
                aik = a[i, k]
                for j in range(m):
                    out[i, j] = out[i, j] + aik * b[k, j]


def gaussian_fill(unsigned long long state, bint has_spare, double spare,
                  double[:, ::1] out):
    """Fill out (row-major order) with standard normal draws.

    xorshift64* uniforms fed through the basic Box-Muller transform; the
    second draw of each pair is carried as a spare so that a fill of n
    elements consumes exactly the same stream as n scalar draws.
    Returns the updated (state, has_spare, spare) triple.
    """
    cdef Py_ssize_t rows = out.shape[0]
    cdef Py_ssize_t cols = out.shape[1]
    cdef Py_ssize_t i, j
    cdef unsigned long long r1, r2
    cdef double u1, u2, mag
    for i in range(rows):
        for j in range(cols):
            if has_spare:
                out[i, j] = spare
                has_spare = False
            else:
                state ^= state >> 12
                state ^= state << 25
                state ^= state >> 27
                r1 = state * MULT
                state ^= state >> 12
                state ^= state << 25
                state ^= state >> 27
                r2 = state * MULT
                # u1 in (0, 1] keeps log(u1) finite; u2 in [0, 1)
                u1 = <double> ((r1 >> 11) + 1) * INV_2_53
                u2 = <double> (r2 >> 11) * INV_2_53
                mag = sqrt(-2.0 * log(u1))
                out[i, j] = mag * cos(TWO_PI * u2)
                spare = mag * sin(TWO_PI * u2)
                has_spare = True
    return state, has_spare, spare
