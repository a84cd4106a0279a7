"""NumPy fallback for the compiled kernels in _kernels.pyx.

Every operation here mirrors the compiled code step for step so the two
backends agree bit for bit: same accumulation order, one rounding per
multiply and per add, same xorshift64* / Box-Muller stream through the
platform libm (math.log/cos/sin/sqrt wrap the same libm the C code calls).
"""

from math import cos, log, pi, sin, sqrt

import numpy as np

TWO_PI = 2.0 * pi
INV_2_53 = 1.0 / 9007199254740992.0

_MASK64 = 0xFFFFFFFFFFFFFFFF
_MULT = 0x2545F4914F6CDD1D


def matmul(a, b, out):
    """out = a @ b with the inner sum accumulated strictly in k order."""
    out[:] = 0.0
    # rank-1 updates: per element this is the same mul-then-add sequence,
    # in the same k order, as the compiled triple loop
    for k in range(a.shape[1]):
        out += a[:, k : k + 1] * b[k : k + 1, :]


def _next_u64(state):
    state ^= state >> 12
    state ^= (state << 25) & _MASK64
    state ^= state >> 27
    return state, (state * _MULT) & _MASK64


def gaussian_fill(state, has_spare, spare, out):
    """Fill out (row-major order) with standard normal draws.

    Same stream contract as the compiled version; returns the updated
    (state, has_spare, spare) triple.
    """
    flat = out.reshape(-1)
    for i in range(flat.shape[0]):
        if has_spare:
            flat[i] = spare
            has_spare = False
        else:
            state, r1 = _next_u64(state)
            state, r2 = _next_u64(state)
            u1 = ((r1 >> 11) + 1) * INV_2_53
            u2 = (r2 >> 11) * INV_2_53
            mag = sqrt(-2.0 * log(u1))
            flat[i] = mag * cos(TWO_PI * u2)
            spare = mag * sin(TWO_PI * u2)
            has_spare = True
    return state, has_spare, spare
