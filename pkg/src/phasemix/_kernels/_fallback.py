"""Pure-NumPy velocity-Verlet kernel, used when the extension is absent."""

import numpy as np


def leapfrog(x, v, eps, dt, nsteps):
    """Advance the batch (x, v) by nsteps velocity-Verlet steps, in place.

    Force is -Phi'(x) = -(x + 2*eps*x**3).  Arrays must be contiguous
    float64 of equal length.
    """
    half = 0.5 * dt
    a = -(x + 2.0 * eps * x * x * x)
    for _ in range(int(nsteps)):
        v += half * a
        x += dt * v
        np.multiply(x, x, out=a)
        a *= 2.0 * eps
        a += 1.0
        a *= x
        np.negative(a, out=a)
        v += half * a
