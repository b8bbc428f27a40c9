# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled velocity-Verlet kernel for the quartic oscillator batch."""


def leapfrog(double[::1] x, double[::1] v, double eps, double dt, long nsteps):
    """Advance the batch (x, v) by nsteps velocity-Verlet steps, in place.

    Force is -Phi'(x) = -(x + 2*eps*x**3).
    """
    cdef Py_ssize_t i, n = x.shape[0]
    cdef long s
    cdef double xi, vi, a
    cdef double half = 0.5 * dt
    cdef double two_eps = 2.0 * eps
    with nogil:
        for i in range(n):
            xi = x[i]
            vi = v[i]
            a = -(xi + two_eps * xi * xi * xi)
            for s in range(nsteps):
                vi += half * a
                xi += dt * vi
                a = -(xi + two_eps * xi * xi * xi)
                vi += half * a
            x[i] = xi
            v[i] = vi
