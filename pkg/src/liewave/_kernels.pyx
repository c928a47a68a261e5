# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled ODE kernel for the blow-up oracle."""

from libc.math cimport fabs, pow, isfinite


def integrate_blowup(double p, double u, double v, double h_max, double eta,
                     double u_stop, long max_steps):
    """Classical RK4 for ``U'' = |U|^p`` with rate-matched steps.

    Mirrors :func:`liewave._kernels_py.integrate_blowup`.
    """
    cdef double t = 0.0, h, expo = -(p - 1.0) / 2.0
    cdef double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v, u2, u3, u4
    cdef long steps = 0
    while u < u_stop and steps < max_steps:
        h = h_max
        if u > 0.0:
            h = min(h_max, eta * pow(u, expo))
        k1u = v
        k1v = pow(fabs(u), p)
        u2 = u + 0.5 * h * k1u
        k2u = v + 0.5 * h * k1v
        k2v = pow(fabs(u2), p)
        u3 = u + 0.5 * h * k2u
        k3u = v + 0.5 * h * k2v
        k3v = pow(fabs(u3), p)
        u4 = u + h * k3u
        k4u = v + h * k3v
        k4v = pow(fabs(u4), p)
        u = u + h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        v = v + h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        t += h
        steps += 1
        if not isfinite(u):
            break
    return t, u, v, steps
