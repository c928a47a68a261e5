"""Pure-Python twin of ``_kernels.pyx``; same arithmetic, same results."""

import math


def integrate_blowup(p, u, v, h_max, eta, u_stop, max_steps):
    """Classical RK4 for ``U'' = |U|^p`` with rate-matched steps.

    The step is ``min(h_max, eta * U^(-(p-1)/2))``, proportional to the
    remaining time near blow-up. Stops at the first step with ``U >= u_stop``
    and returns ``(t, U, V, steps)``.
    """
    t = 0.0
    steps = 0
    expo = -(p - 1.0) / 2.0
    while u < u_stop and steps < max_steps:
        h = h_max
        if u > 0.0:
            h = min(h_max, eta * u ** expo)
        k1u = v
        k1v = abs(u) ** p
        u2 = u + 0.5 * h * k1u
        k2u = v + 0.5 * h * k1v
        k2v = abs(u2) ** p
        u3 = u + 0.5 * h * k2u
        k3u = v + 0.5 * h * k2v
        k3v = abs(u3) ** p
        u4 = u + h * k3u
        k4u = v + h * k3v
        k4v = abs(u4) ** p
        u = u + h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        v = v + h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        t += h
        steps += 1
        if not math.isfinite(u):
            break
    return t, u, v, steps
