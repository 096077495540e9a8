"""Central-difference derivatives with a fixed step rule.

All numeric differentiation in the engine goes through this module so
that every delta-method step uses the same accuracy/rounding trade-off:
per-coordinate step ``h = cbrt(eps) * max(1, |x_i|)``.
"""

import numpy as np

_STEP = float(np.cbrt(np.finfo(float).eps))


def steps(x):
    """Per-coordinate central-difference steps for a point ``x``."""
    x = np.asarray(x, dtype=float)
    return _STEP * np.maximum(1.0, np.abs(x))


def central_gradient(f, x):
    """Gradient of ``f`` at ``x`` by central differences.

    ``f`` must accept a batch: an ``(m, d)`` array of points, returning an
    ``(m,)`` array of values.  The 2d perturbed points are evaluated in a
    single call so the hot paths stay vectorised.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    h = steps(x)
    pts = np.repeat(x[None, :], 2 * d, axis=0)
    idx = np.arange(d)
    pts[2 * idx, idx] += h
    pts[2 * idx + 1, idx] -= h
    vals = np.asarray(f(pts), dtype=float)
    return (vals[0::2] - vals[1::2]) / (2.0 * h)


def central_hessian(f, x):
    """Hessian of scalar ``f`` at ``x`` (``f`` takes a single point here)."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    h = steps(x)
    hess = np.empty((d, d))
    f0 = f(x)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h[i]
        hess[i, i] = (f(x + 2 * ei) - 2.0 * f0 + f(x - 2 * ei)) / (4.0 * h[i] * h[i])
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = h[j]
            hess[i, j] = hess[j, i] = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return hess
