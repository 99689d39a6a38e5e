"""Smooth concave maximization by limited-memory quasi-Newton ascent.

The barrier subproblems are smooth and concave on an open domain but
badly conditioned near the boundary, so plain gradient steps stall.
L-BFGS directions with monotone Armijo backtracking handle that; the
objective callback returns -inf outside the domain and such trial points
are simply rejected by the line search.  States are lists of numpy
arrays (complex allowed) compared under the real inner product, so
complex precoder stacks and real scalars mix freely.
"""

from __future__ import annotations

import numpy as np

ARMIJO_SLOPE = 1e-4
STEP_SHRINK = 0.5
MAX_BACKTRACKS = 60
LBFGS_MEMORY = 12


def vdot(a, b) -> float:
    """Real inner product over a list of arrays."""
    return float(sum(np.real(np.vdot(x, y)) for x, y in zip(a, b)))


def vaxpy(x, t, g):
    """x + t * g over a list of arrays."""
    return [xi + t * gi for xi, gi in zip(x, g)]


def vscale(x, t):
    return [t * xi for xi in x]


def vnorm(a) -> float:
    return np.sqrt(max(vdot(a, a), 0.0))


def _lbfgs_direction(g, pairs):
    """Two-loop recursion: approximate inverse-Hessian times gradient.

    ``pairs`` holds (s, y, rho) for the *descent* problem on -f, i.e.
    y = -(g_new - g_old), which concavity keeps positively curved.
    """
    q = [np.copy(gi) for gi in g]
    alphas = []
    for s, y, rho in reversed(pairs):
        alpha = rho * vdot(s, q)
        alphas.append(alpha)
        q = vaxpy(q, -alpha, y)
    if pairs:
        s, y, _ = pairs[-1]
        scale = vdot(s, y) / max(vdot(y, y), 1e-300)
        q = vscale(q, scale)
    for (s, y, rho), alpha in zip(pairs, reversed(alphas)):
        beta = rho * vdot(y, q)
        q = vaxpy(q, alpha - beta, s)
    return q


def maximize_concave(fun, x0, gtol, max_iters=400, gtol_rel=1e-4, ftol=0.0):
    """Ascend ``fun`` from the strictly feasible point ``x0``.

    ``fun(x) -> (value, grad)`` with value -inf (grad ignored) outside
    the domain.  Stops once the gradient norm falls below
    ``max(gtol, gtol_rel * initial gradient norm)``, once the line
    search can make no further progress, or (with ``ftol`` > 0) after
    several consecutive accepted steps whose objective gain stays below
    ``ftol * (1 + |f|)``.  Returns (x, value, grad, iterations,
    converged).
    """
    x = x0
    f, g = fun(x)
    if not np.isfinite(f):
        raise ValueError("inner maximizer needs a strictly feasible start")
    threshold = max(gtol, gtol_rel * vnorm(g))

    pairs = []
    stalls = 0
    it = 0
    for it in range(1, max_iters + 1):
        gnorm = vnorm(g)
        if gnorm <= threshold:
            return x, f, g, it - 1, True

        d = _lbfgs_direction(g, pairs)
        slope = vdot(g, d)
        if not np.isfinite(slope) or slope <= 0:
            d = g
            slope = gnorm ** 2
        t0 = 1.0 if pairs else 1.0 / max(gnorm, 1.0)

        t = t0
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            x_new = vaxpy(x, t, d)
            f_new, g_new = fun(x_new)
            if np.isfinite(f_new) and f_new >= f + ARMIJO_SLOPE * t * slope:
                accepted = True
                break
            t *= STEP_SHRINK
        if not accepted:
            # No acceptable ascent step exists at working precision.
            return x, f, g, it, True

        if ftol > 0.0 and f_new - f <= ftol * (1.0 + abs(f)):
            stalls += 1
            if stalls >= 5:
                return x_new, f_new, g_new, it, True
        else:
            stalls = 0

        s = vaxpy(x_new, -1.0, x)
        y = vscale(vaxpy(g_new, -1.0, g), -1.0)
        sy = vdot(s, y)
        if sy > 1e-12 * vnorm(s) * vnorm(y):
            pairs.append((s, y, 1.0 / sy))
            if len(pairs) > LBFGS_MEMORY:
                pairs.pop(0)
        x, f, g = x_new, f_new, g_new

    return x, f, g, it, False
