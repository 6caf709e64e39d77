"""Scalar BFGS minimization with a Wolfe line search.

For a single decision variable the Hessian approximation is a positive
number ``h`` and the BFGS update

    h+ = h + y*y/(y*s) - h*s*s*h/(s*h*s)

reduces to the secant value ``y/s``. The update is skipped when the
curvature pair is unusable (``y*s`` near zero or a non-positive result),
which keeps ``h`` positive and every search direction a descent direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

Scalar = Callable[[float], float]

_LS_MAX_EVALS = 60
_STEP_GROWTH = 2.0
_MAX_STEP = 1e6


@dataclass
class MinimizeTrace:
    x: float
    fun: float
    grad: float
    iterations: int
    converged: bool
    stop_reason: str
    history: list = field(default_factory=list)


def bfgs_update(h: float, s: float, y: float) -> float:
    """One guarded scalar BFGS update of the Hessian approximation."""
    ys = y * s
    if abs(ys) < 1e-12 * abs(y) * abs(s) or ys == 0.0:
        return h
    shs = s * h * s
    if shs == 0.0:
        return h
    h_new = h + (y * y) / ys - (h * s * s * h) / shs
    if not math.isfinite(h_new) or h_new <= 0.0:
        return h
    return h_new


def wolfe_line_search(
    fun: Scalar,
    grad: Scalar,
    x: float,
    f0: float,
    g0: float,
    direction: float,
    c1: float = 1e-4,
    c2: float = 0.9,
    alpha0: float = 1.0,
):
    """Find a step satisfying the strong Wolfe conditions.

    Tries ``alpha0`` first, grows the step while the sufficient-decrease
    condition holds and the slope is still negative, then shrinks the
    bracket by bisection. Returns ``(alpha, f, g)`` or ``None`` if no
    acceptable step was found.
    """
    dphi0 = g0 * direction
    if dphi0 >= 0.0:
        return None

    evals = 0

    def phi(a):
        nonlocal evals
        evals += 1
        xa = x + a * direction
        return fun(xa), grad(xa)

    def armijo(a, fa):
        return fa <= f0 + c1 * a * dphi0

    def curvature(ga):
        return abs(ga * direction) <= -c2 * dphi0

    def zoom(lo, f_lo, g_lo, hi):
        while evals < _LS_MAX_EVALS:
            a = 0.5 * (lo + hi)
            if a == lo or a == hi:
                break
            fa, ga = phi(a)
            if not armijo(a, fa) or fa >= f_lo:
                hi = a
                continue
            if curvature(ga):
                return a, fa, ga
            if ga * direction * (hi - lo) >= 0.0:
                hi = lo
            lo, f_lo, g_lo = a, fa, ga
        # best sufficient-decrease step found so far, if any
        if lo > 0.0:
            return lo, f_lo, g_lo
        return None

    a_prev, f_prev, g_prev = 0.0, f0, g0
    a = alpha0
    first = True
    while evals < _LS_MAX_EVALS:
        fa, ga = phi(a)
        if not armijo(a, fa) or (not first and fa >= f_prev):
            return zoom(a_prev, f_prev, g_prev, a)
        if curvature(ga):
            return a, fa, ga
        if ga * direction >= 0.0:
            return zoom(a, fa, ga, a_prev)
        a_prev, f_prev, g_prev = a, fa, ga
        a = min(a * _STEP_GROWTH, _MAX_STEP)
        first = False
    return None


def minimize_scalar_bfgs(
    fun: Scalar,
    grad: Scalar,
    x0: float,
    h0: float = 1.0,
    tol: float = 1e-8,
    max_iterations: int = 200,
    c1: float = 1e-4,
    c2: float = 0.9,
) -> MinimizeTrace:
    """Minimize ``fun`` from ``x0``.

    Stops when ``|grad| <= tol`` (reason ``"gradient"``) or when an accepted
    step changes the objective by at most ``tol * (1 + |f|)`` (reason
    ``"objective"``). Running out of iterations or failing the line search
    returns the last iterate with ``converged=False``.
    """
    x = float(x0)
    f = fun(x)
    g = grad(x)
    h = float(h0)
    history = [(x, f)]
    if abs(g) <= tol:
        return MinimizeTrace(x, f, g, 0, True, "gradient", history)

    for j in range(max_iterations):
        direction = -g / h
        step = wolfe_line_search(fun, grad, x, f, g, direction, c1, c2)
        if step is None:
            return MinimizeTrace(x, f, g, j, False, "line_search", history)
        alpha, f_new, g_new = step
        s = alpha * direction
        h = bfgs_update(h, s, g_new - g)
        change = f_new - f
        x, f, g = x + s, f_new, g_new
        history.append((x, f))
        if abs(g) <= tol:
            return MinimizeTrace(x, f, g, j + 1, True, "gradient", history)
        if abs(change) <= tol * (1.0 + abs(f)):
            return MinimizeTrace(x, f, g, j + 1, True, "objective", history)
    return MinimizeTrace(x, f, g, max_iterations, False, "max_iterations", history)
