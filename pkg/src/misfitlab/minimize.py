"""Limited-memory quasi-Newton descent with a feasibility-gated line search.

The admissible set (positive orientation on every cell) is open, so interior
descent is well defined: any trial step that leaves it is rejected by the
backtracking loop exactly like an insufficient-decrease step.  The objective
is never modified; no barrier term is added.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np


@dataclass
class MinimizeResult:
    x: np.ndarray
    f: float
    grad_norm: float
    iterations: int
    n_eval: int
    converged: bool
    message: str
    energy_trace: list = field(default_factory=list)


def lbfgs_feasible(fg, x0, feasible, grad_tol=1e-9, max_iter=100000,
                   memory=10, armijo=1e-4, backtrack=0.5,
                   max_backtracks=60, trace=False) -> MinimizeResult:
    """Minimize f over the open feasible set, starting from a feasible x0.

    fg(x) -> (f, grad); feasible(x) -> bool.  Stops when the euclidean
    gradient norm falls below grad_tol.  Every accepted step strictly
    decreases f and stays feasible.
    """
    x = np.asarray(x0, dtype=float).copy()
    if not feasible(x):
        raise ValueError("lbfgs_feasible requires a feasible starting point")
    f, g = fg(x)
    n_eval = 1
    sy: deque = deque(maxlen=memory)
    energy_trace = [f] if trace else []
    it = 0
    message = "max iterations reached"
    converged = False

    while it < max_iter:
        gnorm = float(np.linalg.norm(g))
        if gnorm <= grad_tol:
            converged = True
            message = "gradient norm below tolerance"
            break
        p = -_two_loop(g, sy)
        if np.dot(p, g) >= 0:
            sy.clear()
            p = -g
        alpha = 1.0 if sy else min(1.0, 1.0 / gnorm)
        gp = float(np.dot(g, p))

        accepted = False
        for _ in range(max_backtracks):
            x_new = x + alpha * p
            if feasible(x_new):
                f_new, g_new = fg(x_new)
                n_eval += 1
                if f_new <= f + armijo * alpha * gp and f_new < f:
                    accepted = True
                    break
            alpha *= backtrack
        if not accepted:
            if sy:
                sy.clear()   # retry along steepest descent before giving up
                continue
            message = "line search failed"
            break

        s = x_new - x
        y = g_new - g
        sty = float(np.dot(s, y))
        if sty > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            sy.append((s, y, sty))
        x, f, g = x_new, f_new, g_new
        if trace:
            energy_trace.append(f)
        it += 1

    return MinimizeResult(x=x, f=f, grad_norm=float(np.linalg.norm(g)),
                          iterations=it, n_eval=n_eval, converged=converged,
                          message=message, energy_trace=energy_trace)


def _two_loop(g, sy) -> np.ndarray:
    """Standard L-BFGS two-loop recursion for H*g."""
    q = g.copy()
    alphas = []
    for s, y, sty in reversed(sy):
        a = np.dot(s, q) / sty
        alphas.append(a)
        q -= a * y
    if sy:
        s, y, sty = sy[-1]
        q *= sty / np.dot(y, y)
    for (s, y, sty), a in zip(sy, reversed(alphas)):
        b = np.dot(y, q) / sty
        q += (a - b) * s
    return q
