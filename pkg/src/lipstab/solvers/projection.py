"""Projection of a point onto a polyhedron {y : A y <= b}.

The Euclidean case runs a primal active-set method: starting from a feasible
point it alternates equality-constrained projections on the working set with
blocking-constraint steps, so every working set stays consistent and every
iterate stays feasible.  For l1/linf decision norms the distance is an LP in
an epigraph formulation.
"""
from __future__ import annotations

import numpy as np

from ..errors import InfeasibleRegionError, NonConvergentError
from ..norms import NormSpec
from .simplex import StatusKind, lp_solve


def _feasible_point(A, b):
    """Phase-1 LP witness that {A y <= b} is nonempty, or None."""
    n = A.shape[1]
    status, x = lp_solve(np.zeros(n), [(A[i], "<=", b[i]) for i in range(len(b))])
    if status.kind is StatusKind.INFEASIBLE:
        return None
    return x


def _eqp_step(x, A, b, work):
    """Minimizer of ||z - x|| s.t. A_W z = b_W, with its multipliers."""
    if not work:
        return x.copy(), np.zeros(0)
    Aw = A[work]
    M = Aw @ Aw.T
    r = Aw @ x - b[work]
    mu, *_ = np.linalg.lstsq(M, r, rcond=None)
    return x - Aw.T @ mu, mu


def _project_euclid(x, A, b, start, maxiter):
    res = A @ x - b
    if res.max() <= 0.0:
        return 0.0, x.copy()
    scale = 1.0 + float(np.abs(res).max())
    tol = 1e-11 * scale
    y = start.copy()
    resy = A @ y - b
    if resy.max() > 1e-7 * scale:
        raise InfeasibleRegionError("starting point is not feasible")
    work = list(np.where(resy > -tol)[0][: A.shape[1]])
    for _ in range(maxiter):
        z, mu = _eqp_step(x, A, b, work)
        p = z - y
        if float(np.abs(p).max(initial=0.0)) <= 1e-13 * (1.0 + np.abs(y).max()):
            if mu.size == 0 or mu.min() >= -tol:
                return float(np.linalg.norm(y - x)), y
            work.pop(int(np.argmin(mu)))
            continue
        Ap = A @ p
        gaps = b - A @ y
        blocking = [
            (gaps[i] / Ap[i], i)
            for i in range(A.shape[0])
            if i not in work and Ap[i] > tol
        ]
        alpha = min((g for g, _ in blocking), default=1.0)
        if alpha >= 1.0:
            y = z
            # constraints newly active at the unconstrained-on-W optimum
            continue
        alpha = max(alpha, 0.0)
        y = y + alpha * p
        hit = min(i for g, i in blocking if g <= alpha + tol)
        work.append(hit)
    raise NonConvergentError("projection active-set hit iteration cap")


def _project_lp(x, A, b, kind):
    m, n = A.shape
    cons = []
    if kind == "l1":
        # variables (y, s in R^n), minimize sum s, |y - x| <= s componentwise
        nv = 2 * n
        c = np.concatenate([np.zeros(n), np.ones(n)])
        for i in range(m):
            cons.append((np.concatenate([A[i], np.zeros(n)]), "<=", b[i]))
        for i in range(n):
            e = np.zeros(nv)
            e[i], e[n + i] = 1.0, -1.0
            cons.append((e, "<=", x[i]))
            e2 = np.zeros(nv)
            e2[i], e2[n + i] = -1.0, -1.0
            cons.append((e2, "<=", -x[i]))
    else:  # linf
        nv = n + 1
        c = np.zeros(nv)
        c[n] = 1.0
        for i in range(m):
            cons.append((np.concatenate([A[i], [0.0]]), "<=", b[i]))
        for i in range(n):
            e = np.zeros(nv)
            e[i], e[n] = 1.0, -1.0
            cons.append((e, "<=", x[i]))
            e2 = np.zeros(nv)
            e2[i], e2[n] = -1.0, -1.0
            cons.append((e2, "<=", -x[i]))
    status, z = lp_solve(c, cons)
    if not status.optimal:
        raise NonConvergentError(f"projection LP ended with {status.kind}")
    return float(c @ z), z[:A.shape[1]]


def project_polyhedron(x, rows, norm: NormSpec = NormSpec(), check_feasible: bool = True,
                       start=None, maxiter: int = 10_000):
    """Distance from x to {y : <a_t, y> <= b_t} and an attaining point.

    ``rows`` is a list of (coefficient vector, rhs).  ``start`` may supply a
    known feasible point, skipping the phase-1 LP.  Zero coefficient rows are
    vacuous when their rhs is >= 0 and make the region empty otherwise.
    Raises InfeasibleRegionError for an empty region.
    """
    x = np.asarray(x, dtype=float)
    A = np.array([np.asarray(a, dtype=float) for a, _ in rows]).reshape(len(rows), -1)
    b = np.array([float(v) for _, v in rows])
    keep = ~np.all(np.abs(A) < 1e-300, axis=1)
    if np.any(b[~keep] < -1e-12):
        raise InfeasibleRegionError("a zero row with negative rhs empties the region")
    A, b = A[keep], b[keep]
    if A.shape[0] == 0:
        return 0.0, x.copy()
    feas = None
    if start is not None:
        feas = np.asarray(start, dtype=float)
    elif check_feasible or norm.kind == "euclid":
        feas = _feasible_point(A, b)
        if feas is None:
            raise InfeasibleRegionError("polyhedron is empty")
    if norm.kind == "euclid":
        return _project_euclid(x, A, b, feas, maxiter)
    return _project_lp(x, A, b, norm.kind)
