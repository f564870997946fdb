"""Minimum-norm point over a convex hull, plus the anchored-slice variant.

The Euclidean path is Wolfe's active-set method in weight space; it
terminates finitely and solves each corral subproblem exactly.  For l1/linf
decision norms the dual-norm objective is polyhedral and both problems are
LPs, so that path never touches the quadratic machinery.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonConvergentError
from ..norms import NormSpec, norm_value
from .simplex import StatusKind, lp_solve_nonneg


@dataclass(frozen=True)
class MinNormResult:
    status: StatusKind
    value: float
    weights: np.ndarray | None
    point: np.ndarray | None
    kkt_residual: float
    iterations: int


def _affine_min_norm(G_S):
    """Weights minimizing ||Q_S^T alpha|| over the affine hull (sum alpha = 1)."""
    k = G_S.shape[0]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = G_S
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    return sol[:k]


def min_norm_point(points, maxiter: int = 100_000):
    """Wolfe's algorithm: argmin ||u|| over u in co{points} (Euclidean norm).

    Returns (value, u, weights, kkt_residual, iterations).
    """
    Q = np.atleast_2d(np.asarray(points, dtype=float))
    m = Q.shape[0]
    sq = np.einsum("ij,ij->i", Q, Q)
    scale = 1.0 + float(sq.max(initial=0.0))
    tol = 1e-12 * scale
    start = int(np.argmin(sq))
    support = [start]
    lam_s = np.array([1.0])
    iterations = 0
    while iterations < maxiter:
        iterations += 1
        u = Q[support].T @ lam_s
        ip = Q @ u
        uu = float(u @ u)
        t = int(np.argmin(ip))
        if ip[t] >= uu - tol or t in support:
            break
        support.append(t)
        lam_s = np.append(lam_s, 0.0)
        while True:
            G = Q[support] @ Q[support].T
            alpha = _affine_min_norm(G)
            if alpha.min() > 1e-12:
                lam_s = alpha
                break
            diff = lam_s - alpha
            steps = [
                lam_s[i] / diff[i]
                for i in range(len(support))
                if alpha[i] <= 1e-12 and diff[i] > 1e-15
            ]
            theta = min(steps, default=0.0)
            lam_s = lam_s + theta * (alpha - lam_s)
            keep = [i for i in range(len(support)) if lam_s[i] > 1e-12]
            if not keep:
                keep = [int(np.argmax(lam_s))]
            support = [support[i] for i in keep]
            lam_s = lam_s[keep]
            lam_s = lam_s / lam_s.sum()
    else:
        raise NonConvergentError("Wolfe min-norm point hit iteration cap")

    u = Q[support].T @ lam_s
    weights = np.zeros(m)
    weights[support] = lam_s
    value = float(np.linalg.norm(u))
    kkt = max(0.0, float(u @ u) - float((Q @ u).min())) / scale
    return value, u, weights, kkt, iterations


def _lp_min_dual_norm(A, dual_kind, eq_rows=None, eq_rhs=None):
    """min ||A^T lam||_dual over the simplex (plus optional equalities on lam).

    Returns (value, lam).  ``dual_kind`` is the norm applied to A^T lam.
    """
    m, n = A.shape
    if dual_kind == "linf":
        nv = m + 1
        c = np.zeros(nv)
        c[m] = 1.0
        ub_rows, ub_rhs = [], []
        for k in range(n):
            row = np.concatenate([A[:, k], [-1.0]])
            ub_rows.append(row)
            ub_rhs.append(0.0)
            ub_rows.append(np.concatenate([-A[:, k], [-1.0]]))
            ub_rhs.append(0.0)
    elif dual_kind == "l1":
        nv = m + n
        c = np.concatenate([np.zeros(m), np.ones(n)])
        ub_rows, ub_rhs = [], []
        for k in range(n):
            e = np.zeros(nv)
            e[:m] = A[:, k]
            e[m + k] = -1.0
            ub_rows.append(e.copy())
            ub_rhs.append(0.0)
            e2 = np.zeros(nv)
            e2[:m] = -A[:, k]
            e2[m + k] = -1.0
            ub_rows.append(e2)
            ub_rhs.append(0.0)
    else:
        raise ValueError(dual_kind)
    eqs = [np.concatenate([np.ones(m), np.zeros(nv - m)])]
    rhs = [1.0]
    if eq_rows is not None:
        for row, r in zip(eq_rows, eq_rhs):
            eqs.append(np.concatenate([row, np.zeros(nv - m)]))
            rhs.append(r)
    status, z = lp_solve_nonneg(c, np.array(ub_rows), np.array(ub_rhs),
                                np.array(eqs), np.array(rhs))
    if status.kind is StatusKind.INFEASIBLE:
        return None, None
    if not status.optimal:
        raise NonConvergentError(f"dual-norm LP ended with {status.kind}")
    return float(c @ z), z[:m]


def _polish_sliced(A, g, lam, support_tol=1e-10):
    """Exact KKT solve of min ||A^T lam||^2 on the support found by the homotopy."""
    support = np.where(lam > support_tol)[0]
    k = support.size
    if k == 0:
        return None
    G = A[support] @ A[support].T
    kkt = np.zeros((k + 2, k + 2))
    kkt[:k, :k] = G
    kkt[:k, k] = 1.0
    kkt[:k, k + 1] = g[support]
    kkt[k, :k] = 1.0
    kkt[k + 1, :k] = g[support]
    rhs = np.zeros(k + 2)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    cand = sol[:k]
    if cand.min() < -1e-9 or abs(cand.sum() - 1.0) > 1e-7:
        return None
    if abs(float(g[support] @ cand)) > 1e-8 * (1.0 + float(np.abs(g).max())):
        return None
    full = np.zeros(len(lam))
    full[support] = np.maximum(cand, 0.0)
    return full


def _canonical_support(A, g, value_point, lam, sliced: bool):
    """Reduce the support toward the lexicographically smallest one.

    Drops higher-index atoms first whenever the optimal hull point stays
    representable; a tie-break documented for reproducibility, with no
    semantic content.  Skipped for large generator counts.
    """
    m = A.shape[0]
    if m > 64:
        return lam
    n = A.shape[1]

    def representable(allowed):
        idx = sorted(allowed)
        if not idx:
            return None
        eq = [A[idx].T[k] for k in range(n)]
        rhs = list(value_point)
        eq.append(np.ones(len(idx)))
        rhs.append(1.0)
        if sliced:
            eq.append(g[idx])
            rhs.append(0.0)
        status, w = lp_solve_nonneg(np.zeros(len(idx)), None, None,
                                    np.array(eq), np.array(rhs))
        if status.optimal and float(np.abs(A[idx].T @ w - value_point).max()) < 1e-7:
            return w
        return None

    allowed = set(np.where(lam > 1e-12)[0])
    best = lam
    for t in sorted(allowed, reverse=True):
        trial = allowed - {t}
        w = representable(trial)
        if w is not None:
            allowed = trial
            best = np.zeros(m)
            best[sorted(allowed)] = w
    return best


def min_norm_sliced_hull(generators, anchor, norm: NormSpec = NormSpec(),
                         feas_tol: float = 1e-9, canonicalize: bool = True):
    """min ||u||_dual over hull points (u, a) of the generators with <u, anchor> = a.

    The slice constraint sum(lam_t g_t) = 0 with g_t = <a_t, anchor> - beta_t
    is eliminated exactly when every g_t has one sign (support confined to
    the active generators); mixed signs fall back to a quadratic penalty
    homotopy polished by an exact KKT step.  Status NoIntersection means the
    slice is empty: for a feasible anchor that makes it a strong Slater
    point of the generator system.
    """
    A = np.atleast_2d(np.asarray(generators.coefficients, dtype=float))
    beta = np.asarray(generators.offsets, dtype=float)
    x = np.asarray(anchor, dtype=float)
    g = A @ x - beta
    m = A.shape[0]
    if m == 0:
        return MinNormResult(StatusKind.NO_INTERSECTION, np.inf, None, None, 0.0, 0)

    active = np.abs(g) <= feas_tol
    has_neg = bool((g < -feas_tol).any())
    has_pos = bool((g > feas_tol).any())
    if not active.any() and not (has_neg and has_pos):
        return MinNormResult(StatusKind.NO_INTERSECTION, np.inf, None, None, 0.0, 0)

    dual_kind = norm.dual().kind
    if not (has_neg and has_pos):
        idx = np.where(active)[0]
        sub = A[idx]
        if dual_kind == "euclid":
            value, u, w_sub, kkt, iters = min_norm_point(sub)
        else:
            value, w_sub = _lp_min_dual_norm(sub, dual_kind)
            u = sub.T @ w_sub
            kkt, iters = 0.0, 0
        weights = np.zeros(m)
        weights[idx] = w_sub
    else:
        if dual_kind == "euclid":
            weights, u, iters = _penalty_homotopy(A, g)
            value = float(np.linalg.norm(u))
            kkt = 0.0
        else:
            value, weights = _lp_min_dual_norm(A, dual_kind, eq_rows=[g], eq_rhs=[0.0])
            if value is None:
                return MinNormResult(StatusKind.NO_INTERSECTION, np.inf, None, None, 0.0, 0)
            u = A.T @ weights
            kkt, iters = 0.0, 0

    if canonicalize:
        weights = _canonical_support(A, g, u, weights, sliced=True)
        u = A.T @ weights
        value = norm_value(dual_kind, u)
    return MinNormResult(StatusKind.OPTIMAL, value, weights, u, kkt, iters)


def _penalty_homotopy(A, g, target: float = 1e-10, max_rounds: int = 120):
    """Doubling quadratic penalty on the slice constraint, Euclid norm."""
    gscale = 1.0 + float(np.abs(g).max())
    rho = (1.0 + float(np.einsum("ij,ij->i", A, A).max())) / gscale**2
    total_iters = 0
    lam = None
    for _ in range(max_rounds):
        aug = np.hstack([A, (np.sqrt(rho) * g)[:, None]])
        _, _, lam, _, iters = min_norm_point(aug)
        total_iters += iters
        if abs(float(g @ lam)) < target * gscale:
            break
        rho *= 2.0
    else:
        raise NonConvergentError("slice penalty homotopy did not reach tolerance")
    polished = _polish_sliced(A, g, lam)
    if polished is not None:
        if np.linalg.norm(A.T @ polished) <= np.linalg.norm(A.T @ lam) + 1e-12:
            lam = polished
    return lam, A.T @ lam, total_iters
