"""Dense two-phase revised simplex for small/medium LPs.

Self-contained on purpose: desk-scale problems, deterministic pivoting
(Dantzig with lowest-index ties, Bland fallback on stall), explicit basis
inverse with periodic refactorization.  Variables in the public interface
are free; nonnegative-variable programs use the internal wrapper.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_MAXITER = 100_000


class StatusKind(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITER_LIMIT = "IterLimit"
    NO_INTERSECTION = "NoIntersection"  # hull-slice problems only


@dataclass(frozen=True)
class SolveStatus:
    kind: StatusKind
    iterations: int = 0
    certificate: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.kind is StatusKind.OPTIMAL


class _Tableau:
    """Standard-form state: min c.z  s.t.  A z = b (b >= 0), z >= 0."""

    def __init__(self, A, b, seed_cols, maxiter):
        self.m, self.N = A.shape
        # explicit artificial block: column N + i is e_i
        self.A = np.hstack([A, np.eye(self.m)])
        self.b = b.astype(float).copy()
        self.maxiter = maxiter
        self.iterations = 0
        self.Binv = np.eye(self.m)
        self.xB = self.b.copy()
        self.basis = np.empty(self.m, dtype=int)
        self.artificial_used = []
        for i in range(self.m):
            if seed_cols[i] >= 0:
                self.basis[i] = seed_cols[i]
            else:
                self.basis[i] = self.N + i
                self.artificial_used.append(self.N + i)

    def _refactor(self):
        B = self.A[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            self.Binv = np.linalg.pinv(B)
        self.xB = self.Binv @ self.b

    def _pivot(self, leave, enter, d):
        theta = self.xB[leave] / d[leave]
        self.xB -= theta * d
        self.xB[leave] = theta
        row = self.Binv[leave] / d[leave]
        self.Binv -= np.outer(d, row)
        self.Binv[leave] = row
        self.basis[leave] = enter

    def run(self, cost, allowed_mask, scale):
        """Simplex iterations for one phase.  Returns 'optimal'/'unbounded'/'iterlimit'."""
        tol_red = 1e-10 * (1.0 + scale)
        tol_piv = 1e-11
        stall = 0
        bland = False
        last_obj = np.inf
        is_artificial = np.arange(self.N + self.m) >= self.N
        while True:
            if self.iterations >= self.maxiter:
                return "iterlimit"
            self.iterations += 1
            if self.iterations % 200 == 0:
                self._refactor()
            pi = cost[self.basis] @ self.Binv
            reduced = cost - pi @ self.A
            reduced[self.basis] = 0.0
            candidates = np.where(allowed_mask & (reduced < -tol_red))[0]
            if candidates.size == 0:
                return "optimal"
            if bland:
                enter = int(candidates[0])
            else:
                enter = int(candidates[np.argmin(reduced[candidates])])
            d = self.Binv @ self.A[:, enter]

            # keep zero-valued artificials pinned: a negative direction
            # component on such a row forces a degenerate swap-out
            art_rows = np.where(
                is_artificial[self.basis] & (d < -tol_piv) & (self.xB <= 1e-9)
            )[0]
            if art_rows.size:
                leave = int(art_rows[0])
                self._pivot(leave, enter, d)
                continue

            pos = np.where(d > tol_piv)[0]
            if pos.size == 0:
                self._last_enter = enter
                self._last_dir = d
                return "unbounded"
            ratios = self.xB[pos] / d[pos]
            best = ratios.min()
            ties = pos[np.where(ratios <= best + tol_piv)[0]]
            if bland:
                leave = int(ties[np.argmin(self.basis[ties])])
            else:
                leave = int(ties[0])
            self._pivot(leave, enter, d)

            obj = float(cost[self.basis] @ self.xB)
            if obj < last_obj - 1e-12 * (1.0 + scale):
                stall = 0
            else:
                stall += 1
                if stall > 2 * (self.m + self.N):
                    bland = True
            last_obj = obj

    def solution(self):
        z = np.zeros(self.N + self.m)
        z[self.basis] = self.xB
        return z

    def ray(self):
        r = np.zeros(self.N + self.m)
        r[self._last_enter] = 1.0
        r[self.basis] -= self._last_dir
        return r


def solve_standard(c, A, b, seed_cols, maxiter=DEFAULT_MAXITER):
    """Two-phase simplex on min c.z s.t. A z = b, z >= 0 with b >= 0.

    seed_cols[i] gives a column equal to +e_i usable as initial basis for
    row i, or -1 to request an artificial.  Returns (status, z, duals).
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    tab = _Tableau(A, b, seed_cols, maxiter)
    m, N = tab.m, tab.N
    scale_b = float(np.abs(b).max()) if b.size else 0.0

    allowed = np.zeros(N + m, dtype=bool)
    allowed[:N] = True
    phase1_duals = None
    if tab.artificial_used:
        cost1 = np.zeros(N + m)
        cost1[N:] = 1.0
        outcome = tab.run(cost1, allowed, 1.0)
        if outcome == "iterlimit":
            return SolveStatus(StatusKind.ITER_LIMIT, tab.iterations), None, None
        obj1 = float(cost1[tab.basis] @ tab.xB)
        phase1_duals = cost1[tab.basis] @ tab.Binv
        if obj1 > 1e-9 * (1.0 + scale_b):
            return (
                SolveStatus(StatusKind.INFEASIBLE, tab.iterations, phase1_duals),
                None,
                None,
            )
        # drive removable artificials out via degenerate pivots
        for i in range(m):
            if tab.basis[i] >= N:
                row = tab.Binv[i] @ A
                nz = np.where(np.abs(row) > 1e-9)[0]
                if nz.size:
                    d = tab.Binv @ tab.A[:, nz[0]]
                    tab._pivot(i, int(nz[0]), d)
        tab._refactor()

    cost2 = np.concatenate([c, np.zeros(m)])
    scale_c = float(np.abs(c).max()) if c.size else 0.0
    outcome = tab.run(cost2, allowed, scale_c)
    if outcome == "iterlimit":
        return SolveStatus(StatusKind.ITER_LIMIT, tab.iterations), None, None
    if outcome == "unbounded":
        return (
            SolveStatus(StatusKind.UNBOUNDED, tab.iterations, tab.ray()[:N]),
            tab.solution()[:N],
            None,
        )
    duals = cost2[tab.basis] @ tab.Binv
    return SolveStatus(StatusKind.OPTIMAL, tab.iterations), tab.solution()[:N], duals


def _canonical_rows(constraints):
    """Normalize to <=/== form: returns (a, rhs, is_eq) triples."""
    rows = []
    for a, rel, rhs in constraints:
        a = np.asarray(a, dtype=float)
        if rel in ("<=", "le"):
            rows.append((a, float(rhs), False))
        elif rel in (">=", "ge"):
            rows.append((-a, -float(rhs), False))
        elif rel in ("==", "=", "eq"):
            rows.append((a, float(rhs), True))
        else:
            raise ValueError(f"unknown relation {rel!r}")
    return rows


def lp_solve(objective, constraints, maxiter=DEFAULT_MAXITER):
    """Minimize objective . x over free x subject to linear constraints.

    ``constraints`` is a list of (vector, relation, scalar) with relation in
    {"<=", ">=", "=="}.  Returns (SolveStatus, x); x is None unless the
    status is Optimal or Unbounded (then x is the last feasible iterate and
    the certificate holds an improving ray).
    """
    c = np.asarray(objective, dtype=float)
    n = c.shape[0]
    rows = _canonical_rows(constraints)
    m = len(rows)
    n_slack = sum(0 if is_eq else 1 for _, _, is_eq in rows)
    N = 2 * n + n_slack
    A = np.zeros((m, N))
    b = np.zeros(m)
    seed = np.full(m, -1, dtype=int)
    flip = np.ones(m)
    si = 0
    for i, (a, rhs, is_eq) in enumerate(rows):
        A[i, :n] = a
        A[i, n : 2 * n] = -a
        if not is_eq:
            A[i, 2 * n + si] = 1.0
        b[i] = rhs
        if rhs < 0:
            A[i] = -A[i]
            b[i] = -rhs
            flip[i] = -1.0
        elif not is_eq:
            seed[i] = 2 * n + si
        if not is_eq:
            si += 1

    cost = np.concatenate([c, -c, np.zeros(n_slack)])
    status, z, duals = solve_standard(cost, A, b, seed, maxiter)
    if status.kind is StatusKind.INFEASIBLE:
        # Farkas certificate for the canonical <=/== rows: y with
        # y >= 0 on inequalities, sum y_i a_i = 0 and sum y_i rhs_i < 0.
        y = -flip * status.certificate if status.certificate is not None else None
        return SolveStatus(status.kind, status.iterations, y), None
    if z is None:
        return status, None
    x = z[:n] - z[n : 2 * n]
    if status.kind is StatusKind.UNBOUNDED:
        ray = status.certificate
        ray_x = ray[:n] - ray[n : 2 * n]
        return SolveStatus(status.kind, status.iterations, ray_x), x
    return SolveStatus(status.kind, status.iterations, None), x


def lp_solve_nonneg(objective, A_ub=None, b_ub=None, A_eq=None, b_eq=None,
                    maxiter=DEFAULT_MAXITER):
    """Minimize objective . w for w >= 0 with A_ub w <= b_ub, A_eq w = b_eq."""
    c = np.asarray(objective, dtype=float)
    n = c.shape[0]
    ub = (np.zeros((0, n)), np.zeros(0)) if A_ub is None else (
        np.atleast_2d(np.asarray(A_ub, dtype=float)), np.atleast_1d(np.asarray(b_ub, dtype=float)))
    eq = (np.zeros((0, n)), np.zeros(0)) if A_eq is None else (
        np.atleast_2d(np.asarray(A_eq, dtype=float)), np.atleast_1d(np.asarray(b_eq, dtype=float)))
    m_ub, m_eq = ub[0].shape[0], eq[0].shape[0]
    m = m_ub + m_eq
    N = n + m_ub
    A = np.zeros((m, N))
    b = np.zeros(m)
    seed = np.full(m, -1, dtype=int)
    A[:m_ub, :n] = ub[0]
    A[:m_ub, n:] = np.eye(m_ub)
    b[:m_ub] = ub[1]
    A[m_ub:, :n] = eq[0]
    b[m_ub:] = eq[1]
    for i in range(m):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]
        elif i < m_ub:
            seed[i] = n + i
    cost = np.concatenate([c, np.zeros(m_ub)])
    status, z, _ = solve_standard(cost, A, b, seed, maxiter)
    if z is None:
        return status, None
    w = z[:n]
    if status.kind is StatusKind.UNBOUNDED:
        return SolveStatus(status.kind, status.iterations, status.certificate[:n]), w
    return status, w
