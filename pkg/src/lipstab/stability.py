"""Stability analysis of block-perturbed linear systems.

Strong Slater certification (two independent routes), the feasible-set
distance formula, the exact Lipschitzian bound at a nominal solution, cone
membership and norm of the coderivative, and the eps-active reduction.

Extended-value conventions used throughout: sup over an empty slice is 0
(strong Slater anchors get bound 0) and 1/0 is +inf (bound +inf exactly when
the strong Slater condition fails).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InfeasibleAnchorError,
    InternalCheckError,
    NonConvergentError,
    SSCViolatedError,
)
from .model import (
    FEAS_TOL,
    BlockPartition,
    CharacteristicSet,
    LinearSystem,
    Perturbation,
    characteristic_generators,
    perturbed_system,
    validated,
)
from .solvers.minnorm import min_norm_point, min_norm_sliced_hull
from .solvers.ratio import max_ratio_over_hull
from .solvers.simplex import StatusKind, lp_solve, lp_solve_nonneg

REGIME_SLATER = "SlaterPoint"
REGIME_REGULAR = "Regular"
REGIME_SSC_FAILS = "SSCFails"


@dataclass(frozen=True)
class SSCReport:
    """Verdict of both strong-Slater routes; they must agree.

    ``zero_face_floor`` is min{sum lam_t b_t} over hull weights with
    sum lam_t a_t = 0 (+inf when no such weights exist); a nonpositive
    floor means the hull meets {0} x (-inf, 0], which by LP duality is
    exactly the failure of the strong Slater condition.  For consistent
    systems this collapses to the plain membership (0,0) in the hull.
    """

    holds: bool
    margin: float
    hull_gap: float
    slater_point: np.ndarray | None
    lp_holds: bool
    hull_holds: bool
    zero_face_floor: float = np.inf


@dataclass(frozen=True)
class LipReport:
    """Exact Lipschitzian bound of the feasible map at (0, anchor)."""

    bound: float
    regime: str
    minimizer: np.ndarray | None = None
    slice_weights: np.ndarray | None = None
    min_norm_value: float | None = None
    notes: tuple = ()


@dataclass(frozen=True)
class CoderivCertificate:
    """Cone weights witnessing a coderivative element."""

    cone_weights: np.ndarray
    p_star: tuple
    x_star: np.ndarray
    anchor_residual: float


@dataclass(frozen=True)
class CoderivNormReport:
    value: float
    certificate: CoderivCertificate | None
    lip_cross: float


@dataclass(frozen=True)
class EpsActiveResult:
    indices: tuple
    report: LipReport
    full_bound: float
    matches_full: bool


def check_ssc(system: LinearSystem, tol: float = FEAS_TOL) -> SSCReport:
    """Certify the strong Slater condition by two independent routes.

    LP route: minimize s subject to <a_t, x> - s <= b_t; SSC holds iff some
    feasible s is < -tol (an unbounded LP qualifies).  Hull route: SSC holds
    iff the min-norm point of co{(a_t, b_t)} stays away from the origin.
    Disagreement aborts with diagnostics.
    """
    validated(system)
    A = system.coefficient_matrix()
    b = system.rhs_vector()
    m, n = A.shape

    objective = np.zeros(n + 1)
    objective[n] = 1.0
    cons = [(np.concatenate([A[i], [-1.0]]), "<=", b[i]) for i in range(m)]
    status, z = lp_solve(objective, cons)
    if status.kind is StatusKind.ITER_LIMIT:
        raise NonConvergentError("SSC LP hit the pivot cap")
    if status.kind is StatusKind.UNBOUNDED:
        ray = status.certificate
        step = (abs(z[n]) + 1.0) / max(-ray[n], 1e-300)
        witness = z[:n] + step * ray[:n]
        margin = float((A @ witness - b).max())
    else:
        witness = z[:n]
        margin = float(z[n])
    lp_holds = margin < -tol

    hull_gap, _, _, _, _ = min_norm_point(np.hstack([A, b[:, None]]))
    floor = _zero_face_floor(A, b)
    hull_holds = hull_gap > tol and floor > tol

    if lp_holds != hull_holds:
        raise InternalCheckError(
            f"SSC verdicts disagree: LP margin {margin!r} vs hull gap {hull_gap!r} "
            f"(zero-face floor {floor!r})"
        )
    return SSCReport(
        holds=lp_holds,
        margin=margin,
        hull_gap=float(hull_gap),
        slater_point=witness if lp_holds else None,
        lp_holds=lp_holds,
        hull_holds=hull_holds,
        zero_face_floor=floor,
    )


def _zero_face_floor(A, b) -> float:
    """min b.lam over simplex weights with A^T lam = 0; +inf if none exist."""
    m, n = A.shape
    eq = np.vstack([A.T, np.ones((1, m))])
    rhs = np.concatenate([np.zeros(n), [1.0]])
    status, lam = lp_solve_nonneg(b, None, None, eq, rhs)
    if not status.optimal:
        return np.inf
    return float(b @ lam)


def _require_anchor(system: LinearSystem, anchor, tol: float) -> np.ndarray:
    anchor = np.asarray(anchor, dtype=float)
    res = system.residuals(anchor)
    if res.size and res.max() > tol:
        worst = int(np.argmax(res))
        raise InfeasibleAnchorError(
            f"anchor violates row {system.labels[worst]!r} by {float(res[worst]):g}"
        )
    return anchor


def distance_formula(system: LinearSystem, partition: BlockPartition,
                     p: Perturbation, x, tol: float = FEAS_TOL) -> float:
    """dist(x; F_J(p)) from the characteristic-set ratio formula.

    Requires the strong Slater condition for the perturbed system; in R^n
    the hull needs no closure, so the supremum runs over the plain convex
    hull of the generators.
    """
    validated(system, partition)
    pert = perturbed_system(system, partition, p)
    if not check_ssc(pert, tol).holds:
        raise SSCViolatedError("perturbed system fails the strong Slater condition")
    gens = characteristic_generators(system, partition, p)
    return max_ratio_over_hull(gens, x, system.norm)


def lip_bound(system: LinearSystem, anchor, tol: float = FEAS_TOL) -> LipReport:
    """Exact Lipschitzian bound of the feasible map at (0, anchor).

    Partition-independent: the computation consumes only the nominal
    characteristic set C(0).
    """
    validated(system)
    anchor = _require_anchor(system, anchor, tol)
    if not check_ssc(system, tol).holds:
        return LipReport(np.inf, REGIME_SSC_FAILS)
    gens = CharacteristicSet(
        system.coefficient_matrix(), system.rhs_vector(), system.labels
    )
    result = min_norm_sliced_hull(gens, anchor, system.norm, feas_tol=tol)
    if result.status is StatusKind.NO_INTERSECTION:
        return LipReport(0.0, REGIME_SLATER)
    value = result.value
    bound = np.inf if value <= 0.0 else 1.0 / value
    return LipReport(
        bound=float(bound),
        regime=REGIME_REGULAR,
        minimizer=result.point,
        slice_weights=result.weights,
        min_norm_value=float(value),
    )


def coderivative_member(system: LinearSystem, partition: BlockPartition, anchor,
                        p_star, x_star, tol: float = FEAS_TOL):
    """Decide (p*, -x*, -<x*, anchor>) in cone{(-delta_j, a_t, b_t)}.

    For finite systems the cone is finitely generated and closed, so the
    test is an LP feasibility problem in the weights mu >= 0.  Returns
    (member, certificate-or-None).
    """
    validated(system, partition)
    anchor = _require_anchor(system, anchor, tol)
    p_star = np.asarray(p_star, dtype=float)
    if p_star.shape != (len(partition.blocks),):
        raise ValueError("p_star must carry one value per block")
    x_star = np.asarray(x_star, dtype=float)
    A = system.coefficient_matrix()
    b = system.rhs_vector()
    m = A.shape[0]
    assign = np.array([partition.block_of()[t] for t in system.labels])

    eq_rows = []
    eq_rhs = []
    for j in range(len(partition.blocks)):
        row = (assign == j).astype(float)
        eq_rows.append(row)
        eq_rhs.append(-p_star[j])
    for k in range(system.dimension):
        eq_rows.append(A[:, k])
        eq_rhs.append(-x_star[k])
    eq_rows.append(b)
    eq_rhs.append(-float(x_star @ anchor))

    status, mu = lp_solve_nonneg(np.zeros(m), None, None,
                                 np.array(eq_rows), np.array(eq_rhs))
    if not status.optimal:
        return False, None
    resid = float(np.abs(np.array(eq_rows) @ mu - np.array(eq_rhs)).max())
    scale = 1.0 + float(np.abs(eq_rhs).max())
    if resid > 1e-7 * scale:
        return False, None
    return True, _certificate(mu, assign, len(partition.blocks), A, b, anchor)


def _certificate(mu, assign, n_blocks, A, b, anchor) -> CoderivCertificate:
    p_star = tuple(-float(mu[assign == j].sum()) for j in range(n_blocks))
    x_star = -A.T @ mu
    anchor_residual = abs(float(mu @ (A @ anchor - b)))
    return CoderivCertificate(mu, p_star, x_star, anchor_residual)


def _dual_ball_rows(A_act, dual_kind):
    """Polyhedral description of {mu : ||A^T mu||_dual <= 1} for l1/linf duals."""
    k, n = A_act.shape
    if dual_kind == "linf":
        ub = np.vstack([A_act.T, -A_act.T])
        return ub, np.ones(2 * n), k
    # dual l1 via auxiliary s: +-(A^T mu)_i <= s_i, sum s <= 1
    nv = k + n
    rows = []
    rhs = []
    for i in range(n):
        e = np.zeros(nv)
        e[:k] = A_act[:, i]
        e[k + i] = -1.0
        rows.append(e.copy())
        rhs.append(0.0)
        e2 = np.zeros(nv)
        e2[:k] = -A_act[:, i]
        e2[k + i] = -1.0
        rows.append(e2)
        rhs.append(0.0)
    cap = np.concatenate([np.zeros(k), np.ones(n)])
    rows.append(cap)
    rhs.append(1.0)
    return np.array(rows), np.array(rhs), nv


def coderivative_norm(system: LinearSystem, partition: BlockPartition, anchor,
                      tol: float = FEAS_TOL, max_cuts: int = 3000) -> CoderivNormReport:
    """sup { sum mu_t : mu >= 0, ||sum mu_t a_t||_dual <= 1, anchor identity }.

    Finite Dirac combinations make ||p*|| = sum mu_t for any partition.  The
    Euclidean ball is handled by outer cutting planes on top of the LP
    solver, a route independent of the quadratic path inside lip_bound; the
    two results are cross-asserted against the bound from lip_bound.
    """
    validated(system, partition)
    anchor = _require_anchor(system, anchor, tol)
    lip = lip_bound(system, anchor, tol)
    A = system.coefficient_matrix()
    b = system.rhs_vector()
    assign = np.array([partition.block_of()[t] for t in system.labels])
    n_blocks = len(partition.blocks)

    if lip.regime == REGIME_SSC_FAILS:
        return CoderivNormReport(np.inf, None, lip.bound)

    res = A @ anchor - b
    active = np.where(np.abs(res) <= tol)[0]
    if active.size == 0:
        mu = np.zeros(A.shape[0])
        cert = _certificate(mu, assign, n_blocks, A, b, anchor)
        _cross_assert(0.0, lip.bound)
        return CoderivNormReport(0.0, cert, lip.bound)

    A_act = A[active]
    k = active.size
    dual_kind = system.norm.dual().kind
    if dual_kind != "euclid":
        ub, rhs, nv = _dual_ball_rows(A_act, dual_kind)
        cost = np.zeros(nv)
        cost[:k] = -1.0
        status, mu_act = lp_solve_nonneg(cost, ub, rhs)
        if status.kind is StatusKind.UNBOUNDED:
            value = np.inf
            mu_full = None
        elif status.optimal:
            value = float(mu_act[:k].sum())
            mu_full = mu_act[:k]
        else:
            raise NonConvergentError(f"coderivative norm LP ended with {status.kind}")
    else:
        value, mu_full = _kelley_ball_max(A_act, max_cuts)

    if mu_full is None:
        cert = None
    else:
        mu = np.zeros(A.shape[0])
        mu[active] = mu_full
        cert = _certificate(mu, assign, n_blocks, A, b, anchor)
    _cross_assert(value, lip.bound)
    return CoderivNormReport(float(value), cert, lip.bound)


def _kelley_ball_max(A_act, max_cuts):
    """max sum(mu) over mu >= 0 with ||A_act^T mu||_2 <= 1 by outer cuts."""
    k, n = A_act.shape
    scale = 1.0 + float(np.abs(A_act).max())
    cuts: list[np.ndarray] = []
    cost = -np.ones(k)
    for _ in range(max_cuts):
        if cuts:
            ub = np.array([A_act @ v for v in cuts])
            status, mu = lp_solve_nonneg(cost, ub, np.ones(len(cuts)))
        else:
            status, mu = lp_solve_nonneg(cost, None, None)
        if status.kind is StatusKind.UNBOUNDED:
            ray = status.certificate[:k]
            w = A_act.T @ ray
            wn = float(np.linalg.norm(w))
            if wn <= 1e-12 * scale * max(1.0, float(ray.sum())):
                return np.inf, None
            cuts.append(w / wn)
            continue
        if not status.optimal:
            raise NonConvergentError(f"cutting-plane LP ended with {status.kind}")
        w = A_act.T @ mu
        wn = float(np.linalg.norm(w))
        upper = float(mu.sum())
        lower = upper / max(wn, 1.0)
        if wn <= 1.0 + 1e-9 or upper - lower <= 1e-9 * max(1.0, lower):
            return lower, mu / max(wn, 1.0)
        cuts.append(w / wn)
    raise NonConvergentError("coderivative-norm cutting planes hit the cap")


def _cross_assert(value: float, lip: float):
    if np.isinf(value) != np.isinf(lip):
        raise InternalCheckError(f"coderivative norm {value} vs lip bound {lip}")
    if np.isinf(value):
        return
    if abs(value - lip) > 1e-6 * max(1.0, lip):
        raise InternalCheckError(
            f"equality chain violated: coderivative norm {value!r}, lip bound {lip!r}"
        )


def eps_active(system: LinearSystem, anchor, eps: float,
               tol: float = FEAS_TOL) -> EpsActiveResult:
    """Indices within eps of tightness at the anchor and the reduced bound.

    The comparison <a_t, anchor> >= b_t - eps is strict arithmetic against
    the caller's eps; eps itself is the only slack.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    validated(system)
    anchor = _require_anchor(system, anchor, tol)
    res = system.residuals(anchor)
    labels = tuple(
        label for label, r in zip(system.labels, res) if r >= -eps
    )
    full = lip_bound(system, anchor, tol)
    if labels:
        sub_report = lip_bound(system.subsystem(labels), anchor, tol)
    else:
        # empty index set: empty hull, empty slice, sup over empty set is 0
        sub_report = LipReport(0.0, REGIME_SLATER)
    if np.isinf(sub_report.bound) or np.isinf(full.bound):
        matches = np.isinf(sub_report.bound) and np.isinf(full.bound)
    else:
        matches = abs(sub_report.bound - full.bound) <= 1e-9 * max(1.0, full.bound)
    return EpsActiveResult(labels, sub_report, full.bound, matches)
