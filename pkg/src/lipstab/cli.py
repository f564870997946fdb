"""Command-line interface.

Every analysis command prints a short human-readable summary followed by a
single machine-parsable verdict line; CSV reports go to --out.  Exit codes:
0 success, 2 validation/schema errors, 3 solver or sampling non-convergence.
Document-producing commands (demo, linearize) print clean JSON for piping.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .convex import CutConfig, distance_convex, lip_bound_convex, linearize
from .documents import (
    SystemDocument,
    build_models,
    demo_generate,
    fmt,
    parse_system,
    serialize_document,
    write_csv,
)
from .errors import (
    InfeasibleAnchorError,
    InfeasibleRegionError,
    NonConvergentError,
    OrderingViolationError,
    RetryExhaustedError,
    SchemaError,
    SSCViolatedError,
    ValidationError,
)
from .estimator import SamplingConfig, empirical_lip, partition_compare
from .model import BlockPartition, Perturbation
from .stability import (
    check_ssc,
    coderivative_norm,
    distance_formula,
    eps_active,
    lip_bound,
)

_VALIDATION_ERRORS = (SchemaError, ValidationError, InfeasibleAnchorError,
                      SSCViolatedError, InfeasibleRegionError, ValueError)
_CONVERGENCE_ERRORS = (NonConvergentError, OrderingViolationError, RetryExhaustedError)


def _parse_vector(text, name):
    if text is None:
        raise ValueError(f"--{name} is required for this command")
    try:
        return np.array([float(v) for v in text.split(",") if v.strip() != ""])
    except ValueError as exc:
        raise ValueError(f"--{name} must be a comma-separated number list") from exc


def _doc_notes(doc: SystemDocument):
    return (doc.truncation_note,) if doc.truncation_note else ()


def _emit(args, header, rows, human_lines, verdict):
    for line in human_lines:
        print(line)
    if args.out:
        write_csv(args.out, header, rows)
    print(verdict)
    return 0


def _cmd_ssc(args):
    doc = parse_system(args.system)
    system, _, _ = build_models(doc)
    rep = check_ssc(system, args.tol)
    human = [f"strong Slater condition: {'holds' if rep.holds else 'fails'}"]
    if rep.slater_point is not None:
        human.append("slater point: " + ",".join(fmt(v) for v in rep.slater_point))
    rows = [(rep.holds, rep.margin, rep.hull_gap)]
    verdict = f"ssc={fmt(rep.holds)} margin={fmt(rep.margin)} hull_gap={fmt(rep.hull_gap)}"
    return _emit(args, ["holds", "margin", "hull_gap"], rows, human, verdict)


def _cmd_dist(args):
    doc = parse_system(args.system)
    model, partition, _ = build_models(doc)
    x = _parse_vector(args.anchor, "anchor")
    if doc.is_convex:
        fs = model
        p = (_parse_vector(args.p, "p") if args.p
             else np.zeros(len(fs)))
        d = distance_convex(fs, p, x, CutConfig(seed=args.seed))
    else:
        k = len(partition.blocks)
        p_vals = _parse_vector(args.p, "p") if args.p else np.zeros(k)
        d = distance_formula(model, partition, Perturbation(tuple(p_vals)), x, args.tol)
        p = p_vals
    rows = [(d, ";".join(fmt(v) for v in x), ";".join(fmt(v) for v in p))]
    human = [f"distance to the feasible set: {fmt(d)}"]
    return _emit(args, ["distance", "point", "p"], rows, human, f"dist={fmt(d)}")


def _cmd_lip(args):
    doc = parse_system(args.system)
    model, partition, labels = build_models(doc)
    anchor = _parse_vector(args.anchor, "anchor")
    notes = _doc_notes(doc)
    if doc.is_convex:
        cfg = CutConfig(seed=args.seed, budget=args.budget)
        rep = lip_bound_convex(model, anchor, cfg, block_labels=list(labels))
        rows = [(rep.bound, rep.regime, " -> ".join(fmt(h) for h in rep.history),
                 "; ".join(notes + rep.notes))]
        human = [f"regime: {rep.regime}",
                 "refinement history: " + " -> ".join(fmt(h) for h in rep.history)]
        verdict = (f"lip={fmt(rep.bound)} regime={rep.regime} "
                   f"converged={fmt(rep.converged)}")
        code = 0 if rep.converged or not np.isfinite(rep.bound) else 3
        _emit(args, ["bound", "regime", "history", "note"], rows, human, verdict)
        return code
    rep = lip_bound(model, anchor, args.tol)
    support = ""
    if rep.slice_weights is not None:
        support = ";".join(
            l for l, w in zip(model.labels, rep.slice_weights) if w > 1e-10
        )
    rows = [(rep.bound, rep.regime,
             rep.min_norm_value if rep.min_norm_value is not None else "",
             support, "; ".join(notes))]
    human = [f"regime: {rep.regime}"]
    if support:
        human.append(f"slice support: {support}")
    for note in notes:
        human.append(f"note: {note}")
    return _emit(args, ["bound", "regime", "min_norm_value", "support", "note"],
                 rows, human, f"lip={fmt(rep.bound)} regime={rep.regime}")


def _cmd_codnorm(args):
    doc = parse_system(args.system)
    system, partition, _ = build_models(doc)
    anchor = _parse_vector(args.anchor, "anchor")
    rep = coderivative_norm(system, partition, anchor, args.tol)
    support = ""
    if rep.certificate is not None:
        support = ";".join(
            l for l, w in zip(system.labels, rep.certificate.cone_weights)
            if w > 1e-10
        )
    rows = [(rep.value, rep.lip_cross, support)]
    human = [f"coderivative norm matches the exact bound to {fmt(rep.lip_cross)}"]
    return _emit(args, ["value", "lip", "support"], rows, human,
                 f"codnorm={fmt(rep.value)} lip={fmt(rep.lip_cross)}")


def _cmd_eps_active(args):
    doc = parse_system(args.system)
    system, _, _ = build_models(doc)
    anchor = _parse_vector(args.anchor, "anchor")
    res = eps_active(system, anchor, args.eps, args.tol)
    ids = ",".join(res.indices)
    rows = [(args.eps, ids, res.report.bound, res.report.regime, res.full_bound,
             res.matches_full)]
    human = [f"eps-active rows: {ids or '(none)'}",
             f"reduced bound {fmt(res.report.bound)} vs full {fmt(res.full_bound)}"]
    verdict = (f"eps_active={ids} bound={fmt(res.report.bound)} "
               f"matches_full={fmt(res.matches_full)}")
    return _emit(args, ["eps", "indices", "bound", "regime", "full_bound",
                        "matches_full"], rows, human, verdict)


def _cmd_linearize(args):
    doc = parse_system(args.system)
    model, _, labels = build_models(doc)
    if not doc.is_convex:
        raise ValidationError("linearize expects a convex document")
    anchor = _parse_vector(args.anchor, "anchor")
    cfg = CutConfig(seed=args.seed, budget=args.budget)
    lin = linearize(model, cfg, anchor, block_labels=list(labels))
    rows = tuple((l, tuple(a), float(b)) for l, a, b in lin.system.rows)
    partition = tuple((j, tuple(m)) for j, m in lin.partition.blocks)
    out_doc = SystemDocument(doc.dimension, doc.norm, rows, partition, None,
                             doc.truncation_note)
    text = serialize_document(out_doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def _cmd_estimate(args):
    doc = parse_system(args.system)
    system, partition, _ = build_models(doc)
    anchor = _parse_vector(args.anchor, "anchor")
    cfg = SamplingConfig(
        radii=tuple(float(r) for r in args.radius_ladder.split(",")),
        samples_per_radius=args.samples,
        seed=args.seed,
        perturb_anchor=not args.fix_anchor,
    )
    rep = empirical_lip(system, partition, anchor, cfg, notes=_doc_notes(doc))
    note = "; ".join(rep.notes)
    rows = [
        (s.radius, s.max_quotient, s.samples, s.zero_over_zero, rep.estimate, note)
        for s in sorted(rep.per_radius, key=lambda s: s.radius)
    ]
    human = [
        f"radius {fmt(s.radius)}: max quotient {fmt(s.max_quotient)} "
        f"({s.zero_over_zero} of {s.samples} samples were 0/0)"
        for s in rep.per_radius
    ] + [f"note: {n}" for n in rep.notes]
    return _emit(args, ["radius", "max_quotient", "samples", "zero_over_zero",
                        "estimate", "note"], rows, human,
                 f"estimate={fmt(rep.estimate)}")


def _cmd_compare(args):
    doc = parse_system(args.system)
    system, partition, _ = build_models(doc)
    anchor = _parse_vector(args.anchor, "anchor")
    cfg = SamplingConfig(
        radii=tuple(float(r) for r in args.radius_ladder.split(",")),
        samples_per_radius=args.samples,
        seed=args.seed,
    )
    user_partitions = [partition] if doc.partition is not None else [
        _random_partition(system.labels, args.blocks, args.seed)
    ]
    try:
        rep = partition_compare(system, user_partitions, anchor, cfg)
    except OrderingViolationError as exc:
        if args.out:
            write_csv(args.out, ["partition", "bound_vs", "estimate", "other"],
                      [(n, other, e1, e2) for n, other, e1, e2 in exc.offending])
        raise
    rows = []
    for name, entry in rep.entries:
        for s in sorted(entry.per_radius, key=lambda s: s.radius):
            rows.append((name, s.radius, s.max_quotient, entry.estimate, rep.lip,
                         abs(entry.estimate - rep.lip) <= 0.05 * rep.lip + 1e-9
                         if np.isfinite(rep.lip) else True))
    human = [f"{name}: estimate {fmt(entry.estimate)} (exact bound {fmt(rep.lip)})"
             for name, entry in rep.entries]
    verdict = (f"ordered={fmt(rep.ordered)} converged={fmt(rep.converged)} "
               f"lip={fmt(rep.lip)}")
    return _emit(args, ["partition", "radius", "max_quotient", "estimate", "lip",
                        "within_slack"], rows, human, verdict)


def _random_partition(labels, k, seed):
    rng = np.random.default_rng((seed, len(labels)))
    order = list(labels)
    rng.shuffle(order)
    k = max(1, min(k, len(order)))
    blocks = []
    size = len(order) // k
    for i in range(k):
        chunk = order[i * size:] if i == k - 1 else order[i * size:(i + 1) * size]
        blocks.append((f"B{i}", tuple(chunk)))
    return BlockPartition(tuple(blocks))


def _cmd_demo(args):
    params = {}
    if args.N is not None:
        params["N"] = args.N
    if args.n is not None:
        params["n"] = args.n
    if args.m is not None:
        params["m"] = args.m
    params["seed"] = args.seed
    doc = demo_generate(args.name, **params)
    text = serialize_document(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def _add_common(sub, anchor=True):
    sub.add_argument("--system", default=None, help="system document path ('-' = stdin)")
    if anchor:
        sub.add_argument("--anchor", default=None, help='nominal point "x1,...,xn"')
    sub.add_argument("--out", default=None, help="CSV report path")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tol", type=float, default=1e-9)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lipstab",
        description="Exact Lipschitzian stability bounds for block-perturbed "
                    "linear and convex inequality systems.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("ssc", help="certify the strong Slater condition")
    _add_common(p, anchor=False)
    p.set_defaults(func=_cmd_ssc)

    p = subs.add_parser("dist", help="distance to the perturbed feasible set")
    _add_common(p)
    p.add_argument("--p", default=None, help='per-block perturbation "p1,...,pk"')
    p.set_defaults(func=_cmd_dist)

    p = subs.add_parser("lip", help="exact Lipschitzian bound at the anchor")
    _add_common(p)
    p.add_argument("--budget", type=int, default=64, help="convex cut budget")
    p.set_defaults(func=_cmd_lip)

    p = subs.add_parser("codnorm", help="coderivative norm (cross-checked)")
    _add_common(p)
    p.set_defaults(func=_cmd_codnorm)

    p = subs.add_parser("eps-active", help="eps-active rows and reduced bound")
    _add_common(p)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=_cmd_eps_active)

    p = subs.add_parser("linearize", help="conjugate-cut linearization document")
    _add_common(p)
    p.add_argument("--budget", type=int, default=64)
    p.set_defaults(func=_cmd_linearize)

    p = subs.add_parser("estimate", help="empirical quotient estimate")
    _add_common(p)
    p.add_argument("--radius-ladder", default="1e-1,1e-2,1e-3")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--fix-anchor", action="store_true",
                   help="perturb p only, keeping x at the anchor")
    p.set_defaults(func=_cmd_estimate)

    p = subs.add_parser("compare-partitions",
                        help="min/user/max partition estimates vs the exact bound")
    _add_common(p)
    p.add_argument("--radius-ladder", default="1e-2,1e-3")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--blocks", type=int, default=2,
                   help="random middle partition block count")
    p.set_defaults(func=_cmd_compare)

    p = subs.add_parser("demo", help="emit a built-in demo document")
    p.add_argument("name", choices=["paper-example", "convex-square",
                                    "convex-square-shifted", "random"])
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_demo)
    return parser


def run_cli(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _CONVERGENCE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
