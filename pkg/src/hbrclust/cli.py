"""Command-line interface: cluster, bench, verify-theory, gen."""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import math
import os
import sys
import time

import numpy as np

from . import theory
from .baselines import matched_accuracy, oracle_centroids, spherical_kmeans
from .contrasts import EmpiricalObjective, contrast_from_spec
from .datasets import (LabeledDataset, gen_circles, gen_sbm, load_csv,
                       normalize_unit_std, save_adjacency_csv, save_csv)
from .embedding import embed_graph
from .errors import HbrError, InputError, NumericalError
from .graph import LaplacianKind, Partition, cut_costs, gaussian_similarity
from .hbr import HbrEnumConfig, HbrOptConfig, assign_clusters, hbr_enum, hbr_opt

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_VERIFICATION = 4

ALGORITHMS = ("hbropt", "hbrenum", "kmeans", "oracle")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HBR_THREADS", "1")))
    except ValueError:
        return 1


class StageError(Exception):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")

    @property
    def exit_code(self) -> int:
        if isinstance(self.cause, NumericalError):
            return EXIT_NUMERICAL
        return EXIT_INPUT


def run_pipeline(cfg: dict) -> dict:
    """Execute load -> kernel -> embed -> recover -> metrics for one config."""
    stage = "load"
    try:
        truth = None
        if cfg["source"] == "circles":
            ds = gen_circles(cfg["seed"])
            graph = None
        elif cfg["source"] == "sbm":
            graph, truth = gen_sbm(cfg["seed"])
            ds = None
        elif cfg["source"] == "csv":
            ds = load_csv(cfg["path"], label_column=cfg.get("label_column"))
            graph = None
        else:
            raise InputError(f"unknown source {cfg['source']!r}")
        if ds is not None:
            truth = ds.labels
            if cfg.get("normalize"):
                stage = "normalize"
                ds = normalize_unit_std(ds)

        if graph is None:
            stage = "kernel"
            graph = gaussian_similarity(ds.points, cfg["alpha"], cfg.get("radius"))

        stage = "embed"
        kind = LaplacianKind.from_name(cfg["laplacian"])
        emb = embed_graph(graph, cfg["m"], kind)

        stage = "recover"
        algo = cfg["algo"]
        centers = None
        objective_values = None
        converged = None
        if algo in ("hbropt", "hbrenum"):
            contrast = contrast_from_spec(cfg["contrast"])
            obj = EmpiricalObjective(contrast, emb.X)
            if algo == "hbropt":
                basis = hbr_opt(obj, cfg["m"], HbrOptConfig(
                    eta=cfg.get("eta", 0.1), tol=cfg.get("tol", 1e-8),
                    max_iters=cfg.get("max_iters", 1000), seed=cfg["seed"],
                ))
            else:
                basis = hbr_enum(obj, cfg["m"],
                                 HbrEnumConfig(delta=cfg.get("delta", 3 * math.pi / 8)))
            labels = assign_clusters(basis, emb)
            centers = basis.centers.tolist()
            objective_values = [float(v) for v in basis.objective_values]
            converged = list(basis.converged)
        elif algo == "kmeans":
            labels = spherical_kmeans(emb, cfg["m"], seed=cfg["seed"],
                                      restarts=cfg.get("restarts", 1))
        elif algo == "oracle":
            if truth is None:
                raise InputError("oracle baseline needs ground-truth labels")
            labels = oracle_centroids(emb, truth)
        else:
            raise InputError(f"unknown algorithm {algo!r}")

        stage = "metrics"
        costs = cut_costs(graph, labels)
        accuracy = None
        if truth is not None:
            report = matched_accuracy(labels, truth)
            accuracy = {
                "accuracy": report.accuracy,
                "matching": list(report.matching),
                "confusion": report.confusion.tolist(),
            }
        return {
            "schema": 1,
            "config": cfg,
            "labels": labels.labels.tolist(),
            "centers": centers,
            "objective_values": objective_values,
            "converged": converged,
            "eigengap": emb.eigengap,
            "eigenvalues": [float(v) for v in emb.eigenvalues],
            "cut_costs": {
                "cut": costs.cut,
                "ratio_cut": costs.ratio_cut if math.isfinite(costs.ratio_cut) else None,
                "ncut": costs.ncut if math.isfinite(costs.ncut) else None,
                "has_empty_cluster": costs.has_empty_cluster,
            },
            "accuracy": accuracy,
        }
    except HbrError as exc:
        raise StageError(stage, exc) from exc
    except FileNotFoundError as exc:
        raise StageError(stage, InputError(str(exc))) from exc


def _config_from_args(args) -> dict:
    cfg = {
        "source": "csv" if args.input else args.gen,
        "laplacian": args.laplacian,
        "m": args.m,
        "algo": args.algo,
        "contrast": args.contrast,
        "seed": args.seed,
        "normalize": args.normalize,
        "alpha": args.alpha,
        "eta": args.eta,
        "tol": args.tol,
        "max_iters": args.max_iters,
        "delta": args.delta,
        "restarts": args.restarts,
    }
    if args.input:
        cfg["path"] = args.input
        cfg["label_column"] = args.label_column
    if args.radius is not None:
        cfg["radius"] = args.radius
    return cfg


def _emit_json(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_heatmap(path: str, emb, contrast_spec: str, samples: int = 20_000) -> None:
    if emb.m != 3:
        raise InputError("heat-map sampling requires m = 3")
    contrast = contrast_from_spec(contrast_spec)
    obj = EmpiricalObjective(contrast, emb.X)
    i = np.arange(samples)
    phi = math.pi * (3.0 - math.sqrt(5.0))
    z = 1.0 - 2.0 * (i + 0.5) / samples
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    pts = np.column_stack([r * np.cos(phi * i), r * np.sin(phi * i), z])
    vals = obj.value_many(pts.T)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u1", "u2", "u3", "F"])
        for p, v in zip(pts, vals):
            writer.writerow([repr(float(p[0])), repr(float(p[1])),
                             repr(float(p[2])), repr(float(v))])


def cmd_cluster(args) -> int:
    cfg = _config_from_args(args)
    started = time.perf_counter()
    try:
        result = run_pipeline(cfg)
    except StageError as exc:
        _emit_json({"schema": 1, "error": str(exc.cause), "stage": exc.stage,
                    "config": cfg}, args.output)
        return exc.exit_code
    if args.timing:
        result["timing"] = {"seconds": time.perf_counter() - started}
    if args.heatmap:
        kind = LaplacianKind.from_name(cfg["laplacian"])
        if cfg["source"] == "sbm":
            graph, _ = gen_sbm(cfg["seed"])
        else:
            ds = gen_circles(cfg["seed"]) if cfg["source"] == "circles" else \
                load_csv(cfg["path"], label_column=cfg.get("label_column"))
            if cfg.get("normalize"):
                ds = normalize_unit_std(ds)
            graph = gaussian_similarity(ds.points, cfg["alpha"], cfg.get("radius"))
        _write_heatmap(args.heatmap, embed_graph(graph, cfg["m"], kind),
                       cfg["contrast"])
    _emit_json(result, args.output)
    return EXIT_OK


def _bench_row(index: int, row: dict) -> dict:
    runs = int(row.get("runs", 25))
    base_seed = int(row.get("seed", 0))
    accuracies = []
    seconds = []
    failures = []
    for r in range(runs):
        cfg = dict(row)
        cfg.pop("runs", None)
        cfg["seed"] = base_seed + r
        cfg.setdefault("normalize", False)
        started = time.perf_counter()
        try:
            result = run_pipeline(cfg)
            seconds.append(time.perf_counter() - started)
            if result["accuracy"] is None:
                failures.append(f"seed {cfg['seed']}: no ground truth")
            else:
                accuracies.append(result["accuracy"]["accuracy"])
        except StageError as exc:
            failures.append(f"seed {cfg['seed']}: {exc}")
    out = {
        "index": index,
        "source": row.get("source", ""),
        "laplacian": row.get("laplacian", ""),
        "m": row.get("m", ""),
        "algo": row.get("algo", ""),
        "contrast": row.get("contrast", ""),
        "runs": runs,
        "accuracy_mean": repr(float(np.mean(accuracies))) if accuracies else "",
        "accuracy_sd": repr(float(np.std(accuracies, ddof=1)))
        if len(accuracies) > 1 else "",
        "seconds_mean": repr(float(np.mean(seconds))) if seconds else "",
        "failures": "; ".join(failures),
    }
    return out


BENCH_COLUMNS = ["index", "source", "laplacian", "m", "algo", "contrast",
                 "runs", "accuracy_mean", "accuracy_sd", "seconds_mean",
                 "failures"]


def cmd_bench(args) -> int:
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read manifest: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not isinstance(manifest, list):
        print("error: manifest must be a JSON list of run configs", file=sys.stderr)
        return EXIT_INPUT

    rows: list[dict | None] = [None] * len(manifest)
    workers = _threads()
    if manifest:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_bench_row, i, row): i
                for i, row in enumerate(manifest)
            }
            for fut in concurrent.futures.as_completed(futures):
                rows[futures[fut]] = fut.result()

    out = open(args.output, "w", newline="", encoding="utf-8") if args.output \
        else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def _check_enumeration(args) -> dict:
    contrast = contrast_from_spec(args.contrast)
    results = []
    passed = True
    for i in range(args.objectives):
        wb = theory.random_weighted_basis(args.m, contrast, [args.seed, i])
        cert = theory.enumerate_until_stable(
            wb, [args.seed, i, 1], reference=wb.directions)
        entry = {
            "objective": i,
            "classes": cert.n_classes,
            "expected": 2 * args.m,
            "spurious": len(cert.spurious),
            "max_angular_error": max(cert.angular_errors)
            if cert.angular_errors else None,
        }
        # classes are counted modulo sign, so m classes stand for 2m maxima
        ok = cert.n_classes == args.m and not cert.spurious
        if args.m <= 3:
            grid = theory.grid_scan_maxima(wb, n_points=args.grid_points)
            extras = 0
            for cand in grid:
                best = min(
                    theory._angle_mod_sign(cand, z) for z in wb.directions
                )
                if best > 5e-2:
                    extras += 1
            entry["grid_candidates"] = int(grid.shape[0])
            entry["grid_extras"] = extras
            ok = ok and extras == 0
        entry["passed"] = ok
        passed = passed and ok
        results.append(entry)
    return {"check": "enumeration", "passed": passed, "contrast": contrast.name,
            "m": args.m, "objectives": results}


def _check_necessity_g2(args) -> dict:
    # the squared contrast makes the clustering objective constant
    square = theory.Contrast(
        name="square", g=lambda t: np.asarray(t, float) ** 2,
        dg=lambda t: 2.0 * np.asarray(t, float),
        d2g=lambda t: 2.0 * np.ones_like(np.asarray(t, float)),
        p1=False, p2=False,
    )
    rng = np.random.default_rng(args.seed)
    w = rng.uniform(0.2, 0.8, size=args.m)
    w /= w.sum()
    wb = theory.spectral_weights_objective(w, square)
    probes = rng.standard_normal((256, args.m))
    probes /= np.linalg.norm(probes, axis=1)[:, None]
    vals = np.array([wb.value(p) for p in probes])
    spread = float(vals.max() - vals.min())
    grads = [np.linalg.norm(wb.gradient(p) - p * (p @ wb.gradient(p)))
             for p in probes]
    passed = spread < 1e-10 and max(grads) < 1e-10
    return {"check": "necessity-g2", "passed": passed,
            "value_spread": spread, "max_tangential_gradient": float(max(grads))}


def _check_necessity_convexity(args) -> dict:
    res = theory.necessity_counterexample_convexity(theory.sqrt_contrast())
    passed = res.verdict == "strict_max" and res.margin is not None and res.margin > 0
    return {"check": "necessity-convexity", "passed": passed,
            "verdict": res.verdict, "t": res.t, "margin": res.margin}


def _check_necessity_p2(args) -> dict:
    entries = []
    passed = True
    for c in (theory.quartic_plus_square(), theory.quartic_minus_square()):
        res = theory.necessity_counterexample_p2(c)
        ok = res.verdict == "not_maximal" and res.improvement > 0
        entries.append({
            "contrast": c.name, "case": res.case, "hprime0": res.hprime0,
            "improvement": res.improvement, "passed": ok,
        })
        passed = passed and ok
    return {"check": "necessity-p2", "passed": passed, "constructions": entries}


def _check_chart(args) -> dict:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    contrast = contrast_from_spec("p:4")
    for i in range(args.pairs):
        m = int(rng.integers(2, 6))
        wb = theory.random_weighted_basis(m, contrast, [args.seed, i])
        v = rng.standard_normal(m)
        v /= np.linalg.norm(v)
        chart = theory.chart_at(v)
        grad, hess = theory.chart_derivatives(chart, wb)
        _, fd_grad, fd_hess = theory.chart_fd_derivatives(chart, wb, step=1e-5)
        scale = max(1.0, float(np.abs(grad).max()), float(np.abs(hess).max()))
        worst = max(
            worst,
            float(np.abs(grad - fd_grad).max()) / scale,
            float(np.abs(hess - fd_hess).max()) / scale,
        )
    passed = worst < 1e-5
    return {"check": "chart", "passed": passed, "pairs": args.pairs,
            "worst_relative_error": worst}


def _check_identity(args) -> dict:
    rng = np.random.default_rng(args.seed)
    contrast = contrast_from_spec(args.contrast)
    worst = 0.0
    for i in range(8):
        wb = theory.random_weighted_basis(args.m, contrast, [args.seed, i])
        simplex = theory.SimplexObjective(wb)
        for _ in range(125):
            u = rng.standard_normal(args.m)
            u /= np.linalg.norm(u)
            worst = max(worst, abs(simplex.value(simplex.squash(u)) - wb.value(u)))
    passed = worst < 1e-12
    return {"check": "identity", "passed": passed, "worst_gap": worst}


def _perturbation_base_graph(seed: int):
    from .graph import SimilarityGraph

    rng = np.random.default_rng(seed)
    sizes = (15, 20, 25)
    n = sum(sizes)
    a = np.zeros((n, n))
    start = 0
    for size in sizes:
        block = rng.uniform(0.5, 1.5, (size, size))
        block = np.triu(block, 1)
        a[start:start + size, start:start + size] = block + block.T
        start += size
    graph = SimilarityGraph.from_adjacency(a)
    labels = np.repeat(np.arange(3), sizes)
    return graph, Partition(labels=labels, m=3)


def _check_perturbation(args) -> dict:
    graph, _ = _perturbation_base_graph(args.seed)
    report = theory.perturbation_experiment(
        graph, 3, noise_scale=args.noise, trials=args.trials, seed=args.seed)
    scales = sorted({args.noise / 4, args.noise / 2, args.noise})
    medians = []
    for s in scales:
        rep = theory.perturbation_experiment(graph, 3, noise_scale=s,
                                             trials=max(4, args.trials // 8),
                                             seed=args.seed + 1)
        locs = [t.localization for t in rep.trials if not t.skipped]
        medians.append(float(np.median(locs)))
    trend_ok = all(medians[i] <= medians[i + 1] + 1e-6
                   for i in range(len(medians) - 1))
    passed = report.max_ratio <= 1.0 and not report.any_spurious
    return {
        "check": "perturbation", "passed": passed,
        "max_bound_ratio": report.max_ratio,
        "any_spurious": report.any_spurious,
        "max_localization": report.max_localization,
        "localization_medians_by_scale": dict(zip(map(str, scales), medians)),
        "localization_trend_monotone": trend_ok,
        "eigengap": report.eigengap,
        "trials": len(report.trials),
    }


def _check_extreme_points(args) -> dict:
    contrast = contrast_from_spec(args.contrast)
    worst = 1.0
    passed = True
    for i in range(args.objectives):
        wb = theory.random_weighted_basis(args.m, contrast, [args.seed, i])
        simplex = theory.SimplexObjective(wb)
        cert = theory.enumerate_maxima(wb, 50 * args.m, [args.seed, i, 2],
                                       reference=wb.directions)
        for u in cert.maxima:
            t = simplex.squash(u)
            vertex_gap = float(np.abs(t - (t >= t.max())).max())
            worst = min(worst, 1.0 - vertex_gap)
            passed = passed and vertex_gap < 1e-6
    return {"check": "extreme-points", "passed": passed,
            "worst_vertex_linf_gap": 1.0 - worst}


CHECKS = {
    "enumeration": _check_enumeration,
    "necessity-g2": _check_necessity_g2,
    "necessity-convexity": _check_necessity_convexity,
    "necessity-p2": _check_necessity_p2,
    "chart": _check_chart,
    "identity": _check_identity,
    "perturbation": _check_perturbation,
    "extreme-points": _check_extreme_points,
}


def cmd_verify_theory(args) -> int:
    names = args.check or list(CHECKS)
    for name in names:
        if name not in CHECKS:
            print(f"error: unknown check {name!r}; available: {sorted(CHECKS)}",
                  file=sys.stderr)
            return EXIT_INPUT
    certificates = [CHECKS[name](args) for name in names]
    payload = {"schema": 1, "checks": certificates,
               "passed": all(c["passed"] for c in certificates)}
    _emit_json(payload, args.output)
    return EXIT_OK if payload["passed"] else EXIT_VERIFICATION


def cmd_gen(args) -> int:
    try:
        if args.what == "circles":
            save_csv(gen_circles(args.seed), args.output)
        else:
            graph, labels = gen_sbm(args.seed)
            save_adjacency_csv(graph, args.output)
            if args.labels_output:
                ds = LabeledDataset(
                    points=np.zeros((labels.n, 0)), labels=labels,
                    feature_names=(),
                )
                save_csv(ds, args.labels_output)
    except HbrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hbrclust",
        description="Spectral clustering by contrast maximization on the sphere",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("cluster", help="cluster one dataset, emit JSON")
    src = pc.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="CSV file of numeric features")
    src.add_argument("--gen", choices=["circles", "sbm"],
                     help="generate a synthetic dataset")
    pc.add_argument("--label-column", help="name of the ground-truth column")
    pc.add_argument("--normalize", action="store_true",
                    help="scale every feature to unit standard deviation")
    pc.add_argument("--alpha", type=float, default=1.0,
                    help="Gaussian kernel exponent factor")
    pc.add_argument("--radius", type=float, default=None,
                    help="zero kernel entries at distance >= radius")
    pc.add_argument("--laplacian", default="unnormalized",
                    choices=[k.value for k in LaplacianKind])
    pc.add_argument("--m", type=int, required=True, help="number of clusters")
    pc.add_argument("--algo", default="hbropt", choices=ALGORITHMS)
    pc.add_argument("--contrast", default="sig",
                    help="abs | p:<value> | ht | sig | gau")
    pc.add_argument("--eta", type=float, default=0.1)
    pc.add_argument("--tol", type=float, default=1e-8)
    pc.add_argument("--max-iters", type=int, default=1000)
    pc.add_argument("--delta", type=float, default=3 * math.pi / 8)
    pc.add_argument("--restarts", type=int, default=1,
                    help="spherical k-means restarts")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--output", help="write result JSON here (default stdout)")
    pc.add_argument("--timing", action="store_true",
                    help="include wall-clock timing in the JSON")
    pc.add_argument("--heatmap",
                    help="write (u1, u2, u3, F) sphere samples CSV (m = 3)")
    pc.set_defaults(func=cmd_cluster)

    pb = sub.add_parser("bench", help="run a manifest of configs, emit CSV")
    pb.add_argument("manifest", help="JSON list of run configs")
    pb.add_argument("--output", help="write CSV here (default stdout)")
    pb.set_defaults(func=cmd_bench)

    pv = sub.add_parser("verify-theory", help="numerical theorem checks")
    pv.add_argument("--check", action="append",
                    help=f"check name (repeatable); default all: {sorted(CHECKS)}")
    pv.add_argument("--m", type=int, default=3)
    pv.add_argument("--contrast", default="abs")
    pv.add_argument("--objectives", type=int, default=5)
    pv.add_argument("--pairs", type=int, default=100)
    pv.add_argument("--trials", type=int, default=20)
    pv.add_argument("--noise", type=float, default=0.25)
    pv.add_argument("--grid-points", type=int, default=100_000)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--output", help="write certificates JSON here")
    pv.set_defaults(func=cmd_verify_theory)

    pg = sub.add_parser("gen", help="write a synthetic dataset to CSV")
    pg.add_argument("what", choices=["circles", "sbm"])
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--output", required=True)
    pg.add_argument("--labels-output",
                    help="for sbm: also write the ground-truth labels")
    pg.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
