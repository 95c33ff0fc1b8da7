"""Command-line interface tying the pipeline together.

Exit codes: 0 success, 1 validation error, 2 data error, 3 numerical
failure. Failures print a single machine-parsable line
``ERROR <code>: <message>`` to stderr. All randomness flows from one
``--seed``; when absent a fresh seed is generated, printed to stderr, and
recorded in the run report. Output files are byte-identical across runs
with the same seed; timings go to stderr only.
"""

from __future__ import annotations

import argparse
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import ClusterConfig, cluster
from .decay import classify_decay
from .density import KernelSpec
from .discriminant import (
    cross_validate,
    discriminant_values,
    model_from_dict,
    model_to_dict,
    train,
)
from .errors import DataError, SurdensError, ValidationError
from .fpca import fev, fit_fpca, model_to_dict as fpca_model_to_dict
from .harness import (
    DESK_CLUSTER_REPLICATES,
    DESK_CV_REPEATS,
    PAPER_CLUSTER_REPLICATES,
    PAPER_CV_REPEATS,
    grid_search,
    run_clustering_experiment,
    run_discriminant_experiment,
)
from .io import (
    read_curves,
    read_json,
    write_curves,
    write_density_csv,
    write_json,
    write_labels_csv,
    write_matrix_csv,
    write_regions_csv,
)
from .simulate import HorseshoeConfig, generate

SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise ValidationError(message)


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v != ""]


def build_parser() -> _Parser:
    p = _Parser(prog="surdens", description=__doc__)
    p.add_argument("--version", action="version", version=f"surdens {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seeded=True):
        sp.add_argument("--report", help="run report JSON path (default <out>.report.json)")
        sp.add_argument("--threads", type=int, default=1, help="worker cap for parallel stages")
        if seeded:
            sp.add_argument("--seed", type=int, default=None, help="base seed; generated when absent")

    sp = sub.add_parser("simulate", help="generate a horseshoe-mixture curve set")
    sp.add_argument("--out", required=True, help="curves CSV (with label column)")
    sp.add_argument("--n1", type=int, default=300)
    sp.add_argument("--n2", type=int, default=300)
    sp.add_argument("--k", type=float, default=0.5)
    sp.add_argument("--sigma", type=float, default=float(np.sqrt(0.005)))
    sp.add_argument("--basis-size", type=int, default=150)
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--pi1", type=float, default=None, help="draw group 1 with this probability")
    common(sp)

    sp = sub.add_parser("fpca", help="fit the score decomposition, optionally decay diagnostics")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out", required=True, help="model JSON")
    sp.add_argument("--components", type=int, default=None)
    sp.add_argument("--diagnostics", action="store_true", help="add eigenvalue decay report")
    sp.add_argument("--decay-constant", type=float, default=1.0 / 3.0)
    sp.add_argument("--tail-tol", type=float, default=0.05)
    common(sp, seeded=False)

    sp = sub.add_parser("cluster", help="surrogate-density clustering of a curve set")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--r", type=int, default=5)
    sp.add_argument("--cells", type=int, default=None)
    sp.add_argument("--padding", type=float, default=3.0)
    sp.add_argument("--kernel", choices=["gaussian", "epanechnikov"], default="gaussian")
    sp.add_argument("--out-labels", required=True)
    sp.add_argument("--out-modal", required=True)
    sp.add_argument("--out-regions", default=None)
    sp.add_argument("--out-density", default=None)
    common(sp, seeded=False)

    sp = sub.add_parser("gridsearch", help="CH-driven sweep over (delta, r)")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--deltas", type=_float_list, default=[0.6, 1.0, 1.4])
    sp.add_argument("--rs", type=_int_list, default=[1, 5, 10])
    sp.add_argument("--cells", type=int, default=None)
    sp.add_argument("--padding", type=float, default=0.0)
    sp.add_argument("--kernel", choices=["gaussian", "epanechnikov"], default="gaussian")
    sp.add_argument("--out", required=True, help="scores CSV per grid point")
    common(sp, seeded=False)

    sp = sub.add_parser("classify-train", help="train the kernel Bayes classifier")
    sp.add_argument("--in", dest="inp", required=True, help="curves CSV with label column")
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--mode", choices=["heteroscedastic", "homoscedastic"],
                    default="heteroscedastic")
    sp.add_argument("--kernel", choices=["gaussian", "epanechnikov"], default="gaussian")
    sp.add_argument("--out", required=True, help="classifier model JSON")
    common(sp, seeded=False)

    sp = sub.add_parser("classify-predict", help="label curves with a trained model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out", required=True, help="predictions CSV")
    common(sp, seeded=False)

    sp = sub.add_parser("benchmark", help="seeded Monte Carlo experiment")
    sp.add_argument("--task", choices=["clustering", "discriminant"], default="clustering")
    sp.add_argument("--out-records", required=True, help="flat per-replicate CSV")
    sp.add_argument("--paper-scale", action="store_true",
                    help="400 replicates / 100 CV repeats instead of desk scale")
    sp.add_argument("--replicates", type=int, default=None)
    sp.add_argument("--n1", type=int, default=300)
    sp.add_argument("--n2", type=int, default=300)
    sp.add_argument("--k", type=float, default=0.5)
    sp.add_argument("--sigma", type=float, default=float(np.sqrt(0.005)))
    sp.add_argument("--pi1", type=float, default=None)
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--deltas", type=_float_list, default=[1.4])
    sp.add_argument("--rs", type=_int_list, default=[10])
    sp.add_argument("--cells", type=int, default=None)
    sp.add_argument("--padding", type=float, default=0.0)
    sp.add_argument("--kernel", choices=["gaussian", "epanechnikov"], default="gaussian")
    sp.add_argument("--d-list", type=_int_list, default=[2, 3, 4, 5])
    sp.add_argument("--train-fraction", type=float, default=2.0 / 3.0)
    sp.add_argument("--mode", choices=["heteroscedastic", "homoscedastic"],
                    default="heteroscedastic")
    common(sp)
    return p


def _resolve_seed(args, report):
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed: {seed}", file=sys.stderr)
    report["seed"] = seed
    return seed


def _report_skeleton(args) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "command"}
    return {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "config": config,
        "versions": {
            "surdens": __version__,
            "numpy": np.__version__,
            "python": ".".join(map(str, sys.version_info[:3])),
        },
        "outputs": [],
    }


def _write_report(args, report):
    path = args.report
    if path is None:
        out = getattr(args, "out", None) or getattr(args, "out_labels", None) \
            or getattr(args, "out_records", None)
        path = str(out) + ".report.json"
    write_json(path, report)


def _cmd_simulate(args, report):
    probs = (args.pi1, 1.0 - args.pi1) if args.pi1 is not None else None
    seed = _resolve_seed(args, report)
    cfg = HorseshoeConfig(
        n_per_group=(args.n1, args.n2),
        k=args.k,
        sigma=args.sigma,
        L=args.basis_size,
        m=args.points,
        seed=seed,
        group_probs=probs,
    )
    sample, labels = generate(cfg)
    write_curves(args.out, sample, labels)
    report["outputs"].append(args.out)
    report["n_curves"] = sample.n
    return 0


def _cmd_fpca(args, report):
    sample, _ = read_curves(args.inp)
    max_c = args.components or min(sample.n - 1, sample.m)
    model = fit_fpca(sample, max_c)
    write_json(args.out, fpca_model_to_dict(model))
    report["outputs"].append(args.out)
    report["n_components"] = model.n_components
    report["fev"] = model.fev[: model.n_components].tolist()
    if args.diagnostics:
        decay = classify_decay(
            model.eigenvalues,
            C=args.decay_constant,
            tail_tol=args.tail_tol,
            rel_floor=1e-12,
        )
        report["decay"] = decay.to_dict()
    return 0


def _cmd_cluster(args, report):
    sample, _ = read_curves(args.inp)
    cfg = ClusterConfig(
        d=args.d,
        delta=args.delta,
        r=args.r,
        cells_per_axis=args.cells,
        kernel=args.kernel,
        padding_bandwidths=args.padding,
    )
    result = cluster(sample, cfg)
    write_labels_csv(args.out_labels, result.labels, result.prototype_flags)
    write_matrix_csv(args.out_modal, result.modal_curves)
    report["outputs"] += [args.out_labels, args.out_modal]
    if args.out_regions:
        write_regions_csv(args.out_regions, result.regions)
        report["outputs"].append(args.out_regions)
    if args.out_density:
        write_density_csv(args.out_density, result.density)
        report["outputs"].append(args.out_density)
    report["g_hat"] = result.g_hat
    report["modes"] = {
        "cells": [list(c) for c in result.modes.cells],
        "centers": result.modes.centers.tolist(),
        "values": result.modes.values.tolist(),
    }
    report["thresholds"] = result.regions.thresholds.tolist()
    report["dropped_regions"] = list(result.dropped_regions)
    report["fev"] = fev(result.model, args.d)
    return 0


def _cmd_gridsearch(args, report):
    sample, labels = read_curves(args.inp)
    rows, best = grid_search(
        sample,
        args.d,
        args.deltas,
        args.rs,
        class_labels=labels,
        cells_per_axis=args.cells,
        padding_bandwidths=args.padding,
        kernel=args.kernel,
    )
    with open(args.out, "w") as fh:
        fh.write("delta,r,k,ch,purity,misclassification\n")
        for row in rows:
            if "error" in row:
                fh.write(f"{row['delta']},{row['r']},,,,\n")
                continue
            pur = row.get("purity")
            mis = row.get("misclassification")
            fh.write(
                f"{row['delta']},{row['r']},{row['k']},{row['ch']!r},"
                f"{'' if pur is None else repr(pur)},"
                f"{'' if mis is None else repr(mis)}\n"
            )
    report["outputs"].append(args.out)
    report["best"] = best
    report["errors"] = [r for r in rows if "error" in r]
    return 0


def _cmd_classify_train(args, report):
    sample, labels = read_curves(args.inp)
    if labels is None:
        raise DataError("training requires a label column (declare '# label')")
    model = train(sample, labels, args.d, mode=args.mode, kernel=args.kernel)
    payload = model_to_dict(model)
    payload["schema_version"] = SCHEMA_VERSION
    write_json(args.out, payload)
    report["outputs"].append(args.out)
    report["priors"] = [g.prior for g in model.groups]
    return 0


def _cmd_classify_predict(args, report):
    model = model_from_dict(read_json(args.model))
    sample, _ = read_curves(args.inp)
    vals = discriminant_values(model, sample.values)
    labels = np.argmax(vals, axis=1) + 1
    with open(args.out, "w") as fh:
        head = ["index", "label"] + [f"score_{g + 1}" for g in range(vals.shape[1])]
        fh.write(",".join(head) + "\n")
        for i in range(vals.shape[0]):
            fields = [str(i), str(int(labels[i]))] + [repr(float(v)) for v in vals[i]]
            fh.write(",".join(fields) + "\n")
    report["outputs"].append(args.out)
    return 0


def _cmd_benchmark(args, report):
    seed = _resolve_seed(args, report)
    probs = (args.pi1, 1.0 - args.pi1) if args.pi1 is not None else None
    cfg = HorseshoeConfig(
        n_per_group=(args.n1, args.n2),
        k=args.k,
        sigma=args.sigma,
        seed=0,
        group_probs=probs,
    )
    if args.task == "clustering":
        replicates = args.replicates or (
            PAPER_CLUSTER_REPLICATES if args.paper_scale else DESK_CLUSTER_REPLICATES
        )
        grid = [(args.d, delta, r) for delta in args.deltas for r in args.rs]
        exp = run_clustering_experiment(
            cfg,
            grid,
            replicates,
            seed,
            cells_per_axis=args.cells,
            padding_bandwidths=args.padding,
            kernel=args.kernel,
            threads=args.threads,
        )
        cols = ["replicate", "seed", "grid_point", "g_hat",
                "misclassification", "purity", "ch", "error"]
    else:
        repeats = args.replicates or (
            PAPER_CV_REPEATS if args.paper_scale else DESK_CV_REPEATS
        )
        exp = run_discriminant_experiment(
            cfg,
            args.d_list,
            repeats,
            args.train_fraction,
            seed,
            mode=args.mode,
            kernel=args.kernel,
        )
        cols = ["d", "seed", "mean_error", "sd_error", "errors", "error"]
    with open(args.out_records, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for rec in exp.records:
            fields = []
            for c in cols:
                v = rec.get(c, "")
                if isinstance(v, float):
                    v = repr(v)
                elif isinstance(v, list):
                    v = ";".join(repr(x) for x in v)
                fields.append(str(v))
            fh.write(",".join(fields) + "\n")
    report["outputs"].append(args.out_records)
    report["experiment"] = exp.to_dict()
    failed = sum(1 for rec in exp.records if "error" in rec)
    return 3 if failed else 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fpca": _cmd_fpca,
    "cluster": _cmd_cluster,
    "gridsearch": _cmd_gridsearch,
    "classify-train": _cmd_classify_train,
    "classify-predict": _cmd_classify_predict,
    "benchmark": _cmd_benchmark,
}


def main(argv=None) -> int:
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        report = _report_skeleton(args)
        code = _COMMANDS[args.command](args, report)
        _write_report(args, report)
    except SurdensError as exc:
        print(f"ERROR {exc.exit_code}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"ERROR 2: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"ERROR 3: {exc}", file=sys.stderr)
        return 3
    print(f"done in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
