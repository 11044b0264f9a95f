"""Command line entry point: ``wldist {dist,matrix,sbm,knn,trees,embed}``.

JSON reports are one object per line. CSV files start with a
``# schema_version=N`` comment followed by a mandatory header row.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time

import numpy as np

from . import experiments as ex
from .graph import load_edge_list, load_tudataset
from .mpnn import embed, load_model, parse_model_spec
from .trees import enumerate_trees, hom_count, hom_density
from .wl import delta_h, delta_inf_P, delta_inf_W, normalize_base, stabilization_index

SCHEMA_VERSION = 1
INITIAL_COLORING = "constant"
COLORING_NOTE = "refinement starts from one constant colour; dataset node labels are ignored"
log = logging.getLogger("wldist")


# ------------------------------------------------------------------ csv io

def write_csv(path, header, rows):
    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")
    try:
        fh.write(f"# schema_version={SCHEMA_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def read_csv(path):
    """Return ``(header, rows)`` of a CSV written by :func:`write_csv`."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader if row]


def read_matrix_csv(path):
    header, rows = read_csv(path)
    n = len(header) - 1
    M = np.array([[float(x) for x in row[1:]] for row in rows], dtype=float)
    if M.shape != (n, n):
        raise ValueError(f"{path}: expected a {n}x{n} matrix, found {M.shape}")
    return M


def emit(obj):
    print(json.dumps({"schema_version": SCHEMA_VERSION, **obj}), flush=True)


# ------------------------------------------------------------------ commands

def _metric(name):
    return normalize_base(name)


def cmd_dist(args):
    G, H = load_edge_list(args.graphA), load_edge_list(args.graphB)
    base = _metric(args.metric)
    start = time.perf_counter()
    report = {"metric": args.metric}
    if args.h == "inf":
        res = delta_inf_P(G, H) if base == "P" else delta_inf_W(G, H, args.eps)
        report.update(h="inf", value=float(res.value), error=res.error, levels=res.levels)
        exact = res.value if base == "P" else None
    else:
        h = int(args.h)
        value = delta_h(G, H, h, base, exact=args.exact or base == "P")
        report.update(h=h, value=float(value))
        exact = value if args.exact else None
    if exact is not None:
        report["exact"] = str(exact)
    report["stabilization_index"] = stabilization_index(G, H)
    report["wall_time_ms"] = round(1000 * (time.perf_counter() - start), 3)
    emit(report)
    return 0


def cmd_matrix(args):
    ds = load_tudataset(args.dataset, args.name)
    checkpoint = args.checkpoint or (args.out + ".ckpt" if args.out not in (None, "-") else None)
    total = len(ds) * (len(ds) - 1) // 2

    def progress(k):
        if k % 500 == 0:
            log.info("computed %d new cells (of %d)", k, total)

    M = ex.distance_matrix(ds.graphs, _metric(args.metric), args.h_mode, args.jobs, checkpoint,
                           progress)
    n = len(ds)
    write_csv(args.out, ["graph", *range(n)], ([i, *map(float, M[i])] for i in range(n)))
    return 0


def cmd_sbm(args):
    models = [m for spec in args.models for m in spec.split(",") if m]
    h_mode = args.h if ":" in args.h else f"fixed:{int(args.h)}"
    res = ex.sbm_experiment(args.n, args.count, args.p, args.qmin, args.qmax, h_mode, models,
                            args.seed)
    header = ["i", "q", "h", "graph_distance"]
    for m in models:
        header += [f"embedding_distance[{m}]", f"lower_bound[{m}]"]
    rows = []
    for i in range(len(res.q)):
        row = [i, res.q[i], res.rounds[i], float(res.distance[i])]
        for m in models:
            row += [res.embedding[m][i], res.lower_bound[m][i]]
        rows.append(row)
    write_csv(args.out, header, rows)
    for m in models:
        sound = all(b <= d + 1e-7 for b, d in zip(res.lower_bound[m], res.distance))
        emit({"model": m, "spearman": res.spearman(m), "lower_bound_sound": sound})
    return 0


def cmd_knn(args):
    ds = load_tudataset(args.dataset, args.name)
    M = read_matrix_csv(args.metric_matrix)
    if M.shape[0] != len(ds):
        raise ValueError(f"matrix has {M.shape[0]} rows but the dataset has {len(ds)} graphs")
    rep = ex.knn_accuracy(M, ds.class_labels, args.splits, args.train_frac, args.seed)
    mean, std = rep.as_percent()
    emit({"dataset": args.name, "splits": args.splits, "train_frac": args.train_frac,
          "seed": args.seed, "initial_coloring": INITIAL_COLORING, "mean": mean, "std": std,
          "accuracies": [100 * a for a in rep.accuracies]})
    return 0


def cmd_trees(args):
    G = load_edge_list(args.graph)
    rows = []
    for k, T in enumerate(enumerate_trees(args.max_order)):
        dens = hom_density(T, G)
        rows.append([k, T.order, T.height, T.code, hom_count(T, G), str(dens), float(dens)])
    write_csv(args.out, ["tree", "order", "height", "code", "hom", "density", "density_float"],
              rows)
    return 0


def _model(spec, seed):
    if spec.endswith(".json"):
        return load_model(spec)
    return parse_model_spec(spec, seed=seed)


def cmd_embed(args):
    ds = load_tudataset(args.dataset, args.name)
    model = _model(args.model, args.seed)
    rows = [[i, *map(float, embed(G, model))] for i, G in enumerate(ds.graphs)]
    d = model.readout.d_out
    write_csv(args.out, ["graph", *(f"e{k}" for k in range(d))], rows)
    return 0


# ------------------------------------------------------------------ parser

def _h_value(text):
    if text == "inf":
        return text
    if not text.isdigit():
        raise argparse.ArgumentTypeError("h must be a nonnegative integer or 'inf'")
    return text


def build_parser():
    p = argparse.ArgumentParser(prog="wldist", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    metrics = ["prokhorov", "wasserstein", "P", "W"]

    d = sub.add_parser("dist", help="distance between two edge-list graphs")
    d.add_argument("graphA")
    d.add_argument("graphB")
    d.add_argument("--metric", choices=metrics, default="wasserstein")
    d.add_argument("--h", type=_h_value, default="3")
    d.add_argument("--eps", type=float, default=1e-3)
    d.add_argument("--exact", action="store_true")
    d.set_defaults(func=cmd_dist)

    m = sub.add_parser("matrix", help="pairwise distances over a TU dataset",
                       epilog=COLORING_NOTE)
    m.add_argument("--dataset", required=True, help="directory holding NAME_A.txt etc.")
    m.add_argument("--name", required=True)
    m.add_argument("--metric", choices=metrics, default="wasserstein")
    m.add_argument("--h-mode", default="stable-plus:3")
    m.add_argument("--out", default="-")
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--checkpoint", default=None, help="sidecar log (default OUT.ckpt)")
    m.set_defaults(func=cmd_matrix)

    s = sub.add_parser("sbm", help="SBM sweep: WL distance vs embedding distance")
    s.add_argument("--n", type=int, default=30)
    s.add_argument("--count", type=int, default=50)
    s.add_argument("--p", type=float, default=0.5)
    s.add_argument("--qmin", type=float, default=0.1)
    s.add_argument("--qmax", type=float, default=0.5)
    s.add_argument("--h", default="stable-plus:3", help="rounds, or stable-plus:K")
    s.add_argument("--models", nargs="+", default=["64x2:relu"], help="WIDTHxLAYERS[:ACT] ...")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sbm)

    k = sub.add_parser("knn", help="1-NN accuracy from a distance matrix",
                       epilog=COLORING_NOTE + "; nearest-neighbour ties go to the lowest "
                              "training index")
    k.add_argument("--dataset", required=True)
    k.add_argument("--name", required=True)
    k.add_argument("--metric-matrix", required=True)
    k.add_argument("--splits", type=int, default=10)
    k.add_argument("--train-frac", type=float, default=0.9)
    k.add_argument("--seed", type=int, default=0)
    k.set_defaults(func=cmd_knn)

    t = sub.add_parser("trees", help="tree homomorphism densities of a graph")
    t.add_argument("graph")
    t.add_argument("--max-order", type=int, default=6)
    t.add_argument("--out", default="-")
    t.set_defaults(func=cmd_trees)

    e = sub.add_parser("embed", help="MPNN embeddings of a TU dataset")
    e.add_argument("--dataset", required=True)
    e.add_argument("--name", required=True)
    e.add_argument("--model", default="64x2:relu", help="spec WIDTHxLAYERS[:ACT] or model .json")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", default="-")
    e.set_defaults(func=cmd_embed)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"wldist: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

