"""Experiment drivers: pairwise distance matrices, 1-NN classification, SBM sweeps."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from .graph import sample_sbm
from .mpnn import certified_lower_bound, certify, embedding_distance, parse_model_spec
from .wl import WASSERSTEIN, delta_h, normalize_base, stabilization_index

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HMode:
    """How many refinement rounds to run for a pair of graphs."""

    kind: str      # "fixed" or "stable-plus"
    value: int

    @classmethod
    def parse(cls, text):
        kind, _, value = str(text).partition(":")
        if kind not in ("fixed", "stable-plus") or not value.isdigit():
            raise ValueError(f"bad h-mode {text!r}; use fixed:H or stable-plus:K")
        return cls(kind, int(value))

    def rounds(self, G, H):
        if self.kind == "fixed":
            return self.value
        return stabilization_index(G, H) + self.value

    def __str__(self):
        return f"{self.kind}:{self.value}"


def pair_distance(G, H, base, h_mode):
    h = h_mode.rounds(G, H)
    return delta_h(G, H, h, base), h


def _cell(job):
    i, j, G, H, base, h_mode = job
    value, _ = pair_distance(G, H, base, h_mode)
    return i, j, value


def read_checkpoint(path):
    """Cells recorded in a sidecar log; only newline-terminated records count."""
    done = {}
    if path and os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                parts = line.strip().split(",")
                if not line.endswith("\n") or len(parts) != 3:
                    continue     # torn final line after an interruption
                try:
                    i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
                except ValueError:
                    continue
                done[(i, j)] = v
    return done


def _open_log(path):
    """Open the sidecar log for appending, dropping a torn unterminated tail."""
    if os.path.exists(path):
        with open(path, "rb+") as fh:
            data = fh.read()
            if data and not data.endswith(b"\n"):
                fh.truncate(data.rfind(b"\n") + 1)
    return open(path, "a", encoding="utf-8")


def distance_matrix(graphs, base=WASSERSTEIN, h_mode="stable-plus:3", jobs=1, checkpoint=None,
                    progress=None):
    """Symmetric matrix of graph distances; cells are final once written to ``checkpoint``.

    Workers only change wall time: each cell is a pure function of its pair,
    and values are placed by index.
    """
    base = normalize_base(base)
    h_mode = h_mode if isinstance(h_mode, HMode) else HMode.parse(h_mode)
    n = len(graphs)
    done = read_checkpoint(checkpoint)
    todo = [(i, j, graphs[i], graphs[j], base, h_mode)
            for i in range(n) for j in range(i + 1, n) if (i, j) not in done]
    log.info("%d cells cached, %d to compute", len(done), len(todo))
    sink = _open_log(checkpoint) if checkpoint else None
    try:
        if jobs > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = pool.map(_cell, todo, chunksize=max(1, len(todo) // (8 * jobs)))
                _collect(results, done, sink, progress)
        else:
            _collect(map(_cell, todo), done, sink, progress)
    finally:
        if sink:
            sink.close()
    M = np.zeros((n, n))
    for (i, j), v in done.items():
        if i < n and j < n:
            M[i, j] = M[j, i] = v
    return M


def _collect(results, done, sink, progress):
    for k, (i, j, v) in enumerate(results, 1):
        done[(i, j)] = v
        if sink:
            sink.write(f"{i},{j},{v!r}\n")
            sink.flush()
        if progress:
            progress(k)


# ------------------------------------------------------------------ 1-NN

@dataclass(frozen=True)
class KnnReport:
    accuracies: tuple[float, ...]
    mean: float
    std: float       # population standard deviation over splits

    def as_percent(self):
        return 100 * self.mean, 100 * self.std


def one_nn_predict(D, labels, train, test):
    """Label of the closest training graph; ties go to the lowest training index."""
    train = np.sort(np.asarray(train))
    sub = D[np.ix_(test, train)]
    nearest = train[np.argmin(sub, axis=1)]     # argmin keeps the first minimum
    return np.asarray(labels)[nearest]


def knn_accuracy(D, labels, splits=10, train_frac=0.9, seed=0):
    D = np.asarray(D, dtype=float)
    labels = np.asarray(labels)
    n = len(labels)
    if D.shape != (n, n):
        raise ValueError(f"matrix is {D.shape[0]}x{D.shape[1]} but there are {n} labels")
    if not 0 < train_frac < 1:
        raise ValueError("train_frac must lie strictly between 0 and 1")
    n_train = min(n - 1, max(1, int(round(train_frac * n))))
    rng = np.random.default_rng(seed)
    accs = []
    for _ in range(splits):
        perm = rng.permutation(n)
        train, test = perm[:n_train], perm[n_train:]
        pred = one_nn_predict(D, labels, train, test)
        accs.append(float(np.mean(pred == labels[test])))
    return KnnReport(tuple(accs), float(np.mean(accs)), float(np.std(accs)))


# ------------------------------------------------------------------ SBM sweep

@dataclass
class SbmResult:
    q: list
    distance: list
    rounds: list
    models: list
    embedding: dict
    lower_bound: dict
    depth: dict

    def spearman(self, name):
        return float(spearmanr(self.distance, self.embedding[name]).statistic)


def sbm_graphs(n=30, count=50, p=0.5, qmin=0.1, qmax=0.5, seed=0):
    """Two equal blocks with inner density ``p`` and cross density sweeping ``qmin..qmax``.

    With the default ``qmax == p`` the last graph is an Erdos-Renyi graph.
    """
    rng = np.random.default_rng(seed)
    sizes = [n // 2, n - n // 2]
    qs = np.linspace(qmin, qmax, count)
    return [sample_sbm(sizes, [[p, q], [q, p]], rng) for q in qs], [float(q) for q in qs]


def sbm_experiment(n=30, count=50, p=0.5, qmin=0.1, qmax=0.5, h_mode="stable-plus:3",
                   models=("64x2:relu",), seed=0, base=WASSERSTEIN):
    """Distance of every graph of the sweep to the last one, in the WL metric and in embeddings.

    The graph distance uses at least as many rounds as the deepest model,
    so each model's certified lower bound is comparable with it.
    """
    h_mode = h_mode if isinstance(h_mode, HMode) else HMode.parse(h_mode)
    graphs, qs = sbm_graphs(n, count, p, qmin, qmax, seed)
    built = {spec: parse_model_spec(spec, seed=seed + 1 + k) for k, spec in enumerate(models)}
    certs = {spec: certify(m) for spec, m in built.items()}
    depth = max(m.depth for m in built.values()) if built else 0
    ref = graphs[-1]
    out = SbmResult(qs, [], [], list(models), {s: [] for s in models}, {s: [] for s in models},
                    {s: m.depth for s, m in built.items()})
    for G in graphs:
        h = max(h_mode.rounds(G, ref), depth)
        out.rounds.append(h)
        out.distance.append(delta_h(G, ref, h, base))
        for spec, m in built.items():
            out.embedding[spec].append(embedding_distance(G, ref, m))
            out.lower_bound[spec].append(certified_lower_bound(G, ref, m, certs[spec]))
    return out


def format_mean_std(report):
    mean, std = report.as_percent()
    return f"{mean:.2f} ± {std:.2f}"
