"""Finite simple undirected graphs, file loaders and random generators."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

log = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Raised for malformed graph files."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``adj[v]`` is the sorted tuple of neighbours of ``v``. Node labels are
    carried along for bookkeeping only; no metric in this package reads them.
    """

    n: int
    adj: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...] | None = None

    @classmethod
    def from_edges(cls, n, edges, labels=None):
        nbrs = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        adj = tuple(tuple(sorted(s)) for s in nbrs)
        if labels is not None:
            labels = tuple(int(x) for x in labels)
            if len(labels) != n:
                raise ValueError("labels must have one entry per vertex")
        return cls(n, adj, labels)

    @property
    def num_edges(self):
        return sum(len(a) for a in self.adj) // 2

    def edges(self):
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def degree(self, v):
        return len(self.adj[v])

    def degrees(self):
        return [len(a) for a in self.adj]

    def adjacency_matrix(self):
        A = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges():
            A[u, v] = A[v, u] = 1
        return A

    def relabel(self, perm):
        """Return the isomorphic copy where vertex ``v`` becomes ``perm[v]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of range(n)")
        labels = None
        if self.labels is not None:
            labels = [0] * self.n
            for v, lab in enumerate(self.labels):
                labels[perm[v]] = lab
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges()], labels)


@dataclass
class Dataset:
    graphs: list[Graph]
    class_labels: list[int]
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.graphs) != len(self.class_labels):
            raise ValueError("graphs and class_labels differ in length")

    def __len__(self):
        return len(self.graphs)


def validate_graph(G):
    """Return a list of invariant violations (empty if ``G`` is well formed)."""
    problems = []
    if len(G.adj) != G.n:
        problems.append(f"adj has {len(G.adj)} rows for n={G.n}")
        return problems
    for v, nb in enumerate(G.adj):
        if list(nb) != sorted(set(nb)):
            problems.append(f"neighbours of {v} not sorted/unique")
        for u in nb:
            if u == v:
                problems.append(f"self-loop at {v}")
            elif not 0 <= u < G.n:
                problems.append(f"neighbour {u} of {v} out of range")
            elif v not in G.adj[u]:
                problems.append(f"asymmetric edge {v}->{u}")
    if G.labels is not None and len(G.labels) != G.n:
        problems.append("label vector has wrong length")
    return problems


# ---------------------------------------------------------------- loaders

def load_edge_list(path):
    """Read an edge list: optional ``n <count>`` header, ``u v`` lines, ``#`` comments."""
    n_header = None
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "n":
                if len(parts) != 2 or edges or n_header is not None:
                    raise GraphFormatError(f"{path}, line {lineno}: bad header line")
                try:
                    n_header = int(parts[1])
                except ValueError:
                    raise GraphFormatError(f"{path}, line {lineno}: bad vertex count") from None
                if n_header < 0:
                    raise GraphFormatError(f"{path}, line {lineno}: negative vertex count")
                continue
            if len(parts) != 2:
                raise GraphFormatError(f"{path}, line {lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}, line {lineno}: non-integer endpoint") from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"{path}, line {lineno}: negative vertex id")
            if u == v:
                raise GraphFormatError(f"{path}, line {lineno}: self-loop at vertex {u}")
            edges.append((u, v))
    n = 1 + max((max(e) for e in edges), default=-1)
    if n_header is not None:
        if n > n_header:
            raise GraphFormatError(f"{path}: vertex id {n - 1} exceeds header n={n_header}")
        n = n_header
    return Graph.from_edges(n, edges)


def save_edge_list(G, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {G.n}\n")
        for u, v in G.edges():
            fh.write(f"{u} {v}\n")


def _read_int_column(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                out.append(int(line.split(",")[0]))
            except ValueError:
                raise GraphFormatError(f"{path}, line {lineno}: expected an integer") from None
    return out


def load_tudataset(directory, name):
    """Load a dataset in the TUDataset text layout (``NAME_A.txt`` and friends)."""
    base = os.path.join(directory, name)
    paths = {k: f"{base}_{k}.txt" for k in ("A", "graph_indicator", "graph_labels", "node_labels")}
    for k in ("A", "graph_indicator", "graph_labels"):
        if not os.path.exists(paths[k]):
            raise FileNotFoundError(paths[k])

    indicator = _read_int_column(paths["graph_indicator"])
    class_labels = _read_int_column(paths["graph_labels"])
    num_graphs = len(class_labels)
    node_labels = None
    if os.path.exists(paths["node_labels"]):
        node_labels = _read_int_column(paths["node_labels"])
        if len(node_labels) != len(indicator):
            raise GraphFormatError("node_labels and graph_indicator differ in length")

    # global 1-based node id -> (graph index, local 0-based id)
    local = [0] * len(indicator)
    sizes = [0] * num_graphs
    for i, g in enumerate(indicator):
        if not 1 <= g <= num_graphs:
            raise GraphFormatError(f"graph id {g} at node {i + 1} out of range")
        local[i] = sizes[g - 1]
        sizes[g - 1] += 1

    edges = [[] for _ in range(num_graphs)]
    self_loops = 0
    with open(paths["A"], encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                a, b = (int(x) for x in line.split(","))
            except ValueError:
                raise GraphFormatError(f"{paths['A']}, line {lineno}: expected 'u, v'") from None
            if not (1 <= a <= len(indicator) and 1 <= b <= len(indicator)):
                raise GraphFormatError(f"{paths['A']}, line {lineno}: node id out of range")
            ga, gb = indicator[a - 1], indicator[b - 1]
            if ga != gb:
                raise GraphFormatError(
                    f"{paths['A']}, line {lineno}: edge ({a}, {b}) joins graphs {ga} and {gb}")
            if a == b:
                self_loops += 1
                continue
            edges[ga - 1].append((local[a - 1], local[b - 1]))
    if self_loops:
        log.warning("%s: dropped %d self-loop entries", name, self_loops)

    per_graph_labels = [None] * num_graphs
    if node_labels is not None:
        per_graph_labels = [[] for _ in range(num_graphs)]
        for i, g in enumerate(indicator):
            per_graph_labels[g - 1].append(node_labels[i])
    graphs = [Graph.from_edges(sizes[g], edges[g], per_graph_labels[g]) for g in range(num_graphs)]
    return Dataset(graphs, class_labels, name)


# ------------------------------------------------------------- generators

def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_sbm(sizes, probs, seed=None):
    """Stochastic block model; vertices are numbered block by block."""
    sizes = [int(s) for s in sizes]
    if any(s <= 0 for s in sizes):
        raise ValueError("block sizes must be positive")
    P = np.asarray(probs, dtype=float)
    k = len(sizes)
    if P.shape != (k, k):
        raise ValueError(f"probability matrix must be {k}x{k}")
    if not np.allclose(P, P.T):
        raise ValueError("probability matrix must be symmetric")
    if np.any(P < 0) or np.any(P > 1) or np.any(np.isnan(P)):
        raise ValueError("probabilities must lie in [0, 1]")
    rng = _rng(seed)
    block = np.repeat(np.arange(k), sizes)
    n = len(block)
    iu, ju = np.triu_indices(n, k=1)
    draws = rng.random(len(iu))
    keep = draws < P[block[iu], block[ju]]
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def sample_er(n, p, seed=None):
    if n <= 0:
        if n == 0:
            return Graph.from_edges(0, [])
        raise ValueError("n must be nonnegative")
    return sample_sbm([n], [[p]], seed)


def blowup(G, k):
    """Replace each vertex by ``k`` independent copies (same induced graphon)."""
    if k < 1:
        raise ValueError("blow-up factor must be at least 1")
    edges = []
    for u, v in G.edges():
        for a in range(k):
            for b in range(k):
                edges.append((u * k + a, v * k + b))
    labels = None
    if G.labels is not None:
        labels = [lab for lab in G.labels for _ in range(k)]
    return Graph.from_edges(G.n * k, edges, labels)


# -------------------------------------------------------- small builders

def empty_graph(n):
    return Graph.from_edges(n, [])


def complete_graph(n):
    return Graph.from_edges(n, combinations(range(n), 2))


def cycle_graph(n):
    if n < 3:
        raise ValueError("cycles need at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_multipartite(*parts):
    block = [b for b, s in enumerate(parts) for _ in range(s)]
    n = len(block)
    return Graph.from_edges(n, [(u, v) for u, v in combinations(range(n), 2) if block[u] != block[v]])


def disjoint_union(*graphs):
    edges = []
    offset = 0
    for G in graphs:
        edges.extend((u + offset, v + offset) for u, v in G.edges())
        offset += G.n
    return Graph.from_edges(offset, edges)
