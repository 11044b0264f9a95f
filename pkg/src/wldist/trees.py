"""Small free trees and exact tree homomorphism counts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

MAX_ORDER = 10


@dataclass(frozen=True)
class RootedTree:
    """Tree stored by its parent array in preorder; ``parent[0] == -1`` is the root."""

    parent: tuple[int, ...]

    def __post_init__(self):
        if not self.parent or self.parent[0] != -1:
            raise ValueError("vertex 0 must be the root")
        for v, p in enumerate(self.parent[1:], 1):
            if not 0 <= p < v:
                raise ValueError("parents must precede their children")

    @property
    def order(self):
        return len(self.parent)

    def edges(self):
        return [(p, v) for v, p in enumerate(self.parent) if v]

    def children(self):
        out = [[] for _ in self.parent]
        for p, v in self.edges():
            out[p].append(v)
        return out

    def depths(self):
        d = [0] * self.order
        for v in range(1, self.order):
            d[v] = d[self.parent[v]] + 1
        return d

    @property
    def height(self):
        return max(self.depths())

    @property
    def code(self):
        """Level sequence (depths in preorder)."""
        return "".join(str(x) for x in self.depths())

    def __repr__(self):
        return f"RootedTree(order={self.order}, code={self.code!r})"


def _adjacency(order, edges):
    adj = [[] for _ in range(order)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _rooted_code(adj, root):
    """Canonical level sequence of the tree rooted at ``root`` (children by descending code)."""
    def rec(v, parent, depth):
        subs = sorted((rec(u, v, depth + 1) for u in adj[v] if u != parent), reverse=True)
        return (depth,) + tuple(x for s in subs for x in s)
    return rec(root, -1, 0)


def _from_levels(levels):
    parent = [-1]
    stack = [0]
    for v, d in enumerate(levels[1:], 1):
        del stack[d:]
        parent.append(stack[-1])
        stack.append(v)
    return RootedTree(tuple(parent))


def _centers(adj):
    n = len(adj)
    if n <= 2:
        return list(range(n))
    deg = [len(a) for a in adj]
    layer = [v for v in range(n) if deg[v] == 1]
    left = n
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            for u in adj[v]:
                deg[u] -= 1
                if deg[u] == 1:
                    nxt.append(u)
        layer = nxt
    return layer


def _centroids(adj):
    n = len(adj)
    size = [1] * n
    order, parent = [0], [-1] * n
    for v in order:
        for u in adj[v]:
            if u != parent[v]:
                parent[u] = v
                order.append(u)
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    best = []
    for v in range(n):
        heaviest = max([n - size[v]] + [size[u] for u in adj[v] if u != parent[v]])
        if 2 * heaviest <= n:
            best.append(v)
    return best


@lru_cache(maxsize=None)
def _free_trees(order):
    """Free trees of the given order, each as its centre-rooted level sequence."""
    if order == 1:
        return ((0,),)
    found = set()
    for levels in _free_trees(order - 1):
        edges = _from_levels(list(levels)).edges()
        for v in range(order - 1):
            adj = _adjacency(order, edges + [(v, order - 1)])
            found.add(min(_rooted_code(adj, c) for c in _centers(adj)))
    return tuple(sorted(found))


def _representative(levels):
    tree = _from_levels(list(levels))
    adj = _adjacency(tree.order, tree.edges())
    code = min(_rooted_code(adj, c) for c in _centroids(adj))
    return _from_levels(list(code))


def enumerate_trees(max_order):
    """One tree per isomorphism class of free trees on ``1..max_order`` vertices.

    Each is rooted at a centroid (the one giving the smallest level
    sequence); the list is sorted by order, then by level sequence.
    """
    if not 1 <= max_order <= MAX_ORDER:
        raise ValueError(f"max_order must lie in 1..{MAX_ORDER}")
    out = []
    for k in range(1, max_order + 1):
        reps = [_representative(key) for key in _free_trees(k)]
        out.extend(sorted(reps, key=lambda t: t.depths()))
    return out


def hom_count(T: RootedTree, G) -> int:
    """Number of homomorphisms ``T -> G`` by leaf-to-root dynamic programming."""
    kids = T.children()
    table = [None] * T.order
    for node in reversed(range(T.order)):
        cnt = [1] * G.n
        for c in kids[node]:
            sub = table[c]
            for v in range(G.n):
                if cnt[v]:
                    cnt[v] *= sum(sub[u] for u in G.adj[v])
            table[c] = None
        table[node] = cnt
    return sum(table[0])


def hom_density(T, G) -> Fraction:
    if G.n == 0:
        raise ValueError("density undefined on the empty graph")
    return Fraction(hom_count(T, G), G.n ** T.order)


def hom_density_profile(G, max_order, trees=None):
    trees = enumerate_trees(max_order) if trees is None else trees
    return [hom_density(T, G) for T in trees]
