"""Integer-capacity max-flow (Dinic) and min-cost flow (successive shortest paths)."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

# float arc costs are rounded to multiples of 1/COST_SCALE inside min_cost_flow
COST_SCALE = 10**9
INF = float("inf")


class NegativeCostError(ValueError):
    pass


@dataclass
class FlowNetwork:
    """Directed network with integer capacities and nonnegative arc costs."""

    n: int
    source: int
    sink: int
    arcs: list = field(default_factory=list)

    def add_arc(self, u, v, capacity, cost=0):
        if capacity < 0:
            raise ValueError("capacities must be nonnegative")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"arc ({u}, {v}) out of range")
        self.arcs.append((u, v, int(capacity), cost))
        return len(self.arcs) - 1


class _Residual:
    # arc 2k is the k-th input arc, arc 2k+1 its reverse
    __slots__ = ("n", "to", "cap", "cost", "adj")

    def __init__(self, net, costs=None):
        self.n = net.n
        self.to = []
        self.cap = []
        self.cost = []
        self.adj = [[] for _ in range(net.n)]
        for k, (u, v, c, _) in enumerate(net.arcs):
            w = costs[k] if costs is not None else 0
            self.adj[u].append(len(self.to))
            self.to.append(v)
            self.cap.append(c)
            self.cost.append(w)
            self.adj[v].append(len(self.to))
            self.to.append(u)
            self.cap.append(0)
            self.cost.append(-w)


def max_flow(net):
    """Value of a maximum ``source -> sink`` flow (Dinic, O(V^2 E))."""
    if net.source == net.sink:
        raise ValueError("source and sink coincide")
    R = _Residual(net)
    to, cap, adj = R.to, R.cap, R.adj
    s, t = net.source, net.sink
    total = 0
    while True:
        level = [-1] * R.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for a in adj[u]:
                if cap[a] > 0 and level[to[a]] < 0:
                    level[to[a]] = level[u] + 1
                    q.append(to[a])
        if level[t] < 0:
            return total
        it = [0] * R.n

        def push(u, limit):
            if u == t:
                return limit
            arcs = adj[u]
            while it[u] < len(arcs):
                a = arcs[it[u]]
                v = to[a]
                if cap[a] > 0 and level[v] == level[u] + 1:
                    got = push(v, min(limit, cap[a]))
                    if got:
                        cap[a] -= got
                        cap[a ^ 1] += got
                        return got
                it[u] += 1
            return 0

        while True:
            f = push(s, INF)
            if not f:
                break
            total += f


def _integer_costs(arcs):
    """Map arc costs to integers; return (costs, divisor)."""
    raw = [c for (_, _, _, c) in arcs]
    if any(c < 0 for c in raw):
        raise NegativeCostError("arc costs must be nonnegative")
    if all(isinstance(c, int) for c in raw):
        return raw, 1
    if all(isinstance(c, (int, Fraction)) for c in raw):
        d = lcm(1, *(Fraction(c).denominator for c in raw))
        return [int(Fraction(c) * d) for c in raw], d
    return [round(float(c) * COST_SCALE) for c in raw], COST_SCALE


def min_cost_flow(net, required):
    """Cheapest flow of value ``required``.

    Returns ``(cost, feasible)``. Integer costs give an exact ``int``;
    rational costs an exact ``Fraction``; float costs are solved in fixed
    point at ``1/COST_SCALE`` resolution and returned as ``float``.
    """
    if required < 0:
        raise ValueError("required flow must be nonnegative")
    costs, div = _integer_costs(net.arcs)
    R = _Residual(net, costs)
    flow_cost, sent = _ssp(R, net.source, net.sink, required)
    if sent < required:
        return None, False
    if div == 1:
        return flow_cost, True
    if div == COST_SCALE:
        return flow_cost / COST_SCALE, True
    return Fraction(flow_cost, div), True


def _ssp(R, s, t, required):
    """Successive shortest paths with Johnson potentials; costs must be >= 0."""
    n, to, cap, cost, adj = R.n, R.to, R.cap, R.cost, R.adj
    pot = [0] * n
    sent = 0
    total = 0
    while sent < required:
        dist = [None] * n
        prev = [-1] * n
        dist[s] = 0
        heap = [(0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if d != dist[u]:
                continue
            pu = pot[u]
            for a in adj[u]:
                if cap[a] > 0:
                    v = to[a]
                    nd = d + cost[a] + pu - pot[v]
                    dv = dist[v]
                    if dv is None or nd < dv:
                        dist[v] = nd
                        prev[v] = a
                        heapq.heappush(heap, (nd, v))
        if dist[t] is None:
            break
        for v in range(n):
            if dist[v] is not None:
                pot[v] += dist[v]
        push = required - sent
        v = t
        while v != s:
            a = prev[v]
            if cap[a] < push:
                push = cap[a]
            v = to[a ^ 1]
        v = t
        while v != s:
            a = prev[v]
            cap[a] -= push
            cap[a ^ 1] += push
            total += push * cost[a]
            v = to[a ^ 1]
        sent += push
    return total, sent


def dense_transport(p, q, C):
    """Min cost of shipping all of ``q`` from supplies ``p`` over a dense cost block.

    Specialised successive shortest paths for the bipartite case: integer
    masses, nonnegative integer costs, every row-column pair admissible.
    Dijkstra runs on arrays (no residual graph is built) and stops at the
    first column with unmet demand; potentials are advanced by
    ``min(dist, dist_target)``, which keeps reduced costs nonnegative.
    Exact for arbitrarily large Python ints.
    """
    k1, k2 = len(p), len(q)
    need = sum(q)
    if need == 0:
        return 0
    if sum(p) < need:
        raise ValueError("supply does not cover demand")
    supply = list(p)
    demand = list(q)
    flow = [[0] * k2 for _ in range(k1)]
    pot_r = [0] * k1
    pot_c = [0] * k2
    rows = range(k1)
    cols = range(k2)
    total = 0
    while need:
        dist_r = [0 if supply[i] else None for i in rows]
        dist_c = [None] * k2
        from_row = [-1] * k2          # column j reached from row from_row[j]
        from_col = [-1] * k1          # row i reached back through column from_col[i]
        done_r = [False] * k1
        done_c = [False] * k2
        target = -1
        while True:
            # pick the closest unsettled node
            best = None
            kind = idx = -1
            for i in rows:
                d = dist_r[i]
                if d is not None and not done_r[i] and (best is None or d < best):
                    best, kind, idx = d, 0, i
            for j in cols:
                d = dist_c[j]
                if d is not None and not done_c[j] and (best is None or d < best):
                    best, kind, idx = d, 1, j
            if best is None:
                break
            if kind == 0:
                done_r[idx] = True
                base = best + pot_r[idx]
                Ci = C[idx]
                for j in cols:
                    if not done_c[j]:
                        nd = base + Ci[j] - pot_c[j]
                        dj = dist_c[j]
                        if dj is None or nd < dj:
                            dist_c[j] = nd
                            from_row[j] = idx
            else:
                done_c[idx] = True
                if demand[idx]:
                    target = idx
                    break
                base = best + pot_c[idx]
                for i in rows:
                    if flow[i][idx] and not done_r[i]:
                        nd = base - C[i][idx] - pot_r[i]
                        di = dist_r[i]
                        if di is None or nd < di:
                            dist_r[i] = nd
                            from_col[i] = idx
        if target < 0:
            raise RuntimeError("transport infeasible")
        dt = dist_c[target]
        for i in rows:
            d = dist_r[i]
            pot_r[i] += dt if d is None or d > dt else d
        for j in cols:
            d = dist_c[j]
            pot_c[j] += dt if d is None or d > dt else d
        # bottleneck along the alternating path
        push = demand[target]
        j = target
        while True:
            i = from_row[j]
            jb = from_col[i]
            if jb < 0:
                if supply[i] < push:
                    push = supply[i]
                break
            if flow[i][jb] < push:
                push = flow[i][jb]
            j = jb
        j = target
        while True:
            i = from_row[j]
            flow[i][j] += push
            total += push * C[i][j]
            jb = from_col[i]
            if jb < 0:
                supply[i] -= push
                break
            flow[i][jb] -= push
            total -= push * C[i][jb]
            j = jb
        demand[target] -= push
        need -= push
    return total
