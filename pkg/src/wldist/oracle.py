"""Brute-force reference implementations for tests and fixture generation.

Nothing here imports from the production solvers; the only shared pieces
are the plain data containers.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product


class OracleLimitError(ValueError):
    pass


def _masses(mu):
    return [Fraction(x, mu.denom) for x in mu.num]


def _subset_sums(w):
    """``out[mask]`` = total of ``w`` over the bits of ``mask``."""
    out = [0] * (1 << len(w))
    for mask in range(1, len(out)):
        low = (mask & -mask).bit_length() - 1
        out[mask] = out[mask & (mask - 1)] + w[low]
    return out


def prokhorov_bruteforce(mu, nu, space):
    """Prokhorov distance by checking both defining inequalities on every subset.

    For each candidate radius eps (a ground distance or zero) the worst
    violation over all subsets A is

        r(eps) = max_A max(mu(A) - nu(A^eps), nu(A) - mu(A^eps))

    with the closed enlargement ``A^eps = {y : d(x, y) <= eps, x in A}``;
    the distance is the smallest ``max(eps, r(eps))``.
    """
    m = space.m
    if m > 12:
        raise OracleLimitError("support too large for subset enumeration")
    denom = mu.denom * nu.denom // _gcd(mu.denom, nu.denom)
    a = [x * (denom // mu.denom) for x in mu.num]
    b = [x * (denom // nu.denom) for x in nu.num]
    mass_a, mass_b = _subset_sums(a), _subset_sums(b)
    D = space.D
    exact = all(isinstance(x, (int, Fraction)) for row in D for x in row)
    tol = 0 if exact else 1e-9
    radii = sorted({0, *(x for row in D for x in row)})
    best = None
    for eps in radii:
        ball = [sum(1 << y for y in range(m) if D[x][y] <= eps + tol) for x in range(m)]
        grown = [0] * (1 << m)
        worst = 0
        for mask in range(1, 1 << m):
            low = (mask & -mask).bit_length() - 1
            g = grown[mask] = grown[mask & (mask - 1)] | ball[low]
            worst = max(worst, mass_a[mask] - mass_b[g], mass_b[mask] - mass_a[g])
        worst = Fraction(worst, denom)
        value = eps if worst <= eps + tol else worst
        if best is None or value < best:
            best = value
    return best if exact else float(best)


def _min_matching(rows, cols, cost):
    """Min-cost perfect matching of equally many units via subset DP."""
    k = len(rows)
    assert len(cols) == k
    INF = None
    dp = {0: 0}
    for i in range(k):
        nxt = {}
        for mask, val in dp.items():
            for j in range(k):
                if not mask >> j & 1:
                    c = val + cost(rows[i], cols[j])
                    key = mask | 1 << j
                    if nxt.get(key, INF) is None or c < nxt[key]:
                        nxt[key] = c
        dp = nxt
    return dp[(1 << k) - 1]


def uw_bruteforce(mu, nu, space):
    """Unbalanced Wasserstein via the star-space reduction.

    Distances are first scaled into [0, 1]; a point ``*`` at distance one
    from everything absorbs each measure's missing mass, and the resulting
    balanced problem on unit atoms is solved by exhaustive matching.
    """
    m = space.m
    if max(len(mu.support()), len(nu.support())) > 12:
        raise OracleLimitError("support too large")
    if mu.denom > 12 or nu.denom > 12:
        raise OracleLimitError("denominator too large")
    exact = all(isinstance(x, (int, Fraction)) for row in space.D for x in row)
    dmax = max((x for row in space.D for x in row), default=0)
    scale = dmax if dmax > 0 else 1
    if exact:
        scale = Fraction(scale)
    a, b = _masses(mu), _masses(nu)
    denom = mu.denom * nu.denom // _gcd(mu.denom, nu.denom)
    if denom > 12:
        raise OracleLimitError("common denominator too large")
    star = m

    def atoms(w):
        units = []
        for x, wx in enumerate(w):
            units += [x] * int(wx * denom)
        units += [star] * int((1 - sum(w)) * denom)
        return units

    def cost(x, y):
        if x == star and y == star:
            return 0
        if x == star or y == star:
            return 1
        return space.D[x][y] / scale

    rows, cols = atoms(a), atoms(b)
    scaled = Fraction(_min_matching(rows, cols, cost)) / denom if exact else \
        _min_matching(rows, cols, cost) / denom
    gap = abs(sum(a) - sum(b))
    if not exact:
        gap = float(gap)
    return gap + (scaled - gap) * scale


def _gcd(x, y):
    while y:
        x, y = y, x % y
    return x


def hom_count_bruteforce(T, G):
    """Count maps V(T) -> V(G) sending every edge of ``T`` to an edge of ``G``.

    ``T`` only needs ``order`` and ``edges()``; any pattern graph works.
    """
    tree_order, tree_edges = T.order, list(T.edges())
    if G.n ** tree_order > 10**7:
        raise OracleLimitError("instance too large")
    adjsets = [set(a) for a in G.adj]
    count = 0
    for phi in product(range(G.n), repeat=tree_order):
        if all(phi[v] in adjsets[phi[u]] for u, v in tree_edges):
            count += 1
    return count


def wl_partition_bruteforce(graphs, rounds):
    """Plain count-based colour refinement on a disjoint union, for cross-checks.

    Returns the colour of every vertex (as nested tuples) after ``rounds`` rounds.
    """
    cols = [[() for _ in range(G.n)] for G in graphs]
    for _ in range(rounds):
        cols = [[(c[v], tuple(sorted(c[u] for u in G.adj[v]))) for v in range(G.n)]
                for G, c in zip(graphs, cols)]
    return cols


def didm_distance_bruteforce(G, H, h, base="W"):
    """Graph distance after ``h`` rounds, recomputed on the disjoint union of the vertices.

    Every vertex keeps its own point (no colour merging) and the full metric
    on ``V(G) + V(H)``, within-graph pairs included, is rebuilt each level
    from the brute-force base metric. Returns ``(delta, D_h)``.
    """
    from .measure import GroundSpace, ScaledMeasure

    solve = prokhorov_bruteforce if base == "P" else uw_bruteforce
    n, m = G.n, H.n
    k = n + m
    owner = [(G, 0)] * n + [(H, n)] * m
    denom = n * m // _gcd(n, m)

    def measure(weights):
        return ScaledMeasure(tuple(int(w * denom) for w in weights), denom)

    nbr = []
    for x in range(k):
        graph, off = owner[x]
        w = [Fraction(0)] * k
        for u in graph.adj[x - off]:
            w[off + u] += Fraction(1, graph.n)
        nbr.append(measure(w))
    D = [[Fraction(0)] * k for _ in range(k)]
    for _ in range(h):
        space = GroundSpace(D)
        new = [[Fraction(0)] * k for _ in range(k)]
        for x in range(k):
            for y in range(x + 1, k):
                new[x][y] = new[y][x] = Fraction(solve(nbr[x], nbr[y], space))
        D = new
    nu_g = measure([Fraction(1, n)] * n + [Fraction(0)] * m)
    nu_h = measure([Fraction(0)] * n + [Fraction(1, m)] * m)
    return Fraction(solve(nu_g, nu_h, GroundSpace(D))), D
