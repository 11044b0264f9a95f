"""Colour refinement run in parallel on two graphs with a cross-graph distance matrix.

After ``t`` rounds every vertex ``u`` of ``G`` carries the iterated degree
measure "neighbour colours at round ``t-1``, each neighbour weighing
``1/|V(G)|``". Distances between these measures are computed level by
level: ``D_{t+1}[a, b]`` is the base metric (Prokhorov or unbalanced
Wasserstein) between the neighbour measures of colour ``a`` of ``G`` and
colour ``b`` of ``H``, over ground distances ``D_t``. Only cross pairs are
ever needed, and only one value per distinct colour pair.

Internally ``D_t`` holds integer numerators over a level scale ``S_t`` and
masses are integers over ``N = |V(G)| * |V(H)|``:

* Prokhorov: ``S_t = N``; every value is a multiple of ``1/N``, exactly.
* Wasserstein, exact: ``S_t = N**t``.
* Wasserstein, fixed point: ``S_t = FIXED_SCALE`` with round-to-nearest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .prokhorov import prokhorov_units
from .wasserstein import uw_units

PROKHOROV = "P"
WASSERSTEIN = "W"
FIXED_SCALE = 10**12

_BASE_ALIASES = {"p": PROKHOROV, "prokhorov": PROKHOROV, "w": WASSERSTEIN, "wasserstein": WASSERSTEIN}


def normalize_base(base):
    try:
        return _BASE_ALIASES[str(base).lower()]
    except KeyError:
        raise ValueError(f"unknown base metric {base!r}; use 'P' or 'W'") from None


class LevelCapExceeded(RuntimeError):
    pass


# ------------------------------------------------------------ refinement

@dataclass(frozen=True)
class WlColoring:
    """Colours per level; ``levels[h][v]`` is the colour id of ``v`` after ``h`` rounds."""

    levels: tuple[tuple[int, ...], ...]
    stable_at: int | None

    def num_colors(self, h):
        return len(set(self.levels[h]))


def _refine(G, colors):
    sig = [(colors[v], tuple(sorted(colors[u] for u in G.adj[v]))) for v in range(G.n)]
    relabel = {s: i for i, s in enumerate(sorted(set(sig)))}
    return tuple(relabel[s] for s in sig)


def wl_refine(G, max_h):
    """Colour refinement from the constant colouring, canonical ids per level."""
    if max_h < 0:
        raise ValueError("max_h must be nonnegative")
    levels = [tuple([0] * G.n)]
    stable_at = None
    for h in range(1, max_h + 1):
        levels.append(_refine(G, levels[-1]))
        if stable_at is None and len(set(levels[-1])) == len(set(levels[-2])):
            stable_at = h
    return WlColoring(tuple(levels), stable_at)


def joint_refine_step(G, H, cg, ch):
    """One round of refinement of ``G`` and ``H`` together, with order-normalised counts.

    Two vertices share a colour after the round exactly when their iterated
    degree measures coincide, even across graphs of different order.
    """
    weight = {id(G): H.n, id(H): G.n}   # count / order, scaled by n*m

    def sig(graph, cols, v):
        w = weight[id(graph)]
        cnt = {}
        for u in graph.adj[v]:
            cnt[cols[u]] = cnt.get(cols[u], 0) + w
        return (cols[v], tuple(sorted(cnt.items())))

    sg = [sig(G, cg, v) for v in range(G.n)]
    sh = [sig(H, ch, v) for v in range(H.n)]
    relabel = {s: i for i, s in enumerate(sorted(set(sg) | set(sh)))}
    return tuple(relabel[s] for s in sg), tuple(relabel[s] for s in sh)


def joint_refine(G, H, rounds):
    """Joint colourings ``(colors_G, colors_H)`` for rounds ``0..rounds``."""
    cg, ch = (0,) * G.n, (0,) * H.n
    out = [(cg, ch)]
    for _ in range(rounds):
        cg, ch = joint_refine_step(G, H, cg, ch)
        out.append((cg, ch))
    return out


def stabilization_index(G, H):
    """First round ``h >= 1`` whose joint partition equals that of round ``h - 1``."""
    cg, ch = (0,) * G.n, (0,) * H.n
    prev, h = 1, 0
    while True:
        h += 1
        cg, ch = joint_refine_step(G, H, cg, ch)
        k = len(set(cg) | set(ch))
        if k == prev:
            return h
        prev = k


# ---------------------------------------------------------------- engine

def _color_hist(G, new, old):
    """For each new colour: (class size, {old colour of neighbour: count})."""
    k = max(new) + 1 if new else 0
    size = [0] * k
    hist = [None] * k
    for v, c in enumerate(new):
        size[c] += 1
        if hist[c] is None:
            h = {}
            for u in G.adj[v]:
                h[old[u]] = h.get(old[u], 0) + 1
            hist[c] = sorted(h.items())
    return size, hist


class PairwiseWL:
    """Level-by-level state of the parallel refinement on ``(G, H)``.

    ``exact`` only affects the Wasserstein base (Prokhorov values are always
    exact). ``round_after`` switches exact Wasserstein to a fixed grid of
    ``1/N**round_after`` once that many levels are done.
    """

    def __init__(self, G, H, base=WASSERSTEIN, exact=False, round_after=None):
        if G.n == 0 or H.n == 0:
            raise ValueError("graphs must have at least one vertex")
        self.G, self.H = G, H
        self.base = normalize_base(base)
        self.exact = exact
        self.round_after = round_after
        self.N = G.n * H.n
        self.h = 0
        self.cg = (0,) * G.n
        self.ch = (0,) * H.n
        self.size_g = [G.n]
        self.size_h = [H.n]
        self.D = [[0]]
        self.scale = self.N if self.base == PROKHOROV else 1
        self.pairs_computed = 0

    # distances are D / scale
    def value(self, a, b):
        return Fraction(self.D[a][b], self.scale)

    def _next_scale(self):
        if self.base == PROKHOROV:
            return self.N
        if not self.exact:
            return FIXED_SCALE
        if self.round_after is not None and self.h >= self.round_after:
            return self.scale
        return self.scale * self.N

    def step(self):
        G, H, N = self.G, self.H, self.N
        new_g, new_h = _refine(G, self.cg), _refine(H, self.ch)
        size_g, hist_g = _color_hist(G, new_g, self.cg)
        size_h, hist_h = _color_hist(H, new_h, self.ch)
        m, n = H.n, G.n
        D = self.D
        S = self.scale
        S_new = self._next_scale()
        unit = N * S
        newD = []
        for ha in hist_g:
            rows = [c for c, _ in ha]
            p = [cnt * m for _, cnt in ha]
            Drows = [D[c] for c in rows]
            out = []
            for hb in hist_h:
                q = [cnt * n for _, cnt in hb]
                C = [[Dr[c] for c, _ in hb] for Dr in Drows]
                if self.base == PROKHOROV:
                    out.append(prokhorov_units(p, q, C))
                else:
                    num = uw_units(p, q, C, S)
                    if S_new != unit:
                        num = (2 * num * S_new + unit) // (2 * unit)
                    out.append(num)
            newD.append(out)
        self.pairs_computed += len(hist_g) * len(hist_h)
        self.cg, self.ch = new_g, new_h
        self.size_g, self.size_h = size_g, size_h
        self.D, self.scale = newD, S_new
        self.h += 1

    def vertex_matrix(self):
        """Current distances broadcast to vertex pairs, as exact fractions."""
        return [[Fraction(self.D[a][b], self.scale) for b in self.ch] for a in self.cg]

    def vertex_numerators(self):
        return [[self.D[a][b] for b in self.ch] for a in self.cg]

    def delta(self):
        """Base-metric distance between the two colour distributions at this level."""
        p = [s * self.H.n for s in self.size_g]
        q = [s * self.G.n for s in self.size_h]
        if self.base == PROKHOROV:
            return Fraction(prokhorov_units(p, q, self.D), self.N)
        return Fraction(uw_units(p, q, self.D, self.scale), self.N * self.scale)


def _same_matrix(prev, prev_scale, cur, cur_scale):
    return all(a * cur_scale == b * prev_scale
               for ra, rb in zip(prev, cur) for a, b in zip(ra, rb))


def run_levels(G, H, h, base=WASSERSTEIN, exact=False):
    """Advance a :class:`PairwiseWL` to level ``h``; skips work once it reaches a fixed point."""
    eng = PairwiseWL(G, H, base, exact)
    prev = None
    while eng.h < h:
        ng, nh = len(eng.size_g), len(eng.size_h)
        eng.step()
        cur = (eng.vertex_numerators(), eng.scale)
        if (prev is not None and len(eng.size_g) == ng and len(eng.size_h) == nh
                and _same_matrix(prev[0], prev[1], cur[0], cur[1])):
            # the partition and the vertex-level matrix are both fixed,
            # so every later level repeats this one
            eng.h = h
            break
        prev = cur
    return eng


# --------------------------------------------------------------- public

@dataclass(frozen=True)
class CrossDistanceMatrix:
    """Vertex-level distances ``d^h(u, v)`` for ``u`` in ``G`` and ``v`` in ``H``."""

    h: int
    base: str
    entries: np.ndarray
    color_g: tuple[int, ...]
    color_h: tuple[int, ...]
    color_numerators: tuple[tuple[int, ...], ...]
    scale: int

    def exact(self, u, v):
        return Fraction(self.color_numerators[self.color_g[u]][self.color_h[v]], self.scale)


def pair_distance_matrix(G, H, h, base=WASSERSTEIN, exact=False):
    if h < 0:
        raise ValueError("h must be nonnegative")
    eng = run_levels(G, H, h, base, exact)
    scale = eng.scale
    entries = np.array([[eng.D[a][b] / scale for b in eng.ch] for a in eng.cg], dtype=float)
    if entries.size == 0:
        entries = entries.reshape(G.n, H.n)
    return CrossDistanceMatrix(h, eng.base, entries, eng.cg, eng.ch,
                               tuple(tuple(r) for r in eng.D), scale)


def delta_h(G, H, h, base=WASSERSTEIN, exact=False):
    """Distance between the two graphs' colour distributions after ``h`` rounds.

    Returns a ``Fraction`` when ``exact`` is set, otherwise a float.
    """
    if h < 0:
        raise ValueError("h must be nonnegative")
    value = run_levels(G, H, h, base, exact).delta()
    return value if exact else float(value)


def distance_trace(G, H, h_max, base=WASSERSTEIN, exact=False):
    """Yield ``(h, vertex matrix as Fractions, delta)`` for ``h = 0..h_max``."""
    eng = PairwiseWL(G, H, base, exact)
    yield 0, eng.vertex_matrix(), eng.delta()
    while eng.h < h_max:
        eng.step()
        yield eng.h, eng.vertex_matrix(), eng.delta()


def delta_stable_plus(G, H, extra=3, base=WASSERSTEIN, exact=False):
    """``delta_h`` at ``h = stabilization_index(G, H) + extra``."""
    h = stabilization_index(G, H) + extra
    value = delta_h(G, H, h, base, exact)
    return value, h


@dataclass(frozen=True)
class InfDistance:
    """Value of an ``h = inf`` distance with its additive error guarantee."""

    value: float | Fraction
    error: float
    levels: int

    def __float__(self):
        return float(self.value)


def _delta_inf(G, H, base, exact, round_after, max_levels):
    N = G.n * H.n
    cap = N * N if max_levels is None else max_levels
    eng = PairwiseWL(G, H, base, exact=exact, round_after=round_after)
    h_star = stabilization_index(G, H)
    best = [[Fraction(0)] * H.n for _ in range(G.n)]
    prev = None
    while True:
        if eng.h >= cap:
            raise LevelCapExceeded(f"no stabilisation within the level cap of {cap}")
        eng.step()
        h = eng.h
        cur = eng.vertex_numerators()
        S = eng.scale
        zero_pairs_final = h >= h_star
        done = True
        for u in range(G.n):
            bu, cu = best[u], cur[u]
            for v in range(H.n):
                if cu[v]:
                    val = Fraction(cu[v], S * h)
                    if val > bu[v]:
                        bu[v] = val
                    if bu[v] * (h + 1) < 1:
                        done = False
                elif not zero_pairs_final:
                    done = False
        if prev is not None and _same_matrix(prev[0], prev[1], cur, S):
            break
        if done:
            break
        prev = (cur, S)
    # d^inf is constant on pairs of final colour classes
    rep_g = {}
    for u, a in enumerate(eng.cg):
        rep_g.setdefault(a, u)
    rep_h = {}
    for v, b in enumerate(eng.ch):
        rep_h.setdefault(b, v)
    ka, kb = len(eng.size_g), len(eng.size_h)
    ground = [[best[rep_g[a]][rep_h[b]] for b in range(kb)] for a in range(ka)]
    L = math.lcm(1, *(x.denominator for row in ground for x in row))
    Ci = [[int(x * L) for x in row] for row in ground]
    p = [s * H.n for s in eng.size_g]
    q = [s * G.n for s in eng.size_h]
    if base == PROKHOROV:
        # masses are multiples of 1/N, distances multiples of 1/L
        M = math.lcm(N, L)
        Pi = [x * (M // N) for x in p]
        Qi = [x * (M // N) for x in q]
        Cm = [[x * (M // L) for x in row] for row in Ci]
        return Fraction(prokhorov_units(Pi, Qi, Cm), M), eng.h
    return Fraction(uw_units(p, q, Ci, L), N * L), eng.h


def delta_inf_P(G, H, max_levels=None):
    """Prokhorov distance of the limiting colour distributions, exactly.

    Vertex distances are ``max_h D_h(u, v) / h`` over ``h >= 1``; the loop
    ends at a fixed point of the matrix sequence or as soon as ``1/(h+1)``
    (an upper bound for every later term) no longer beats the running
    maxima. ``max_levels`` caps the number of rounds (default ``(n*m)**2``).
    """
    value, levels = _delta_inf(G, H, PROKHOROV, False, None, max_levels)
    return InfDistance(value, 0.0, levels)


def delta_inf_W(G, H, eps=1e-3, max_levels=None):
    """Wasserstein analogue of :func:`delta_inf_P` up to an additive ``eps``.

    Levels beyond ``ceil(log2(1/eps))`` are rounded to multiples of
    ``1/(n*m)**ceil(log2(1/eps))``, which keeps the matrix on a finite grid.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = max(1, math.ceil(math.log2(1 / eps)))
    value, levels = _delta_inf(G, H, WASSERSTEIN, True, k, max_levels)
    return InfDistance(value, eps, levels)
