"""Prokhorov distance between finite measures of total mass at most one.

With ``|mu| >= |nu|`` the deficiency

    rho(eps) = |mu| - max { sum_{d(i,j) <= eps} x_ij :
                            sum_i x_ij = nu_j, sum_j x_ij <= mu_i, x >= 0 }

is a max-flow value, and

    P(mu, nu) = min over eps in D' of max(eps, rho(eps)),

with ``D'`` the distinct ground distances plus zero. ``rho`` is
non-increasing, so the minimum sits where ``rho`` crosses the diagonal and
is found by bisection over the sorted candidates.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .flow import FlowNetwork, max_flow
from .measure import METRIC_TOL, rescale_to_common_denominator, total_mass


def _cross(mu, nu, space):
    """Restrict to supports: masses p, q and the cross distance block."""
    rows = mu.support()
    cols = nu.support()
    p = [mu.num[i] for i in rows]
    q = [nu.num[j] for j in cols]
    C = [[space.D[i][j] for j in cols] for i in rows]
    return p, q, C


def _matched(p, q, C, admit):
    """Max mass of q coverable from p through admitted pairs."""
    s, t = 0, 1 + len(p) + len(q)
    net = FlowNetwork(t + 1, s, t)
    big = sum(p)
    for i, pi in enumerate(p):
        net.add_arc(s, 1 + i, pi)
    for j, qj in enumerate(q):
        net.add_arc(1 + len(p) + j, t, qj)
    any_arc = False
    for i, row in enumerate(C):
        for j, c in enumerate(row):
            if admit(c):
                net.add_arc(1 + i, 1 + len(p) + j, big)
                any_arc = True
    return max_flow(net) if any_arc else 0


def _bisect(candidates, rho, ok):
    """min over candidates of max(eps, rho(eps)) for non-increasing rho."""
    lo, hi = 0, len(candidates)
    cache = {}

    def r(k):
        if k not in cache:
            cache[k] = rho(candidates[k])
        return cache[k]

    while lo < hi:
        mid = (lo + hi) // 2
        if ok(r(mid), candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    if lo == len(candidates):
        return r(lo - 1), "rho"
    if lo == 0:
        return candidates[0], "eps"
    prev = r(lo - 1)
    if ok(prev, candidates[lo]):
        return prev, "rho"
    return candidates[lo], "eps"


def prokhorov_units(p, q, C):
    """Exact Prokhorov distance with masses and distances as integers in one unit."""
    if sum(p) < sum(q):
        p, q = q, p
        C = [list(col) for col in zip(*C)] if C else []
    total = sum(p)
    candidates = sorted({0, *(c for row in C for c in row)})

    def rho(eps):
        return total - _matched(p, q, C, lambda c: c <= eps)

    value, _ = _bisect(candidates, rho, lambda r, eps: r <= eps)
    return value


def _prokhorov_float(p, q, C, denom, tol=METRIC_TOL):
    if sum(p) < sum(q):
        p, q = q, p
        C = [list(col) for col in zip(*C)] if C else []
    total = sum(p)
    candidates = sorted({0.0, *(float(c) for row in C for c in row)})

    def rho(eps):
        return (total - _matched(p, q, C, lambda c: c <= eps + tol)) / denom

    value, _ = _bisect(candidates, rho, lambda r, eps: r <= eps + tol)
    return float(value)


def rho(mu, nu, space, eps):
    """Deficiency ``rho(eps)`` in mass units (an exact ``Fraction``).

    The heavier measure plays the supply side, so ``rho(mu, nu) == rho(nu, mu)``.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    mu, nu = rescale_to_common_denominator(mu, nu)
    p, q, C = _cross(mu, nu, space)
    if sum(p) < sum(q):
        p, q = q, p
        C = [list(col) for col in zip(*C)] if C else []
    if space.is_exact and not isinstance(eps, float):
        admit = lambda c: c <= eps  # noqa: E731
    else:
        admit = lambda c: c <= eps + METRIC_TOL  # noqa: E731
    return Fraction(sum(p) - _matched(p, q, C, admit), mu.denom)


def prokhorov_distance(mu, nu, space):
    """Prokhorov distance; exact ``Fraction`` when the ground distances are rational."""
    if len(mu) != space.m or len(nu) != space.m:
        raise ValueError("measures must live on the ground space")
    mu, nu = rescale_to_common_denominator(mu, nu)
    p, q, C = _cross(mu, nu, space)
    if not q or not p:
        # nothing to match: rho equals the larger mass for every eps
        value = max(total_mass(mu), total_mass(nu))
        return value if space.is_exact else float(value)
    if space.is_exact:
        L = lcm(mu.denom, *(Fraction(c).denominator for row in C for c in row))
        f = L // mu.denom
        Ci = [[int(Fraction(c) * L) for c in row] for row in C]
        return Fraction(prokhorov_units([x * f for x in p], [x * f for x in q], Ci), L)
    return _prokhorov_float(p, q, C, mu.denom)
