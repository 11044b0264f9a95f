"""Unbalanced Wasserstein distance on measures of total mass at most one.

For ``|mu| >= |nu|``::

    W(mu, nu) = |mu| - |nu| + min { sum_ij d(i,j) x_ij :
                                    sum_i x_ij = nu_j, sum_j x_ij <= mu_i, x >= 0 }

i.e. all of ``nu`` is transported, ``mu`` may be partially used and the
unused mass is paid for at unit price.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .flow import FlowNetwork, dense_transport, min_cost_flow
from .measure import rescale_to_common_denominator, total_mass
from .prokhorov import _cross


def transport_cost(p, q, C):
    """Min cost of shipping all of ``q`` out of supplies ``p`` (needs sum(p) >= sum(q))."""
    need = sum(q)
    if need == 0:
        return 0
    s, t = 0, 1 + len(p) + len(q)
    net = FlowNetwork(t + 1, s, t)
    for i, pi in enumerate(p):
        net.add_arc(s, 1 + i, pi)
    for j, qj in enumerate(q):
        net.add_arc(1 + len(p) + j, t, qj)
    for i, row in enumerate(C):
        for j, c in enumerate(row):
            net.add_arc(1 + i, 1 + len(p) + j, need, c)
    cost, feasible = min_cost_flow(net, need)
    if not feasible:
        raise RuntimeError("transport infeasible although supply covers demand")
    return cost


def uw_units(p, q, C, scale=1):
    """Integer core: masses in one unit, costs as integers in units of ``1/scale``.

    Returns ``(|p| - |q|) * scale + min transport cost``, i.e. the distance
    in units of ``1 / (mass_denominator * scale)``.
    """
    if sum(p) < sum(q):
        p, q = q, p
        C = [list(col) for col in zip(*C)] if C else [[] for _ in p]
    return (sum(p) - sum(q)) * scale + dense_transport(p, q, C)


def uw_distance(mu, nu, space):
    """Unbalanced Wasserstein distance; exact ``Fraction`` for rational ground distances."""
    if len(mu) != space.m or len(nu) != space.m:
        raise ValueError("measures must live on the ground space")
    mu, nu = rescale_to_common_denominator(mu, nu)
    p, q, C = _cross(mu, nu, space)
    if not p or not q:
        gap = abs(total_mass(mu) - total_mass(nu))
        return gap if space.is_exact else float(gap)
    if space.is_exact:
        L = lcm(1, *(Fraction(c).denominator for row in C for c in row))
        Ci = [[int(Fraction(c) * L) for c in row] for row in C]
        return Fraction(uw_units(p, q, Ci, L), mu.denom * L)
    if sum(p) < sum(q):
        p, q = q, p
        C = [list(col) for col in zip(*C)]
    gap = (sum(p) - sum(q)) / mu.denom
    return gap + transport_cost(p, q, [[float(c) for c in row] for row in C]) / mu.denom
