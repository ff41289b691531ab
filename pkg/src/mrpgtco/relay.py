"""Inter-cluster relay decision and next-hop planning."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import DEFAULT, EnergyParams, amplifier_cost
from .network import BASE_STATION


@dataclass(frozen=True)
class RelayQuery:
    d_to_relay: float
    d_relay_to_dest: float
    d_to_dest: float
    n_c: int = 1
    l: int = 4000


@dataclass
class RelayPlan:
    next_hop: dict[int, int] = field(default_factory=dict)
    load: dict[int, int] = field(default_factory=dict)
    # heads ordered farthest-first; a valid processing order for forwarding
    order: list[int] = field(default_factory=list)

    def path(self, head: int) -> list[int]:
        hops = [head]
        while self.next_hop[hops[-1]] != BASE_STATION:
            hops.append(self.next_hop[hops[-1]])
            if len(hops) > len(self.next_hop) + 1:
                raise RuntimeError("relay plan contains a cycle")
        return hops


def relay_beneficial(q: RelayQuery, params: EnergyParams = DEFAULT, as_printed: bool = False) -> bool:
    """True when forwarding through the relay costs less amplifier energy than going direct.

    Compares ``amp(d_to_relay) + n_c * (e_elec + amp(d_relay_to_dest))``
    against ``amp(d_to_dest)``; the amplifier regime of each leg is chosen
    independently.  ``as_printed`` adds the relay term to the saving
    instead of subtracting it and is kept only for comparison.
    """
    relay_term = q.n_c * (params.e_elec + amplifier_cost(q.d_relay_to_dest, params))
    direct = amplifier_cost(q.d_to_dest, params)
    hop = amplifier_cost(q.d_to_relay, params)
    if as_printed:
        return direct - hop + relay_term > 0
    return hop + relay_term < direct


def regime_cell(q: RelayQuery, params: EnergyParams = DEFAULT) -> tuple[bool, bool, bool]:
    """(source->relay, relay->dest, source->dest) legs that exceed the crossover distance."""
    d_o = params.d_o
    return (q.d_to_relay > d_o, q.d_relay_to_dest > d_o, q.d_to_dest > d_o)


def relay_distance_bound(q: RelayQuery, params: EnergyParams = DEFAULT) -> float:
    """Largest source->relay distance (exclusive) at which relaying still saves energy.

    Solved per amplifier regime of the three legs; returns 0 when no
    relay distance can help.  Only meaningful for the regime ``q`` lies in.
    """
    far_hop, far_relay, far_direct = regime_cell(q, params)
    direct = (params.e_mp * q.d_to_dest ** 4 if far_direct else params.e_fs * q.d_to_dest ** 2)
    relay = q.n_c * (params.e_elec + (params.e_mp * q.d_relay_to_dest ** 4 if far_relay
                                      else params.e_fs * q.d_relay_to_dest ** 2))
    slack = direct - relay
    if slack <= 0:
        return 0.0
    if far_hop:
        return (slack / params.e_mp) ** 0.25
    return (slack / params.e_fs) ** 0.5


def relay_score(residual_energy: float, neighbors: int, d_to_bs: float) -> float:
    """Preference for a relay: more energy, fewer neighbours, nearer the base station."""
    if d_to_bs <= 0:
        return math.inf
    return residual_energy / (max(neighbors, 1) * d_to_bs)


def build_relay_plan(heads, positions: np.ndarray, energy: np.ndarray, bs,
                     neighbor_counts, params: EnergyParams = DEFAULT, l: int = 4000,
                     fixed_nc: int | None = None, as_printed: bool = False) -> RelayPlan:
    """Assign each head a next hop, farthest heads first.

    A head may forward only to a head strictly closer to the base station for
    which :func:`relay_beneficial` holds, using the relay's current load plus
    one as its forwarding burden (or ``fixed_nc``).  Among those, the best
    :func:`relay_score` wins, lower id on ties; otherwise it goes direct.
    """
    heads = [int(h) for h in heads]
    bs = np.asarray(bs, dtype=float)
    d_bs = {h: float(np.hypot(*(positions[h] - bs))) for h in heads}
    order = sorted(heads, key=lambda h: (-d_bs[h], h))
    plan = RelayPlan(order=order, load={h: 0 for h in heads})
    for h in order:
        best, best_score = BASE_STATION, -math.inf
        for r in heads:
            if d_bs[r] >= d_bs[h]:
                continue
            n_c = fixed_nc if fixed_nc is not None else plan.load[r] + 1
            q = RelayQuery(float(np.hypot(*(positions[h] - positions[r]))), d_bs[r], d_bs[h], n_c, l)
            if not relay_beneficial(q, params, as_printed):
                continue
            score = relay_score(float(energy[r]), int(neighbor_counts[r]), d_bs[r])
            if score > best_score or (score == best_score and r < best):
                best, best_score = r, score
        plan.next_hop[h] = best
        if best != BASE_STATION:
            plan.load[best] += 1 + plan.load[h]
    return plan
