"""Penalised local clustering game and candidate cluster-head draw.

Each alive node plays a symmetric CH/CM game against its neighbours.  A
node that refuses to serve while holding comparatively high residual energy
or many neighbours has its member payoff scaled down by the penalty
coefficient ``phi``; the mixed equilibrium then gives the probability of
volunteering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import energy as em
from .config import NetworkConfig


@dataclass(frozen=True)
class GameContext:
    energy: float
    degree: int
    energy_max: float
    energy_min: float
    degree_max: int
    degree_min: int
    cost_ch: float = 1.0
    cost_cm: float = 0.1


@dataclass
class CandidateSet:
    round: int
    candidates: list[int]
    node_ids: np.ndarray
    probabilities: np.ndarray
    draws: np.ndarray
    penalties: np.ndarray = field(default_factory=lambda: np.empty(0))


def _ratio(num, den):
    # a pool with no spread gives the neutral value 0.5
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    safe = np.where(den > 0, den, 1.0)
    return np.where(den > 0, num / safe, 0.5)


def penalty(ctx: GameContext, alpha: float = 0.7, beta: float = 0.3) -> float:
    e_term = _ratio(ctx.energy_max - ctx.energy, ctx.energy_max - ctx.energy_min)
    d_term = _ratio(ctx.degree_max - ctx.degree, ctx.degree_max - ctx.degree_min)
    return float(np.clip(alpha * e_term + beta * d_term, 0.0, 1.0))


def penalties(energy: np.ndarray, alive: np.ndarray, adj: np.ndarray,
              alpha: float, beta: float) -> np.ndarray:
    """Vectorised penalty for every node; extrema are over neighbours plus self."""
    pool = adj | np.diag(alive)
    degree = adj.sum(axis=1).astype(float)
    e = np.broadcast_to(energy, pool.shape)
    dg = np.broadcast_to(degree, pool.shape)
    e_max = np.where(pool, e, -np.inf).max(axis=1)
    e_min = np.where(pool, e, np.inf).min(axis=1)
    d_max = np.where(pool, dg, -np.inf).max(axis=1)
    d_min = np.where(pool, dg, np.inf).min(axis=1)
    phi = alpha * _ratio(e_max - energy, e_max - e_min) + beta * _ratio(d_max - degree, d_max - d_min)
    return np.where(alive, np.clip(phi, 0.0, 1.0), 0.0)


def estimate_costs(d_to_bs, n_alive: int, k: int, config: NetworkConfig):
    """Pre-clustering guesses of a node's cost as cluster head and as member."""
    params = em.EnergyParams.from_config(config)
    members = math.ceil(n_alive / k)
    d_dest = np.minimum(d_to_bs, config.expected_dest_distance)
    e_ch = em.ch_round_energy(members, config.forwarding_estimate, d_dest, config.packet_bits, params)
    d_cm = math.sqrt(em.expected_sq_member_distance(config.area_side, k))
    e_cm = em.cm_round_energy(d_cm, config.packet_bits, params)
    return e_ch, e_cm


LONE_RULES = ("pair", "serve")


def nash_probability(phi: float, cost_ch: float, cost_cm: float, degree: int,
                     lone_rule: str = "pair") -> float:
    """Equilibrium probability of declaring cluster head.

    ``1 - ((phi*E_CH - E_CM) / (phi*E_CH)) ** (1 / (degree - 1))``.  Returns 1
    when the penalised member payoff cannot beat serving
    (``phi * cost_ch <= cost_cm``).  For nodes with at most one neighbour,
    ``lone_rule="pair"`` floors the exponent's denominator at 1 (the
    two-player game) and ``"serve"`` returns 1.
    """
    if cost_ch <= 0 or cost_cm <= 0:
        raise ValueError("costs must be positive")
    if lone_rule not in LONE_RULES:
        raise ValueError(f"unknown lone_rule {lone_rule!r}")
    if phi * cost_ch <= cost_cm or (degree <= 1 and lone_rule == "serve"):
        return 1.0
    base = (phi * cost_ch - cost_cm) / (phi * cost_ch)
    return min(1.0, max(0.0, 1.0 - base ** (1.0 / max(degree - 1, 1))))


def nash_probabilities(phi, cost_ch, cost_cm, degree, lone_rule: str = "pair") -> np.ndarray:
    if lone_rule not in LONE_RULES:
        raise ValueError(f"unknown lone_rule {lone_rule!r}")
    phi, cost_ch, cost_cm, degree = np.broadcast_arrays(
        np.asarray(phi, float), np.asarray(cost_ch, float), np.asarray(cost_cm, float),
        np.asarray(degree, float))
    served = phi * cost_ch
    forced = served <= cost_cm
    if lone_rule == "serve":
        forced |= degree <= 1
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        base = np.where(forced, 0.5, (served - cost_cm) / np.where(served > 0, served, 1.0))
        exponent = 1.0 / np.maximum(degree - 1, 1.0)
        return np.where(forced, 1.0, np.clip(1.0 - base ** exponent, 0.0, 1.0))


def utilities(p: float, phi: float, cost_ch: float, cost_cm: float, degree: int,
              as_printed: bool = False) -> tuple[float, float]:
    """Expected payoffs (U_CH, U_CM) of serving vs joining under mixed play.

    ``U_CM`` is the penalised member payoff times the chance that at least
    one opponent serves, ``1 - (1 - p)**(degree - 1)``.  ``as_printed``
    swaps the exponent for ``1 / (degree - 1)``, which does not make the
    equilibrium probability an indifference point; kept for comparison.
    """
    exponent = 1.0 / (degree - 1) if as_printed else degree - 1
    u_ch = 1.0 / cost_ch
    u_cm = phi / cost_cm * (1.0 - (1.0 - p) ** exponent)
    return u_ch, u_cm


def select_candidates(energy: np.ndarray, alive: np.ndarray, adj: np.ndarray,
                      d_to_bs: np.ndarray, k: int, config: NetworkConfig,
                      rng: np.random.Generator, round_index: int = 0,
                      max_games: int = 1, min_candidates: int | None = None) -> CandidateSet:
    """Play the game for every alive node and draw the candidate set.

    Each game draws one number per alive node in node-id order; a node
    becomes a candidate when its probability is at least its draw.  Further
    games (up to ``max_games``) are played only while fewer than
    ``min_candidates`` (default ``k``) candidates exist; every game's draws are kept in ``draws`` (one row per
    game).
    """
    ids = np.flatnonzero(alive)
    if ids.size == 0:
        raise ValueError("no alive nodes")
    phi = penalties(energy, alive, adj, config.alpha, config.beta)[ids]
    degree = adj[ids].sum(axis=1)
    e_ch, e_cm = estimate_costs(d_to_bs[ids], ids.size, k, config)
    p = nash_probabilities(phi, e_ch, e_cm, degree, config.lone_rule)
    target = k if min_candidates is None else min_candidates
    chosen = np.zeros(ids.size, dtype=bool)
    draws = []
    for _ in range(max(1, max_games)):
        draw = rng.random(ids.size)
        draws.append(draw)
        chosen |= p >= draw
        if chosen.sum() >= target:
            break
    return CandidateSet(round_index, ids[chosen].tolist(), ids, p, np.array(draws), phi)
