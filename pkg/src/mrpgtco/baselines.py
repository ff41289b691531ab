"""Comparison protocols: residual-energy LEACH, LGCA and ECAGT.

All three elect heads locally and send every head's aggregate straight to
the base station.
"""

from __future__ import annotations

import math

import numpy as np


def _lone(degree, lone_rule):
    # nodes the exponent 1/(Nb-1) cannot handle; "pair" plays them as a two-player game
    if lone_rule not in ("pair", "serve"):
        raise ValueError(f"unknown lone_rule {lone_rule!r}")
    forced = (degree <= 1) if lone_rule == "serve" else np.zeros(degree.shape, dtype=bool)
    return forced, 1.0 / np.maximum(degree - 1, 1.0)


def lgca_probability(degree, w: float = 0.05, lone_rule: str = "serve"):
    """Symmetric local-game equilibrium ``1 - w**(1/(Nb-1))``.

    Nodes with at most one neighbour get 1 under ``lone_rule="serve"`` and
    ``1 - w`` under ``"pair"``.
    """
    degree = np.asarray(degree, dtype=float)
    forced, exponent = _lone(degree, lone_rule)
    p = np.where(forced, 1.0, 1.0 - w ** exponent)
    return float(p) if p.ndim == 0 else p


def ecagt_probability(degree, w: float, e_i, e_ave, alpha: float = 8.0,
                      interpretation: str = "energy-forward", lone_rule: str = "serve"):
    """LGCA probability reshaped by the node's energy relative to its neighbourhood.

    ``energy-forward`` scales the refusal term by ``(e_ave / e_i)**alpha`` so
    richer nodes volunteer more often; ``as-printed`` uses ``(e_i / e_ave)**alpha``.
    """
    degree = np.asarray(degree, dtype=float)
    e_i = np.asarray(e_i, dtype=float)
    e_ave = np.asarray(e_ave, dtype=float)
    if np.any(e_i <= 0) or np.any(e_ave <= 0):
        raise ValueError("energies must be positive")
    if interpretation not in ("energy-forward", "as-printed"):
        raise ValueError(f"unknown interpretation {interpretation!r}")
    ratio = e_ave / e_i if interpretation == "energy-forward" else e_i / e_ave
    forced, exponent = _lone(degree, lone_rule)
    p = np.where(forced, 1.0, np.clip(1.0 - w ** exponent * ratio ** alpha, 0.0, 1.0))
    return float(p) if p.ndim == 0 else p


def rleach_period(p: float) -> int:
    # 1 // 0.1 == 9.0 in binary floating point; floor the true quotient instead
    return max(1, math.floor(1.0 / p + 1e-9))


def rleach_threshold(round_index: int, p: float, e_res, e_init: float, eligible=True):
    """LEACH threshold scaled by the residual energy fraction.

    ``round_index`` is zero-based.  Nodes that served within the current
    epoch (``eligible`` false) get 0.
    """
    period = rleach_period(p)
    base = p / (1.0 - p * (round_index % period))
    t = np.clip(base * np.asarray(e_res, dtype=float) / e_init, 0.0, 1.0)
    t = np.where(eligible, t, 0.0)
    return float(t) if t.ndim == 0 else t


def lgca_final_contention(candidates, positions: np.ndarray, radius: float,
                          rng: np.random.Generator) -> list[int]:
    """Backoff contention: earliest timer wins unless a winner is already within ``radius``."""
    candidates = sorted(int(c) for c in candidates)
    if not candidates:
        return []
    backoff = rng.random(len(candidates))
    order = [candidates[i] for i in np.argsort(backoff, kind="stable")]
    return _exclusive_pick(order, positions, radius)


def ecagt_final_selection(candidates, positions: np.ndarray, energy: np.ndarray,
                          radius: float) -> list[int]:
    """Highest residual energy wins within each ``radius`` neighbourhood (lower id on ties)."""
    order = sorted((int(c) for c in candidates), key=lambda c: (-energy[c], c))
    return _exclusive_pick(order, positions, radius)


def _exclusive_pick(order, positions, radius):
    final: list[int] = []
    for c in order:
        if all(np.hypot(*(positions[c] - positions[f])) > radius for f in final):
            final.append(c)
    return sorted(final)
