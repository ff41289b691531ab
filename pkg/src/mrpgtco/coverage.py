"""Coverage objective, swarm-based final cluster-head selection, cluster formation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .network import BASE_STATION


@dataclass(frozen=True)
class CoverageParams:
    radius: float
    coverage_weight: float = 0.5
    energy_weight: float = 0.5
    # residual-energy term divided by initial energy times alive nodes ("nodes") or heads ("heads")
    energy_scale: str = "heads"

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("coverage radius must be positive")
        if self.energy_scale not in ("nodes", "heads"):
            raise ValueError(f"unknown energy_scale {self.energy_scale!r}")

    def energy_norm(self, initial_energy: float, n_alive: int, k: int) -> float:
        return initial_energy * (n_alive if self.energy_scale == "nodes" else k)


@dataclass(frozen=True)
class SwarmSettings:
    population: int = 30
    iterations: int = 50
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    # velocity cap as a fraction of the area side
    vmax_fraction: float = 0.3


@dataclass
class SwarmResult:
    heads: list[int]
    fitness: float
    history: list[float] = field(default_factory=list)


@dataclass
class ClusterAssignment:
    heads: list[int]
    head_of: dict[int, int]

    @property
    def member_counts(self) -> dict[int, int]:
        counts = {h: 0 for h in self.heads}
        for node, h in self.head_of.items():
            if h != BASE_STATION and node != h:
                counts[h] += 1
        return counts


def default_radius(area_side: float, k: int) -> float:
    """Radius of a disc holding one of ``k`` equal clusters."""
    return area_side / math.sqrt(math.pi * max(k, 1))


def coverage_value(ch, node, radius: float) -> int:
    return int(math.hypot(ch[0] - node[0], ch[1] - node[1]) <= radius)


def joint_coverage(chs, node, radius: float) -> int:
    miss = 1
    for ch in chs:
        miss *= 1 - coverage_value(ch, node, radius)
    return 1 - miss


def coverage_rate(chs, nodes, radius: float) -> float:
    nodes = list(nodes)
    if not nodes:
        raise ValueError("coverage rate of an empty node set is undefined")
    chs = list(chs)
    return sum(joint_coverage(chs, n, radius) for n in nodes) / len(nodes)


def objective(heads, positions: np.ndarray, energy: np.ndarray, alive: np.ndarray,
              params: CoverageParams, initial_energy: float, k: int | None = None) -> float:
    """Weighted coverage rate plus normalised residual energy of ``heads``.

    ``k`` is the target head count used by the ``"heads"`` energy scale
    (default: ``len(heads)``).
    """
    heads = list(heads)
    if not heads:
        raise ValueError("objective needs at least one cluster head")
    live = np.flatnonzero(alive)
    rate = coverage_rate((positions[h] for h in heads), (positions[j] for j in live), params.radius)
    e_sum = float(sum(energy[h] for h in heads))
    norm = params.energy_norm(initial_energy, live.size, k or len(heads))
    return params.coverage_weight * rate + params.energy_weight * e_sum / norm


def map_to_candidates(virtual, cand_xy: np.ndarray) -> list[int]:
    """Greedy nearest distinct candidate for each virtual position, in order.

    Returns indices into ``cand_xy``; later positions whose nearest candidate
    is taken fall back to the next-nearest unused one.
    """
    used: set[int] = set()
    out = []
    for vx, vy in virtual:
        best, best_d = -1, math.inf
        for c, (cx, cy) in enumerate(cand_xy):
            if c in used:
                continue
            d = (vx - cx) ** 2 + (vy - cy) ** 2
            if d < best_d:
                best, best_d = c, d
        if best < 0:
            break
        used.add(best)
        out.append(best)
    return out


@numba.njit(cache=True)
def _swarm_fitness(virt, cand_xy, cov_ptr, cov_idx, cand_energy, n_alive,
                   lam1, lam2, e_norm, mapped, fitness, stamp, tag):
    n_part, k = virt.shape[0], virt.shape[1]
    n_cand = cand_xy.shape[0]
    used = np.zeros(n_cand, dtype=np.bool_)
    for p in range(n_part):
        used[:] = False
        tag += 1
        covered = 0
        e_sum = 0.0
        for s in range(k):
            best = -1
            best_d = np.inf
            vx = virt[p, s, 0]
            vy = virt[p, s, 1]
            for c in range(n_cand):
                if used[c]:
                    continue
                dx = vx - cand_xy[c, 0]
                dy = vy - cand_xy[c, 1]
                d = dx * dx + dy * dy
                if d < best_d:
                    best_d = d
                    best = c
            mapped[p, s] = best
            if best < 0:
                continue
            used[best] = True
            e_sum += cand_energy[best]
            for t in range(cov_ptr[best], cov_ptr[best + 1]):
                j = cov_idx[t]
                if stamp[j] != tag:
                    stamp[j] = tag
                    covered += 1
        fitness[p] = lam1 * covered / n_alive + lam2 * e_sum / e_norm
    return tag


class SwarmEvaluator:
    """Batch fitness of particle positions after mapping to real candidates."""

    def __init__(self, candidates, positions, energy, alive, params: CoverageParams,
                 initial_energy: float, k: int):
        self.candidates = np.asarray(candidates, dtype=np.int64)
        self.cand_xy = np.ascontiguousarray(positions[self.candidates], dtype=float)
        live = np.flatnonzero(alive)
        diff = self.cand_xy[:, None, :] - positions[live][None, :, :]
        covers = np.hypot(diff[..., 0], diff[..., 1]) <= params.radius
        self.cov_ptr = np.concatenate([[0], np.cumsum(covers.sum(axis=1))]).astype(np.int64)
        self.cov_idx = np.nonzero(covers)[1].astype(np.int64)
        self.cand_energy = np.ascontiguousarray(energy[self.candidates], dtype=float)
        self.n_alive = live.size
        self.params = params
        self.e_norm = params.energy_norm(initial_energy, live.size, k)
        self._stamp = np.zeros(live.size, dtype=np.int64)
        self._tag = 0

    def __call__(self, virt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n_part, k = virt.shape[:2]
        mapped = np.full((n_part, k), -1, dtype=np.int64)
        fitness = np.empty(n_part)
        self._tag = _swarm_fitness(np.ascontiguousarray(virt, dtype=float), self.cand_xy,
                                   self.cov_ptr, self.cov_idx, self.cand_energy, self.n_alive,
                                   self.params.coverage_weight, self.params.energy_weight,
                                   self.e_norm, mapped, fitness, self._stamp, self._tag)
        return fitness, mapped


def pso_select(candidates, positions: np.ndarray, energy: np.ndarray, alive: np.ndarray,
               k: int, params: CoverageParams, area_side: float, initial_energy: float,
               rng: np.random.Generator, settings: SwarmSettings = SwarmSettings()) -> SwarmResult:
    """Pick ``min(k, len(candidates))`` final heads maximising the coverage objective.

    Each particle encodes ``k`` virtual head positions in the area.  Fitness
    is evaluated on the candidates those positions map to, so the global
    best is always realisable.
    """
    candidates = sorted(int(c) for c in candidates)
    if not candidates or k < 1:
        return SwarmResult([], 0.0)
    if len(candidates) <= k:
        fit = objective(candidates, positions, energy, alive, params, initial_energy, k)
        return SwarmResult(candidates, fit, [fit])

    evaluate = SwarmEvaluator(candidates, positions, energy, alive, params, initial_energy, k)
    n_cand, n_part = len(candidates), settings.population
    vmax = settings.vmax_fraction * area_side

    # start every particle on k distinct real candidates
    pick = np.argsort(rng.random((n_part, n_cand)), axis=1)[:, :k]
    x = evaluate.cand_xy[pick].copy()
    v = rng.uniform(-vmax, vmax, size=x.shape)
    fit, mapped = evaluate(x)
    pbest, pbest_fit, pbest_map = x.copy(), fit.copy(), mapped.copy()
    g = int(np.argmax(fit))
    gbest, gbest_fit, gbest_map = x[g].copy(), float(fit[g]), mapped[g].copy()
    history = [gbest_fit]

    draws = rng.random((settings.iterations, 2) + x.shape)
    for it in range(settings.iterations):
        r1, r2 = draws[it]
        v = (settings.inertia * v
             + settings.cognitive * r1 * (pbest - x)
             + settings.social * r2 * (gbest - x))
        np.clip(v, -vmax, vmax, out=v)
        x = x + v
        low, high = x < 0, x > area_side
        x = np.where(low, -x, np.where(high, 2 * area_side - x, x))
        v = np.where(low | high, -v, v)
        np.clip(x, 0.0, area_side, out=x)

        fit, mapped = evaluate(x)
        better = fit > pbest_fit
        pbest[better], pbest_fit[better], pbest_map[better] = x[better], fit[better], mapped[better]
        g = int(np.argmax(pbest_fit))
        if pbest_fit[g] > gbest_fit:
            gbest, gbest_fit, gbest_map = pbest[g].copy(), float(pbest_fit[g]), pbest_map[g].copy()
        history.append(gbest_fit)

    heads = sorted(candidates[c] for c in gbest_map if c >= 0)
    return SwarmResult(heads, gbest_fit, history)


def form_clusters(heads, positions: np.ndarray, alive: np.ndarray) -> ClusterAssignment:
    """Every alive non-head joins its nearest head (lower id on ties)."""
    heads = sorted(int(h) for h in heads)
    live = np.flatnonzero(alive)
    if not heads:
        return ClusterAssignment([], {int(i): BASE_STATION for i in live})
    head_xy = positions[heads]
    diff = positions[live][:, None, :] - head_xy[None, :, :]
    nearest = np.argmin(np.hypot(diff[..., 0], diff[..., 1]), axis=1)
    head_of = {int(i): heads[int(n)] for i, n in zip(live, nearest)}
    for h in heads:
        head_of[h] = h
    return ClusterAssignment(heads, head_of)
