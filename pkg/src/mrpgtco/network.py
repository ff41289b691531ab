"""Topology, node state, seeded randomness and neighbour queries."""

from __future__ import annotations

import enum
import math
import zlib
from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig

BASE_STATION = -1


@dataclass(frozen=True)
class Position:
    x: float
    y: float


class Role(enum.Enum):
    CM = "CM"
    CANDIDATE = "CandidateCH"
    CH = "CH"


@dataclass
class NodeState:
    id: int
    position: Position
    residual_energy: float
    alive: bool = True
    role: Role = Role.CM
    death_round: int | None = None


@dataclass(frozen=True)
class NeighborView:
    node: int
    neighbors: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.neighbors)


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator for one subsystem.

    Streams are keyed by (seed, label) so that drawing more numbers in one
    subsystem never shifts another subsystem's sequence.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, zlib.crc32(label.encode())]))


def distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def base_station(config: NetworkConfig) -> Position:
    return Position(config.area_side / 2, config.area_side / 2)


def deploy_positions(config: NetworkConfig) -> np.ndarray:
    config.validate()
    rng = rng_stream(config.rng_seed, "deploy")
    return rng.uniform(0.0, config.area_side, size=(config.node_count, 2))


def deploy(config: NetworkConfig) -> list[NodeState]:
    """Place ``node_count`` nodes uniformly at random in the square area."""
    xy = deploy_positions(config)
    return [
        NodeState(i, Position(float(x), float(y)), config.initial_energy)
        for i, (x, y) in enumerate(xy)
    ]


def pairwise_distances(xy: np.ndarray) -> np.ndarray:
    diff = xy[:, None, :] - xy[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def adjacency(dist: np.ndarray, alive: np.ndarray, radius: float) -> np.ndarray:
    """Boolean adjacency among alive nodes; distance <= radius, no self loops."""
    adj = (dist <= radius) & alive[:, None] & alive[None, :]
    np.fill_diagonal(adj, False)
    return adj


def neighbor_view(nodes: list[NodeState], radius: float) -> list[NeighborView]:
    if not radius > 0:
        raise ValueError("radius must be positive")
    live = [n for n in nodes if n.alive]
    if not live:
        return []
    xy = np.array([[n.position.x, n.position.y] for n in live])
    adj = adjacency(pairwise_distances(xy), np.ones(len(live), bool), radius)
    ids = [n.id for n in live]
    return [
        NeighborView(ids[i], tuple(ids[j] for j in np.flatnonzero(adj[i])))
        for i in range(len(live))
    ]
