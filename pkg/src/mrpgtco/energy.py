"""First-order radio energy model and the analytic cluster-head optimum.

All functions are pure.  Distances may be scalars or numpy arrays; the
two-regime amplifier (free space below ``d_o``, multipath above) is applied
everywhere, including the cluster-head and member costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig


@dataclass(frozen=True)
class EnergyParams:
    e_elec: float = 50e-9
    e_fs: float = 10e-12
    e_mp: float = 0.0013e-12
    e_da: float = 5e-9

    def __post_init__(self) -> None:
        if min(self.e_elec, self.e_fs, self.e_mp, self.e_da) <= 0:
            raise ValueError("energy constants must be positive")

    @property
    def d_o(self) -> float:
        """Crossover distance where the free-space and multipath costs meet."""
        return math.sqrt(self.e_fs / self.e_mp)

    @classmethod
    def from_config(cls, config: NetworkConfig) -> "EnergyParams":
        return cls(config.e_elec, config.e_fs, config.e_mp, config.e_da)


DEFAULT = EnergyParams()


def amplifier_cost(d, params: EnergyParams = DEFAULT):
    """Amplifier energy per bit (J/bit) for distance ``d``."""
    if np.ndim(d) == 0:
        d = float(d)
        return params.e_fs * d * d if d <= params.d_o else params.e_mp * d ** 4
    d = np.asarray(d, dtype=float)
    return np.where(d <= params.d_o, params.e_fs * d * d, params.e_mp * d ** 4)


def tx_energy(l, d, params: EnergyParams = DEFAULT):
    return l * params.e_elec + l * amplifier_cost(d, params)


def rx_energy(l, params: EnergyParams = DEFAULT):
    return l * params.e_elec


def fuse_energy(l, params: EnergyParams = DEFAULT):
    return l * params.e_da


def ch_round_energy(members: int, forwarded: int, d_to_dest: float, l: int,
                    params: EnergyParams = DEFAULT) -> float:
    """Cluster-head cost for one round.

    ``members`` counts the head itself.  The head receives ``members - 1``
    member packets plus ``forwarded`` relayed ones, fuses only its own
    cluster's ``members`` packets, and transmits ``1 + forwarded`` packets.
    """
    if members < 1 or forwarded < 0:
        raise ValueError("members must be >= 1 and forwarded >= 0")
    return ((members - 1 + forwarded) * rx_energy(l, params)
            + members * fuse_energy(l, params)
            + (1 + forwarded) * tx_energy(l, d_to_dest, params))


def cm_round_energy(d_to_ch, l: int, params: EnergyParams = DEFAULT):
    return tx_energy(l, d_to_ch, params)


def expected_sq_member_distance(area_side: float, k: float) -> float:
    """Mean squared member-to-head distance for a disc-shaped cluster."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return area_side ** 2 / (2 * math.pi * k)


def network_round_energy(n: int, k: float, area_side: float, n_c: float, d_to_dest: float,
                         l: int, params: EnergyParams = DEFAULT) -> float:
    """Analytic whole-network energy per round with ``k`` free-space clusters."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    p = params
    return (n * l * p.e_da
            + p.e_fs * l * n * area_side ** 2 / (2 * math.pi * k)
            + (2 * n + k * n_c) * l * p.e_elec
            + k * l * (n_c + 1) * p.e_fs * d_to_dest ** 2)


def optimal_k_real(n_alive: int, area_side: float, n_c: float, d_to_dest: float,
                   params: EnergyParams = DEFAULT) -> float:
    p = params
    denom = 2 * math.pi * (p.e_elec * n_c + p.e_fs * (n_c + 1) * d_to_dest ** 2)
    if denom <= 0:
        return float(n_alive)
    return area_side * math.sqrt(p.e_fs * n_alive / denom)


def optimal_k(n_alive: int, area_side: float, n_c: float, d_to_dest: float,
              params: EnergyParams = DEFAULT) -> int:
    """Closed-form cluster-head count, rounded half-up and clamped to [1, n_alive]."""
    if n_alive < 1:
        raise ValueError("n_alive must be >= 1")
    k = math.floor(optimal_k_real(n_alive, area_side, n_c, d_to_dest, params) + 0.5)
    return max(1, min(n_alive, k))
