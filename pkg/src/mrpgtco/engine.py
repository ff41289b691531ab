"""Round-based lifetime simulation: election, clustering, forwarding, energy ledger."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import baselines, coverage, energy as em, game, relay
from .config import NetworkConfig, Protocol
from .network import BASE_STATION, adjacency, deploy_positions, pairwise_distances, rng_stream


class PostDeathActivity(RuntimeError):
    """A dead node was asked to spend energy."""


@dataclass
class RoundMetrics:
    round: int
    alive: int
    residual: float
    ch_count: int
    ch_energy: list[float]
    packets: int
    packets_total: int
    spent: float
    direct: int = 0


@dataclass
class LifetimeSummary:
    fdn: int | None
    hdn: int | None
    ldn: int | None
    rounds: int
    mean_round_energy: float


@dataclass
class SimulationResult:
    config: NetworkConfig
    summary: LifetimeSummary
    series: list[RoundMetrics]
    ledger_error: float
    death_rounds: np.ndarray


@dataclass
class SimState:
    config: NetworkConfig
    positions: np.ndarray
    dist: np.ndarray
    bs: np.ndarray
    d_bs: np.ndarray
    energy: np.ndarray
    alive: np.ndarray
    death_round: np.ndarray
    last_ch_round: np.ndarray
    params: em.EnergyParams
    streams: dict[str, np.random.Generator]
    round: int = 0
    debited: float = 0.0
    packets_total: int = 0

    @property
    def initial_total(self) -> float:
        return self.config.initial_energy * self.config.node_count


def init_state(config: NetworkConfig) -> SimState:
    xy = deploy_positions(config)
    n = config.node_count
    bs = np.array([config.area_side / 2, config.area_side / 2])
    streams = {label: rng_stream(config.rng_seed, label)
               for label in ("game", "pso", "rleach", "lgca", "ecagt", "backoff")}
    return SimState(
        config=config,
        positions=xy,
        dist=pairwise_distances(xy),
        bs=bs,
        d_bs=np.hypot(xy[:, 0] - bs[0], xy[:, 1] - bs[1]),
        energy=np.full(n, float(config.initial_energy)),
        alive=np.ones(n, dtype=bool),
        death_round=np.zeros(n, dtype=np.int64),
        last_ch_round=np.full(n, -10**9, dtype=np.int64),
        params=em.EnergyParams.from_config(config),
        streams=streams,
    )


def target_k(state: SimState) -> int:
    """Cluster-head target for the current alive population."""
    cfg = state.config
    n_alive = int(state.alive.sum())
    if cfg.k_override is not None:
        k = math.floor(cfg.k_override * math.sqrt(n_alive / cfg.node_count) + 0.5)
        return max(1, min(n_alive, k))
    return em.optimal_k(n_alive, cfg.area_side, cfg.forwarding_estimate,
                        cfg.expected_dest_distance, state.params)


def _debit(state: SimState, idx: np.ndarray, cost: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Charge ``cost`` to nodes ``idx``; returns (spent, completed).

    A node that cannot cover its cost spends what it has and dies.
    """
    idx = np.asarray(idx, dtype=np.int64)
    cost = np.asarray(cost, dtype=float)
    if idx.size == 0:
        return np.zeros(0), np.zeros(0, dtype=bool)
    if not state.alive[idx].all():
        raise PostDeathActivity(f"round {state.round}: dead node asked to spend energy")
    have = state.energy[idx]
    completed = cost <= have
    spent = np.minimum(cost, have)
    state.energy[idx] = have - spent
    state.debited += float(spent.sum())
    dead = idx[state.energy[idx] <= 0]
    state.energy[dead] = 0.0
    state.alive[dead] = False
    state.death_round[dead] = state.round
    return spent, completed


def _elect_mrp(state: SimState, adj: np.ndarray) -> tuple[list[int], relay.RelayPlan | None]:
    cfg = state.config
    k = target_k(state)
    pool = min(int(state.alive.sum()), math.ceil(cfg.candidate_factor * k))
    cands = game.select_candidates(state.energy, state.alive, adj, state.d_bs, k, cfg,
                                   state.streams["game"], state.round, cfg.max_games, pool)
    radius = cfg.coverage_radius or coverage.default_radius(cfg.area_side, k)
    params = coverage.CoverageParams(radius, cfg.coverage_weight, cfg.energy_weight, cfg.energy_scale)
    settings = coverage.SwarmSettings(cfg.pso_pop, cfg.pso_iter, cfg.pso_inertia, cfg.pso_c1, cfg.pso_c2,
                                      cfg.pso_vmax)
    heads = coverage.pso_select(cands.candidates, state.positions, state.energy, state.alive, k,
                                params, cfg.area_side, cfg.initial_energy, state.streams["pso"],
                                settings).heads
    if cfg.protocol is not Protocol.MRP_GTCO or not heads:
        return heads, None
    plan = relay.build_relay_plan(heads, state.positions, state.energy, state.bs, adj.sum(axis=1),
                                  state.params, cfg.packet_bits, cfg.relay_nc, cfg.relay_as_printed)
    return heads, plan


def _elect_lgca(state: SimState, adj: np.ndarray) -> list[int]:
    cfg = state.config
    ids = np.flatnonzero(state.alive)
    p = baselines.lgca_probability(adj[ids].sum(axis=1), cfg.w, cfg.lone_rule)
    cands = ids[state.streams["lgca"].random(ids.size) <= p]
    return baselines.lgca_final_contention(cands, state.positions, cfg.radius, state.streams["backoff"])


def _elect_ecagt(state: SimState, adj: np.ndarray) -> list[int]:
    cfg = state.config
    ids = np.flatnonzero(state.alive)
    pool = adj[ids] | (np.arange(adj.shape[0])[None, :] == ids[:, None])
    e_ave = (pool * state.energy[None, :]).sum(axis=1) / pool.sum(axis=1)
    p = baselines.ecagt_probability(adj[ids].sum(axis=1), cfg.w, state.energy[ids], e_ave,
                                    cfg.ecagt_alpha, cfg.ecagt_interpretation, cfg.lone_rule)
    cands = ids[state.streams["ecagt"].random(ids.size) <= p]
    return baselines.ecagt_final_selection(cands, state.positions, state.energy, cfg.radius)


def _elect_rleach(state: SimState) -> list[int]:
    cfg = state.config
    ids = np.flatnonzero(state.alive)
    r0 = state.round - 1
    period = baselines.rleach_period(cfg.rleach_p)
    # a node that served since the current epoch began sits out until the next one
    eligible = state.last_ch_round[ids] < r0 - r0 % period
    t = baselines.rleach_threshold(r0, cfg.rleach_p, state.energy[ids], cfg.initial_energy, eligible)
    return ids[state.streams["rleach"].random(ids.size) < t].tolist()


def run_round(state: SimState) -> RoundMetrics:
    """Advance the network by one round and return its observables."""
    if not state.alive.any():
        raise ValueError("no alive nodes")
    cfg = state.config
    state.round += 1
    before = state.debited

    if cfg.control_overhead > 0:
        ids = np.flatnonzero(state.alive)
        _debit(state, ids, np.full(ids.size, cfg.control_overhead))
        if not state.alive.any():
            return _metrics(state, [], [], 0, before, 0)

    adj = adjacency(state.dist, state.alive, cfg.radius)
    plan = None
    if cfg.protocol in (Protocol.MRP_GTCO, Protocol.MRP_GTCO_NORELAY):
        heads, plan = _elect_mrp(state, adj)
    elif cfg.protocol is Protocol.LGCA:
        heads = _elect_lgca(state, adj)
    elif cfg.protocol is Protocol.ECAGT:
        heads = _elect_ecagt(state, adj)
    else:
        heads = _elect_rleach(state)
    state.last_ch_round[heads] = state.round - 1

    clusters = coverage.form_clusters(heads, state.positions, state.alive)
    ch_energy, delivered, direct = _transmit(state, clusters, plan)
    return _metrics(state, heads, ch_energy, delivered, before, direct)


def _transmit(state: SimState, clusters: coverage.ClusterAssignment,
              plan: relay.RelayPlan | None) -> tuple[list[float], int, int]:
    cfg, params, l = state.config, state.params, state.config.packet_bits
    heads = clusters.heads
    members = np.array([i for i, h in clusters.head_of.items() if h != i and h != BASE_STATION],
                       dtype=np.int64)
    loners = np.array([i for i, h in clusters.head_of.items() if h == BASE_STATION], dtype=np.int64)
    delivered = 0

    if loners.size:
        _, ok = _debit(state, loners, em.tx_energy(l, state.d_bs[loners], params))
        delivered += int(ok.sum())

    received = {h: 0 for h in heads}
    if members.size:
        head_idx = np.array([clusters.head_of[int(i)] for i in members], dtype=np.int64)
        d = state.dist[members, head_idx]
        _, ok = _debit(state, members, em.cm_round_energy(d, l, params))
        for h in head_idx[ok]:
            received[int(h)] += 1

    forwarded = {h: 0 for h in heads}
    order = plan.order if plan is not None else heads
    ch_energy = []
    for h in order:
        nxt = plan.next_hop[h] if plan is not None else BASE_STATION
        d = state.d_bs[h] if nxt == BASE_STATION else state.dist[h, nxt]
        n_fwd = forwarded[h]
        cost = ((received[h] + n_fwd) * em.rx_energy(l, params)
                + (received[h] + 1) * em.fuse_energy(l, params)
                + (1 + n_fwd) * em.tx_energy(l, d, params))
        spent, ok = _debit(state, [h], [cost])
        ch_energy.append(float(spent[0]))
        if not ok[0]:
            continue
        if nxt == BASE_STATION:
            delivered += 1 + n_fwd
        else:
            forwarded[nxt] += 1 + n_fwd
    return ch_energy, delivered, int(loners.size)


def _metrics(state, heads, ch_energy, delivered, before, direct) -> RoundMetrics:
    state.packets_total += delivered
    return RoundMetrics(
        round=state.round,
        alive=int(state.alive.sum()),
        residual=float(state.energy.sum()),
        ch_count=len(heads),
        ch_energy=ch_energy,
        packets=delivered,
        packets_total=state.packets_total,
        spent=state.debited - before,
        direct=direct,
    )


def lifetime(series: list[RoundMetrics], node_count: int) -> LifetimeSummary:
    fdn = next((m.round for m in series if m.alive < node_count), None)
    hdn = next((m.round for m in series if m.alive <= node_count // 2), None)
    ldn = next((m.round for m in series if m.alive == 0), None)
    pre = [m.spent for m in series if fdn is None or m.round < fdn]
    mean = float(np.mean(pre)) if pre else math.nan
    return LifetimeSummary(fdn, hdn, ldn, len(series), mean)


def run_simulation(config: NetworkConfig, stop_at: str | None = None) -> SimulationResult:
    """Run rounds until every node is dead, ``round_cap`` is hit, or ``stop_at``
    ("fdn" or "hdn") is reached."""
    state = init_state(config)
    series: list[RoundMetrics] = []
    n = config.node_count
    while state.alive.any() and state.round < config.round_cap:
        m = run_round(state)
        series.append(m)
        if stop_at == "fdn" and m.alive < n:
            break
        if stop_at == "hdn" and m.alive <= n // 2:
            break
    ledger_error = abs(state.initial_total - float(state.energy.sum()) - state.debited)
    return SimulationResult(config, lifetime(series, n), series, ledger_error, state.death_round.copy())
