"""Experiment runners and CSV persistence for single runs, sweeps and comparisons."""

from __future__ import annotations

import os
import statistics
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import REFERENCE_K, ConfigError, NetworkConfig, Protocol
from .engine import SimulationResult, run_simulation

AXES = ("none", "K", "lambda1", "area", "protocol")
SERIES_COLUMNS = ("round", "alive", "residual_J", "ch_count", "pkts_round", "pkts_cum")
LIFETIME_COLUMNS = ("fdn", "hdn", "ldn", "rounds", "mean_round_energy_J")
# per-head energies pooled for the quartile table come from this many opening rounds
CH_ENERGY_WINDOW = 600


@dataclass
class ExperimentSpec:
    base: NetworkConfig
    axis: str = "none"
    values: list = field(default_factory=list)
    seeds: list[int] = field(default_factory=lambda: [1])
    out: Path = Path("results")

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; expected one of {list(AXES)}")
        self.values = [_axis_value(self.axis, v) for v in self.values]
        self.out = Path(self.out)


def _axis_value(axis: str, raw):
    text = str(raw).strip()
    try:
        if axis == "K":
            value = int(text)
            if not 1 <= value:
                raise ConfigError(f"K must be >= 1, got {value}")
            return value
        if axis == "lambda1":
            value = float(text)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"lambda1 must lie in [0, 1], got {value}")
            return value
        if axis == "area":
            value = float(text)
            if value not in REFERENCE_K:
                raise ConfigError(f"no reference head count for area {value:g}; known: {sorted(REFERENCE_K)}")
            return value
    except ValueError as exc:
        raise ConfigError(f"bad {axis} value {raw!r}") from exc
    if axis == "protocol":
        return Protocol.parse(text)
    return raw


def default_values(axis: str) -> list:
    if axis == "K":
        return list(range(2, 15))
    if axis == "lambda1":
        return [round(0.1 * i, 1) for i in range(11)]
    if axis == "area":
        return [300.0, 400.0]
    if axis == "protocol":
        return list(Protocol)
    return []


def configure(base: NetworkConfig, axis: str, value) -> NetworkConfig:
    """The configuration for one sweep point."""
    if axis == "K":
        return base.replace(k_override=int(value))
    if axis == "lambda1":
        return base.replace(coverage_weight=float(value), energy_weight=round(1.0 - float(value), 12))
    if axis == "area":
        return base.replace(area_side=float(value), k_override=REFERENCE_K[float(value)])
    if axis == "protocol":
        return base.replace(protocol=value)
    return base


def _simulate(job):
    config, stop_at = job
    return run_simulation(config, stop_at)


def run_many(configs: list[NetworkConfig], stop_at: str | None = None,
             jobs: int = 1) -> list[SimulationResult]:
    """Run independent simulations; results come back in input order."""
    work = [(c, stop_at) for c in configs]
    if jobs <= 1 or len(work) <= 1:
        return [_simulate(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_simulate, work))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "nan" if value != value else format(value, ".10g")
    return str(value)


def write_table(path: Path, comment: str, columns, rows) -> Path:
    """Write one CSV atomically: a ``#`` comment line, a header, then the records."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {comment}", ",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def series_rows(result: SimulationResult) -> list[tuple]:
    return [(m.round, m.alive, m.residual, m.ch_count, m.packets, m.packets_total)
            for m in result.series]


def lifetime_row(result: SimulationResult) -> tuple:
    s = result.summary
    return (s.fdn, s.hdn, s.ldn, s.rounds, s.mean_round_energy)


def median_of(values):
    values = [v for v in values if v is not None and v == v]
    return statistics.median(values) if values else None


def mean_of(values):
    values = [v for v in values if v is not None and v == v]
    return statistics.fmean(values) if values else None


def aggregate(results: list[SimulationResult], stat) -> tuple:
    rows = [lifetime_row(r) for r in results]
    return tuple(stat([row[i] for row in rows]) for i in range(len(LIFETIME_COLUMNS)))


def ch_energy_quartiles(results: list[SimulationResult], window: int = CH_ENERGY_WINDOW) -> tuple:
    """(count, min, q1, median, q3, max) of per-head round energy over the opening rounds."""
    pooled = [e for r in results for m in r.series if m.round <= window for e in m.ch_energy]
    if not pooled:
        return (0, None, None, None, None, None)
    q = np.percentile(pooled, [0, 25, 50, 75, 100])
    return (len(pooled),) + tuple(float(x) for x in q)


def _describe(config: NetworkConfig) -> str:
    k = "adaptive" if config.k_override is None else str(config.k_override)
    return (f"protocol={config.protocol.value} area={config.area_side:g}m nodes={config.node_count} "
            f"K={k} lambda1={config.coverage_weight:g}")


def _series_name(config: NetworkConfig, seed: int, prefix: str = "") -> str:
    return f"{prefix}series_{config.protocol.value}_seed{seed}.csv"


def _write_series(out: Path, results: list[SimulationResult], prefix: str = "") -> list[Path]:
    paths = []
    for r in results:
        comment = f"per-round trace; {_describe(r.config)} seed={r.config.rng_seed}"
        paths.append(write_table(out / _series_name(r.config, r.config.rng_seed, prefix),
                                 comment, SERIES_COLUMNS, series_rows(r)))
    return paths


def _lifetime_table(results: list[SimulationResult], labels) -> list[tuple]:
    rows = []
    groups: dict = {}
    for label, r in zip(labels, results):
        rows.append((*label, r.config.rng_seed, *lifetime_row(r)))
        groups.setdefault(label, []).append(r)
    for label, group in groups.items():
        rows.append((*label, "median", *aggregate(group, median_of)))
    return rows


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> tuple[list[SimulationResult], list[Path]]:
    """One simulation per seed of the base configuration."""
    configs = [spec.base.replace(rng_seed=s) for s in spec.seeds]
    results = run_many(configs, jobs=jobs)
    proto = spec.base.protocol.value
    paths = _write_series(spec.out, results)
    rows = _lifetime_table(results, [(proto,)] * len(results))
    paths.append(write_table(spec.out / "summary.csv", f"lifetime per seed; {_describe(spec.base)}",
                             ("protocol", "seed", *LIFETIME_COLUMNS), rows))
    return results, paths


def sweep_experiment(spec: ExperimentSpec, jobs: int = 1) -> tuple[dict, list[Path]]:
    """Run every (value, seed) cell of a sweep and write per-seed and aggregate tables.

    The K sweep stops each run at the first death and reports the mean
    per-round network energy over the rounds before it.  The area sweep
    runs every protocol, with and without relaying, per area.
    """
    if spec.axis == "none":
        raise ConfigError("sweep needs an axis")
    values = spec.values or default_values(spec.axis)
    cells = []
    for value in values:
        point = configure(spec.base, spec.axis, value)
        protocols = list(Protocol) if spec.axis == "area" else [point.protocol]
        for proto in protocols:
            for seed in spec.seeds:
                cells.append((value, point.replace(protocol=proto, rng_seed=seed)))
    stop_at = "fdn" if spec.axis == "K" else None
    results = run_many([c for _, c in cells], stop_at, jobs)

    name = spec.axis
    labels = [(_fmt(v), c.protocol.value) for (v, c) in cells]
    per_seed = [(*label, r.config.rng_seed, *lifetime_row(r)) for label, r in zip(labels, results)]
    grouped: dict = {}
    for label, r in zip(labels, results):
        grouped.setdefault(label, []).append(r)
    agg = []
    for label, group in grouped.items():
        energies = [r.summary.mean_round_energy for r in group]
        agg.append((*label, len(group), *aggregate(group, median_of), mean_of(energies)))

    note = "runs stop at the first death; energy is the mean per-round network energy before it" \
        if spec.axis == "K" else "energy is the mean per-round network energy before the first death"
    comment = f"{name} sweep; base {_describe(spec.base)}; {note}"
    paths = [
        write_table(spec.out / f"sweep_{name}_per_seed.csv", comment,
                    (name, "protocol", "seed", *LIFETIME_COLUMNS), per_seed),
        write_table(spec.out / f"sweep_{name}.csv", comment + "; medians over seeds, mean energy last",
                    (name, "protocol", "seeds", *(f"median_{c}" for c in LIFETIME_COLUMNS),
                     "mean_round_energy_J_mean"), agg),
    ]
    if spec.axis == "area":
        for (value, _), r in zip(cells, results):
            paths += _write_series(spec.out, [r], prefix=f"area{_fmt(value)}_")
    return grouped, paths


def compare_experiment(spec: ExperimentSpec, protocols: list[Protocol],
                       jobs: int = 1) -> tuple[dict, list[Path]]:
    """Run each protocol on identical seeds and topologies."""
    # canonical order so the output does not depend on how protocols were listed
    protocols = [p for p in Protocol if p in set(protocols)]
    if len(protocols) < 2:
        raise ConfigError("compare needs at least two protocols")
    configs = [spec.base.replace(protocol=p, rng_seed=s) for p in protocols for s in spec.seeds]
    results = run_many(configs, jobs=jobs)
    by_proto: dict = {}
    for r in results:
        by_proto.setdefault(r.config.protocol, []).append(r)

    paths = _write_series(spec.out, results)
    labels = [(r.config.protocol.value,) for r in results]
    paths.append(write_table(spec.out / "summary.csv",
                             f"lifetime per protocol and seed; base {_describe(spec.base)}",
                             ("protocol", "seed", *LIFETIME_COLUMNS), _lifetime_table(results, labels)))
    quart = [(p.value, *ch_energy_quartiles(by_proto[p])) for p in protocols]
    paths.append(write_table(spec.out / "ch_energy.csv",
                             f"per-head round energy over rounds 1-{CH_ENERGY_WINDOW}, pooled over seeds",
                             ("protocol", "samples", "min_J", "q1_J", "median_J", "q3_J", "max_J"), quart))
    return by_proto, paths
