"""Experiment configuration and the key=value config file format."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Raised for invalid parameter values or malformed config files."""


class Protocol(str, enum.Enum):
    MRP_GTCO = "MRP-GTCO"
    MRP_GTCO_NORELAY = "MRP-GTCO-noRelay"
    RLEACH = "RLEACH"
    LGCA = "LGCA"
    ECAGT = "ECAGT"

    @classmethod
    def parse(cls, text: str) -> "Protocol":
        for p in cls:
            if p.value.lower() == text.strip().lower():
                return p
        raise ConfigError(f"unknown protocol {text!r}; expected one of {[p.value for p in cls]}")


@dataclass(frozen=True)
class NetworkConfig:
    """Immutable parameters of one simulation run.

    Defaults are the 200 m x 200 m, 100-node setup with first-order radio
    constants.  ``k_override`` pins the cluster-head target at full
    population; ``None`` means the closed-form optimum is used every round.
    """

    area_side: float = 200.0
    node_count: int = 100
    initial_energy: float = 0.5
    packet_bits: int = 4000
    e_elec: float = 50e-9
    e_fs: float = 10e-12
    e_mp: float = 0.0013e-12
    e_da: float = 5e-9
    coverage_weight: float = 0.5
    energy_weight: float = 0.5
    alpha: float = 0.7
    beta: float = 0.3
    forwarding_estimate: int = 3
    expected_dest_distance: float = 50.0
    k_override: int | None = None
    max_games: int = 20
    # games are replayed until this many times the head target are candidates
    candidate_factor: float = 2.0
    # game probability for nodes with at most one neighbour: "pair" or "serve"
    lone_rule: str = "pair"
    rng_seed: int = 1
    protocol: Protocol = Protocol.MRP_GTCO
    # neighbour radius shared by the local games and the LGCA/ECAGT contention
    radius: float = 30.0
    w: float = 0.05
    ecagt_alpha: float = 8.0
    ecagt_interpretation: str = "energy-forward"
    rleach_p: float = 0.1
    coverage_radius: float | None = None
    # denominator of the head-energy term: initial energy times "nodes" (alive) or "heads" (K)
    energy_scale: str = "heads"
    pso_pop: int = 30
    pso_iter: int = 50
    pso_inertia: float = 0.72
    pso_c1: float = 1.49
    pso_c2: float = 1.49
    # velocity cap as a fraction of the area side
    pso_vmax: float = 0.3
    relay_nc: int | None = None
    relay_as_printed: bool = False
    round_cap: int = 5000
    control_overhead: float = 0.0

    def __post_init__(self) -> None:
        if isinstance(self.protocol, str) and not isinstance(self.protocol, Protocol):
            object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        self.validate()

    def validate(self) -> None:
        if not self.area_side > 0:
            raise ConfigError("area_side must be positive")
        if self.node_count < 2:
            raise ConfigError("node_count must be at least 2")
        for name in ("initial_energy", "e_elec", "e_fs", "e_mp", "e_da", "radius"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.packet_bits < 0:
            raise ConfigError("packet_bits must be non-negative")
        for a, b in (("coverage_weight", "energy_weight"), ("alpha", "beta")):
            va, vb = getattr(self, a), getattr(self, b)
            if va < 0 or vb < 0 or not math.isclose(va + vb, 1.0, abs_tol=1e-9):
                raise ConfigError(f"{a} + {b} must equal 1 with both non-negative")
        if not 0 < self.w < 1:
            raise ConfigError("w must lie in (0, 1)")
        if not 0 < self.rleach_p < 1:
            raise ConfigError("rleach_p must lie in (0, 1)")
        if not self.ecagt_alpha > 0:
            raise ConfigError("ecagt_alpha must be positive")
        if self.ecagt_interpretation not in ("energy-forward", "as-printed"):
            raise ConfigError("ecagt_interpretation must be 'energy-forward' or 'as-printed'")
        if self.k_override is not None and self.k_override < 1:
            raise ConfigError("k_override must be >= 1")
        if self.coverage_radius is not None and not self.coverage_radius > 0:
            raise ConfigError("coverage_radius must be positive")
        if self.forwarding_estimate < 0 or self.expected_dest_distance < 0:
            raise ConfigError("forwarding_estimate and expected_dest_distance must be >= 0")
        if self.energy_scale not in ("nodes", "heads"):
            raise ConfigError("energy_scale must be 'nodes' or 'heads'")
        if self.lone_rule not in ("pair", "serve"):
            raise ConfigError("lone_rule must be 'pair' or 'serve'")
        if not self.candidate_factor >= 1:
            raise ConfigError("candidate_factor must be >= 1")
        if self.max_games < 1:
            raise ConfigError("max_games must be >= 1")
        if self.pso_pop < 1 or self.pso_iter < 0:
            raise ConfigError("pso_pop must be >= 1 and pso_iter >= 0")
        if not self.pso_vmax > 0:
            raise ConfigError("pso_vmax must be positive")
        if self.relay_nc is not None and self.relay_nc < 0:
            raise ConfigError("relay_nc must be >= 0")
        if self.round_cap < 1:
            raise ConfigError("round_cap must be >= 1")
        if self.control_overhead < 0:
            raise ConfigError("control_overhead must be >= 0")

    def replace(self, **changes) -> "NetworkConfig":
        return dataclasses.replace(self, **changes)


# area side -> cluster-head count used for the comparison scenarios
REFERENCE_K = {200.0: 10, 300.0: 12, 400.0: 15}


def scenario(area: float = 200.0, **changes) -> NetworkConfig:
    """The standard comparison scenario for a square area of the given side."""
    k = REFERENCE_K.get(float(area))
    if k is None:
        raise ConfigError(f"no reference scenario for area side {area}")
    return NetworkConfig(area_side=float(area), k_override=k).replace(**changes)


_FIELDS = {f.name: f for f in dataclasses.fields(NetworkConfig)}


def _coerce(name: str, raw: str):
    f = _FIELDS[name]
    kind = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", str(f.type))
    text = raw.strip()
    try:
        if kind.endswith("| None"):
            if text.lower() in ("", "none"):
                return None
            kind = kind.split("|")[0].strip()
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind == "Protocol":
            return Protocol.parse(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_config(text: str, base: NetworkConfig | None = None) -> NetworkConfig:
    """Parse ``key = value`` lines (``#`` starts a comment). Unknown keys are errors."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _coerce(key, raw)
    base = base or NetworkConfig()
    return base.replace(**values)


def load_config(path: str | Path) -> NetworkConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def dump_config(config: NetworkConfig) -> str:
    lines = []
    for name in _FIELDS:
        value = getattr(config, name)
        if isinstance(value, Protocol):
            value = value.value
        lines.append(f"{name} = {'none' if value is None else value}")
    return "\n".join(lines) + "\n"
