import pytest

from mrpgtco.config import (
    ConfigError,
    NetworkConfig,
    Protocol,
    dump_config,
    load_config,
    parse_config,
    scenario,
)


def test_defaults_are_reference_setup():
    c = NetworkConfig()
    assert (c.area_side, c.node_count, c.initial_energy, c.packet_bits) == (200, 100, 0.5, 4000)
    assert (c.coverage_weight, c.alpha, c.w, c.radius, c.ecagt_alpha) == (0.5, 0.7, 0.05, 30, 8)
    assert c.protocol is Protocol.MRP_GTCO


@pytest.mark.parametrize("area, k", [(200, 10), (300, 12), (400, 15)])
def test_scenarios(area, k):
    c = scenario(area)
    assert c.area_side == area and c.k_override == k


def test_unknown_scenario():
    with pytest.raises(ConfigError):
        scenario(250)


@pytest.mark.parametrize("changes", [
    dict(coverage_weight=0.6),
    dict(alpha=0.5, beta=0.4),
    dict(e_fs=0.0),
    dict(w=1.0),
    dict(rleach_p=0.0),
    dict(k_override=0),
    dict(ecagt_interpretation="sideways"),
    dict(lone_rule="solo"),
    dict(energy_scale="everything"),
    dict(max_games=0),
    dict(pso_vmax=0.0),
    dict(candidate_factor=0.5),
])
def test_invariants_enforced(changes):
    with pytest.raises(ConfigError):
        NetworkConfig(**changes)


def test_parse_round_trip():
    c = scenario(300, protocol=Protocol.ECAGT, rng_seed=9, coverage_weight=0.3, energy_weight=0.7)
    assert parse_config(dump_config(c)) == c


def test_parse_comments_and_types():
    c = parse_config("""
        # reference area
        area_side = 300   # metres
        k_override = 12
        protocol = rleach
        relay_as_printed = yes
        coverage_radius = none
    """)
    assert c.area_side == 300.0 and c.k_override == 12
    assert c.protocol is Protocol.RLEACH and c.relay_as_printed is True
    assert c.coverage_radius is None


@pytest.mark.parametrize("text", [
    "area_sid = 200",
    "area_side = 200\narea_side = 300",
    "node_count = many",
    "just a line",
    "protocol = LEACH",
    "relay_as_printed = maybe",
])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


def test_shipped_configs_load():
    from pathlib import Path
    root = Path(__file__).resolve().parents[1] / "configs"
    for area, k in [(200, 10), (300, 12), (400, 15)]:
        c = load_config(root / f"reference_{area}.cfg")
        assert c == scenario(area)
        assert c.k_override == k
