from fractions import Fraction
from pathlib import Path

import pytest

from latnab.config import (
    Config, IsometryPolicy, config_from_dict, human_count, load_config, parse_count, parse_rational,
)
from latnab.errors import InvalidValueError
from latnab.latnab import find_config_file


def test_defaults():
    cfg = config_from_dict({})
    assert cfg == Config()
    assert cfg.performance.threads == 1
    assert cfg.isometry.policy is IsometryPolicy.AUTO
    assert cfg.census.theta_bound == 3
    assert cfg.general.cache_file is None


def test_load_yaml(tmp_path):
    path = tmp_path / "latnab.yaml"
    path.write_text(
        "logging:\n"
        "  level: debug\n"
        "performance:\n"
        "  threads: 4\n"
        "  vector_budget: 1.5M\n"
        "isometry:\n"
        "  policy: strict\n"
        "design:\n"
        "  tensor_fallback: false\n"
        "general:\n"
        "  cache_file: ~/theta.json.gz\n",
        encoding="utf-8",
    )
    cfg = load_config(path)
    assert cfg.logging.level == "DEBUG"
    assert cfg.performance.threads == 4
    assert cfg.performance.vector_budget == 1_500_000
    assert cfg.isometry.policy is IsometryPolicy.STRICT
    assert cfg.design.tensor_fallback is False
    assert cfg.general.cache_file == Path.home() / "theta.json.gz"


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "latnab.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config(path) == Config()


@pytest.mark.parametrize("data", [
    {"performance": {"workers": "fiber"}},
    {"performance": {"threads": 0}},
    {"design": {"t_cap": 0}},
    {"isometry": {"policy": "sometimes"}},
    {"quotient": {"max_order": "lots"}},
])
def test_bad_values(data):
    with pytest.raises(ValueError):
        config_from_dict(data)


def test_non_mapping_file(tmp_path):
    path = tmp_path / "latnab.yaml"
    path.write_text("- a\n- b\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config(path)


def test_load_errors_are_domain_errors(tmp_path):
    path = tmp_path / "latnab.yaml"
    path.write_text("performance:\n  threads: many\n", encoding="utf-8")
    with pytest.raises(InvalidValueError) as info:
        load_config(path)
    assert info.value.exit_code == 1
    with pytest.raises(InvalidValueError):
        load_config(tmp_path / "missing.yaml")
    path.write_text("performance: [\n", encoding="utf-8")
    with pytest.raises(InvalidValueError):
        load_config(path)


def test_counts():
    assert parse_count("100K") == 100_000
    assert parse_count("2m") == 2_000_000
    assert parse_count("1.5G") == 1_500_000_000
    assert parse_count(42) == 42
    assert human_count(4320) == "4.32K"
    assert human_count(2_000_000) == "2M"
    with pytest.raises(ValueError):
        parse_count("12 apples")
    with pytest.raises(ValueError):
        parse_count(-1)


def test_rationals():
    assert parse_rational("3/8") == Fraction(3, 8)
    assert parse_rational(" -2 ") == Fraction(-2)
    assert parse_rational(5) == Fraction(5)
    for bad in ("0.5", "1/0", "x"):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_policy_resolution():
    assert IsometryPolicy.AUTO.resolve(8, 8) is IsometryPolicy.STRICT
    assert IsometryPolicy.AUTO.resolve(16, 8) is IsometryPolicy.FAST
    assert IsometryPolicy.FAST.resolve(2, 8) is IsometryPolicy.FAST
    assert IsometryPolicy.STRICT.resolve(16, 8) is IsometryPolicy.STRICT


def test_find_config_file_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "custom.yaml"
    path.write_text("{}\n", encoding="utf-8")
    monkeypatch.setenv("LATNAB_CONFIG", str(path))
    assert find_config_file() == path
