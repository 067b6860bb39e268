import numpy as np
import pytest

from hbcalc.config import (
    ConfigParseError,
    ConfigValidationError,
    build_config,
    env_overrides,
    parse_text,
    parse_value,
)


def test_parse_key_value_lines():
    text = """
    # comment
    symbol = rz(0.3)
    f = [2, 1]
    lam = [0.1, -0.2]
    debug = true
    """
    d = parse_text(text)
    assert d == {"symbol": "rz(0.3)", "f": [2, 1], "lam": [0.1, -0.2], "debug": True}


def test_parse_json_and_empty():
    assert parse_text('{"count": 5}') == {"count": 5}
    assert parse_text("  \n") == {}


@pytest.mark.parametrize(
    "text",
    ["{not json", "[1, 2]", "symbol", "a = 1\na = 2", "1bad = 3", "x = {oops"],
)
def test_parse_errors(text):
    with pytest.raises(ConfigParseError):
        parse_text(text)


def test_parse_value():
    assert parse_value("0.5") == 0.5
    assert parse_value("harmonic") == "harmonic"
    assert parse_value("geometric(0.5)") == "geometric(0.5)"
    with pytest.raises(ConfigParseError):
        parse_value("two words")


def test_env_overrides():
    env = {"HBCALC_GRID_SIZE": "2048", "HBCALC_EPS": "1e-10", "OTHER": "x"}
    assert env_overrides(env) == {"grid_size": 2048, "eps": 1e-10}
    with pytest.raises(ConfigParseError):
        env_overrides({"HBCALC_TRUNCATION": "many"})


def test_layers_later_wins():
    conf = build_config("mate", {"grid_size": 2048}, {"grid_size": 1024})
    assert conf.grid_size == 1024
    assert conf.grid().truncation == 256


@pytest.mark.parametrize(
    "layer",
    [
        {"grid_size": 1000},
        {"grid_size": 512},
        {"grid_size": 2**17},
        {"grid_size": True},
        {"truncation": 5000},
        {"lambda_max": 1.0},
        {"eps": 0.1},
        {"count": 0},
        {"degrees": [-1]},
        {"kernel_kind": "szego"},
        {"f": []},
        {"c": "one"},
        {"symbol": "rz(1.5)"},
        {"symbol": "blaschke"},
        {"lambda_sequence": "geometric(2)"},
        {"lambda_sequence": [0.5, 1.2]},
        {"unknown_key": 1},
        {"kind": "clark"},
    ],
)
def test_validation_errors(layer):
    with pytest.raises(ConfigValidationError):
        build_config("mate", layer)


def test_symbol_and_sequence_specs():
    conf = build_config("completeness", {"symbol": "rz", "r": 0.3,
                                         "lambda_sequence": "geometric(0.5)", "count": 3,
                                         "grid_size": 1024})
    assert conf.symbol_spec() == ("rz", 0.3)
    assert np.allclose(conf.sequence().points, [0.5, 0.75, 0.875])
    assert conf.pair().label == "rz(0.3)"
    conf = build_config("mate", {"numerator": [0.25], "denominator": [1, -0.5],
                                 "grid_size": 1024})
    assert conf.symbol_spec()[0] == "rational"
    assert conf.pair().pythagorean_residual() < 1e-12
    conf = build_config("completeness", {"lambda_sequence": [[0, 0.5], 0.2], "count": 5})
    assert np.allclose(conf.sequence().points, [0.5j, 0.2])


def test_digest_is_stable_and_sensitive():
    a = build_config("mate", {"grid_size": 1024})
    b = build_config("mate", {"grid_size": 1024})
    c = build_config("mate", {"grid_size": 2048})
    assert a.digest() == b.digest() != c.digest()
    assert len(a.digest()) == 16
    assert a.provenance("mate") == f"{a.digest()}:mate"
