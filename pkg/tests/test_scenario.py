import json
import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condsup.generate import random_tree_market, random_vector
from condsup.scenario import Scenario, ScenarioParseError, ScenarioValidationError, dumps, load, loads
from golden_cases import FIXTURES

VALID = sorted(p for p in FIXTURES.glob("*.json") if p.name != "bad_weight.json")


@pytest.mark.parametrize("path", VALID, ids=lambda p: p.name)
def test_fixture_round_trip(path):
    sc = load(path)
    # fixtures are canonical: equal to their re-serialisation up to whitespace
    assert sc.to_json() == json.loads(path.read_text())
    assert "".join(dumps(sc).split()) == "".join(path.read_text().split())
    assert dumps(loads(dumps(sc))) == dumps(sc)


def test_rationals_exact():
    sc = loads('{"space": {"size": 3, "weights": ["1/3", "1/3", "1/3"]}, "vectors": {"v": ["-7/3", 2, "+4"]}}')
    assert sc.space.weights == (Fr(1, 3),) * 3
    assert list(sc.vector("v")) == [Fr(-7, 3), 2, 4]


def test_non_canonical_rationals_normalised():
    sc = loads('{"space": {"size": 2, "weights": ["2/4", "1/2"]}}')
    assert dumps(sc).count('"1/2"') == 2


@pytest.mark.parametrize(
    "weights, where",
    [('"1/0"', "space.weights[0]"), ('"1e-1"', "space.weights[0]"), ("true", "space.weights[0]"), ("[1]", "space.weights[0]")],
)
def test_parse_errors_carry_position(weights, where):
    with pytest.raises(ScenarioParseError) as info:
        loads('{"space": {"size": 2, "weights": [%s, "1/2"]}}' % weights)
    assert str(info.value).startswith(where)


def test_parse_error_positions_in_nested_sections():
    doc = {"space": {"size": 2, "weights": ["1/2", "1/2"]}, "filtration": [[[0, "1"]]]}
    with pytest.raises(ScenarioParseError, match=r"^filtration\[0\]\[0\]\[1\]"):
        loads(json.dumps(doc))
    doc = {"space": {"size": 2, "weights": ["1/2", "1/2"]}, "vectors": {"f": ["1", "x"]}}
    with pytest.raises(ScenarioParseError, match=r"^vectors\.f\[1\]"):
        loads(json.dumps(doc))


def test_validation_errors():
    with pytest.raises(ScenarioValidationError):
        loads('{"space": {"size": 2, "weights": ["1/2", "1/2"]}, "prices": [["1", "1"]]}')
    with pytest.raises(ScenarioValidationError):
        loads('{"space": {"size": 2, "weights": ["1/2", "1/2"]}, "vectors": {"f": ["1"]}}')
    with pytest.raises(ScenarioValidationError):
        load(FIXTURES / "no_transform.json").require_transform()


def _random_scenario(rng):
    m = random_tree_market(rng, rng.randint(1, 3))
    space = m.space
    return Scenario(
        space,
        m.filtration,
        m,
        claims={"h": random_vector(rng, space)},
        vectors={"f": random_vector(rng, space), "g": random_vector(rng, space)},
    )


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_random(seed):
    sc = _random_scenario(random.Random(seed))
    text = dumps(sc)
    back = loads(text)
    assert dumps(back) == text
    assert back.market.prices == sc.market.prices
    assert back.vectors == sc.vectors and back.claims == sc.claims
