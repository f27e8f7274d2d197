"""Scenario files: JSON documents describing a space, filtration, market and vectors.

Layout (every section except ``space`` is optional)::

    {
      "space":      {"size": 4, "weights": ["1/4", "1/4", "1/4", "1/4"]},
      "filtration": [[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1], [2], [3]]],
      "prices":     [["4", "4", "4", "4"], ...],        # one row per time
      "claims":     {"call": ["3", "3", "0", "0"]},
      "transform":  [1, 2, 0, 3],
      "vectors":    {"f": ["1", "3", "2", "6"]}
    }

Rationals are strings ``"p/q"`` or ``"n"`` (JSON integers are also accepted).
Decimal notation and JSON floats are rejected so nothing is rounded on the way
in.  Structural problems raise :class:`ScenarioParseError`; well-formed files
whose contents violate an invariant raise :class:`ScenarioValidationError`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .ergodic import TransformSystem
from .filtration import AdaptedProcess, Filtration
from .lattice import LatticeError, LatticeVector, SampleSpace
from .market import MarketModel

__all__ = [
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "Scenario",
    "load",
    "loads",
    "dumps",
    "format_rational",
]

SECTIONS = ("space", "filtration", "prices", "claims", "transform", "vectors")

_RATIONAL = re.compile(r"^[+-]?\d+(?:/\d+)?$")


class ScenarioError(Exception):
    exit_code = 1


class ScenarioParseError(ScenarioError):
    exit_code = 2


class ScenarioValidationError(ScenarioError):
    exit_code = 3


def format_rational(x: Fraction) -> str:
    return str(x)


def _rational(x, where: str) -> Fraction:
    if isinstance(x, bool):
        raise ScenarioParseError(f"{where}: expected a rational string, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise ScenarioParseError(f"{where}: JSON number {x!r} is not exact; write it as a \"p/q\" string")
    if not isinstance(x, str):
        raise ScenarioParseError(f"{where}: expected a rational string, got {type(x).__name__}")
    s = x.strip()
    if not _RATIONAL.match(s):
        raise ScenarioParseError(f"{where}: invalid rational {x!r} (expected \"p/q\" or an integer)")
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise ScenarioParseError(f"{where}: zero denominator in {x!r}")
    return Fraction(int(num), int(den) if den else 1)


def _list(x, where: str) -> list:
    if not isinstance(x, list):
        raise ScenarioParseError(f"{where}: expected a list, got {type(x).__name__}")
    return x


def _index(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ScenarioParseError(f"{where}: expected an integer index, got {x!r}")
    return x


def _rationals(x, where: str) -> list[Fraction]:
    return [_rational(v, f"{where}[{i}]") for i, v in enumerate(_list(x, where))]


def _named(x, where: str) -> dict[str, list[Fraction]]:
    if not isinstance(x, dict):
        raise ScenarioParseError(f"{where}: expected an object of named vectors")
    return {name: _rationals(v, f"{where}.{name}") for name, v in x.items()}


@dataclass
class Scenario:
    """A validated scenario.  Absent sections are ``None`` (or empty dicts)."""

    space: SampleSpace
    filtration: Filtration | None = None
    market: MarketModel | None = None
    claims: dict[str, LatticeVector] = field(default_factory=dict)
    transform: TransformSystem | None = None
    vectors: dict[str, LatticeVector] = field(default_factory=dict)

    def require_filtration(self) -> Filtration:
        if self.filtration is None:
            raise ScenarioValidationError("scenario has no 'filtration' section")
        return self.filtration

    def require_market(self) -> MarketModel:
        if self.market is None:
            raise ScenarioValidationError("scenario has no 'prices' section")
        return self.market

    def require_transform(self) -> TransformSystem:
        if self.transform is None:
            raise ScenarioValidationError("scenario has no 'transform' section")
        return self.transform

    def vector(self, name: str) -> LatticeVector:
        if name not in self.vectors:
            raise ScenarioValidationError(f"no vector named {name!r} (have {sorted(self.vectors)})")
        return self.vectors[name]

    def claim(self, name: str) -> LatticeVector:
        if name not in self.claims:
            raise ScenarioValidationError(f"no claim named {name!r} (have {sorted(self.claims)})")
        return self.claims[name]

    def to_json(self) -> dict:
        doc: dict = {
            "space": {"size": self.space.size, "weights": [format_rational(w) for w in self.space.weights]}
        }
        if self.filtration is not None:
            doc["filtration"] = [[list(a) for a in p.atoms] for p in self.filtration.partitions]
        if self.market is not None:
            doc["prices"] = [s.as_strings() for s in self.market.prices]
        if self.claims:
            doc["claims"] = {k: v.as_strings() for k, v in self.claims.items()}
        if self.transform is not None:
            doc["transform"] = list(self.transform.tau)
        if self.vectors:
            doc["vectors"] = {k: v.as_strings() for k, v in self.vectors.items()}
        return doc


def _parse(doc) -> dict:
    if not isinstance(doc, dict):
        raise ScenarioParseError("top level: expected a JSON object")
    unknown = sorted(set(doc) - set(SECTIONS))
    if unknown:
        raise ScenarioParseError(f"top level: unknown sections {unknown}")
    if "space" not in doc:
        raise ScenarioParseError("top level: missing 'space' section")
    sp = doc["space"]
    if not isinstance(sp, dict) or "weights" not in sp:
        raise ScenarioParseError("space: expected an object with 'size' and 'weights'")
    out: dict = {"weights": _rationals(sp["weights"], "space.weights")}
    out["size"] = _index(sp.get("size", len(out["weights"])), "space.size")
    if "filtration" in doc:
        out["filtration"] = [
            [
                [_index(i, f"filtration[{t}][{k}][{j}]") for j, i in enumerate(_list(atom, f"filtration[{t}][{k}]"))]
                for k, atom in enumerate(_list(part, f"filtration[{t}]"))
            ]
            for t, part in enumerate(_list(doc["filtration"], "filtration"))
        ]
    if "prices" in doc:
        out["prices"] = [_rationals(row, f"prices[{t}]") for t, row in enumerate(_list(doc["prices"], "prices"))]
    if "claims" in doc:
        out["claims"] = _named(doc["claims"], "claims")
    if "transform" in doc:
        out["transform"] = [_index(i, f"transform[{k}]") for k, i in enumerate(_list(doc["transform"], "transform"))]
    if "vectors" in doc:
        out["vectors"] = _named(doc["vectors"], "vectors")
    return out


def _build(raw: dict) -> Scenario:
    try:
        if raw["size"] != len(raw["weights"]):
            raise ScenarioValidationError(f"space: size {raw['size']} but {len(raw['weights'])} weights")
        space = SampleSpace(raw["weights"])
        flt = Filtration(space, raw["filtration"]) if "filtration" in raw else None
        market = None
        if "prices" in raw:
            if flt is None:
                raise ScenarioValidationError("prices: a 'filtration' section is required")
            market = MarketModel(flt, AdaptedProcess(flt, raw["prices"]))
        claims = {}
        for name, vals in raw.get("claims", {}).items():
            v = LatticeVector(space, vals)
            if flt is not None and not flt.partitions[-1].is_measurable(v):
                raise ScenarioValidationError(f"claims.{name}: payoff is not measurable at the horizon")
            claims[name] = v
        transform = TransformSystem(space, raw["transform"]) if "transform" in raw else None
        vectors = {name: LatticeVector(space, vals) for name, vals in raw.get("vectors", {}).items()}
    except ScenarioValidationError:
        raise
    except LatticeError as exc:
        raise ScenarioValidationError(str(exc)) from exc
    return Scenario(space, flt, market, claims, transform, vectors)


def loads(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return _build(_parse(doc))


def load(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioParseError(f"{path}: {exc.strerror}") from exc
    return loads(text)


def dumps(scenario: Scenario) -> str:
    """Canonical serialisation: section order fixed, rationals in lowest terms."""
    return json.dumps(scenario.to_json(), indent=2) + "\n"
