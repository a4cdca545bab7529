"""Scenario documents: exact JSON ingestion and emission.

A scenario is a single JSON file carrying the curve model, one or more
named metrised divisors, and optional command parameters.  All numeric
leaves are exact: integers, or strings "p/q"; floats are rejected so no
rounding can enter through the input path.

Schema (informal; see README for the worked example):

    {
      "curve": {"genus": 0, "points": {"p0": 1, "pinf": 1}},
      "divisors": {
        "W1": {
          "base_value": "0",
          "edges": {
            "pinf": {"mu": "1", "phi": {"vertices": [["0","0"]],
                                         "final_slope": "0"}},
            "p0":   {"mu": "0", "phi": {"vertices": [["0","0"],["1","-1/2"]],
                                         "final_slope": "0"}}
          }
        }
      },
      "params": {"divisor": "W1", "pair": ["W1","W1"], "n": [10, 100],
                 "t_grid": ["-1/2", "0"], "seed": 7, "trials": 1000}
    }

A PLF is given by its vertex list [t, value] (starting at t = 0) plus
the final slope.  Divisor edges must satisfy the normalisation
phi(0) = 0 and final slope 0; violations are schema errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from .curve import CurveModel
from .errors import InfeasibleError, ScenarioError
from .green import MetrisedRDivisor, make_metrised
from .plf import PLF


@dataclass(frozen=True)
class Scenario:
    curve: CurveModel
    divisors: dict[str, MetrisedRDivisor]
    params: dict[str, Any]

    def divisor(self, name: str | None = None) -> MetrisedRDivisor:
        if name is None:
            name = self.params.get("divisor")
        if name is None:
            if len(self.divisors) == 1:
                return next(iter(self.divisors.values()))
            raise ScenarioError(
                "scenario has several divisors; select one with params.divisor"
            )
        if name not in self.divisors:
            raise ScenarioError(f"unknown divisor {name!r}")
        return self.divisors[name]

    def pair(self) -> tuple[MetrisedRDivisor, MetrisedRDivisor]:
        names = self.params.get("pair")
        if names is None:
            if len(self.divisors) == 2:
                a, b = self.divisors.values()
                return a, b
            raise ScenarioError("pairing needs params.pair = [name1, name2]")
        if not isinstance(names, list) or len(names) != 2:
            raise ScenarioError("params.pair must list exactly two divisor names")
        return self.divisor(names[0]), self.divisor(names[1])


def parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ScenarioError(f"{where}: numbers must be integers or 'p/q' strings")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(f"{where}: bad rational {value!r} ({exc})") from None
    raise ScenarioError(f"{where}: expected a rational, got {type(value).__name__}")


def parse_plf(doc: Any, where: str) -> PLF:
    if not isinstance(doc, Mapping):
        raise ScenarioError(f"{where}: expected a PLF object")
    verts = doc.get("vertices")
    if not isinstance(verts, list) or not verts:
        raise ScenarioError(f"{where}: PLF needs a nonempty 'vertices' list")
    parsed = []
    for i, pair in enumerate(verts):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ScenarioError(f"{where}.vertices[{i}]: expected [t, value]")
        parsed.append(
            (
                parse_rational(pair[0], f"{where}.vertices[{i}][0]"),
                parse_rational(pair[1], f"{where}.vertices[{i}][1]"),
            )
        )
    final = parse_rational(doc.get("final_slope", 0), f"{where}.final_slope")
    try:
        return PLF.from_vertices(parsed, final)
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def parse_scenario(doc: Any) -> Scenario:
    if not isinstance(doc, Mapping):
        raise ScenarioError("scenario must be a JSON object")
    curve_doc = doc.get("curve")
    if not isinstance(curve_doc, Mapping):
        raise ScenarioError("scenario.curve must be an object")
    genus = curve_doc.get("genus", 0)
    if not isinstance(genus, int) or isinstance(genus, bool) or genus < 0:
        raise ScenarioError("curve.genus must be a nonnegative integer")
    points = curve_doc.get("points")
    if not isinstance(points, Mapping) or not points:
        raise ScenarioError("curve.points must be a nonempty object")
    weights = {}
    for x, w in points.items():
        if not isinstance(w, int) or isinstance(w, bool) or w <= 0:
            raise ScenarioError(f"curve.points[{x!r}]: weight must be a positive integer")
        weights[str(x)] = w
    curve = CurveModel.of(genus, weights)

    divisors_doc = doc.get("divisors")
    if not isinstance(divisors_doc, Mapping) or not divisors_doc:
        raise ScenarioError("scenario.divisors must be a nonempty object")
    divisors = {}
    for name, ddoc in divisors_doc.items():
        where = f"divisors.{name}"
        if not isinstance(ddoc, Mapping):
            raise ScenarioError(f"{where}: expected an object")
        base = parse_rational(ddoc.get("base_value", 0), f"{where}.base_value")
        edges = {}
        for x, edoc in (ddoc.get("edges") or {}).items():
            ewhere = f"{where}.edges.{x}"
            if x not in weights:
                raise ScenarioError(f"{ewhere}: point not declared in curve.points")
            if not isinstance(edoc, Mapping):
                raise ScenarioError(f"{ewhere}: expected an object")
            mu = parse_rational(edoc.get("mu", 0), f"{ewhere}.mu")
            phi = (
                parse_plf(edoc["phi"], f"{ewhere}.phi")
                if "phi" in edoc
                else PLF.constant(0)
            )
            edges[str(x)] = (mu, phi)
        try:
            divisors[str(name)] = make_metrised(curve, base, edges)
        except InfeasibleError as exc:
            raise ScenarioError(f"{where}: {exc}") from None

    params = doc.get("params") or {}
    if not isinstance(params, Mapping):
        raise ScenarioError("scenario.params must be an object")
    return Scenario(curve, divisors, dict(params))


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "rb") as handle:
            doc = json.load(handle, parse_float=_reject_float)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from None
    return parse_scenario(doc)


def _reject_float(text: str) -> None:
    raise ScenarioError(f"float literal {text!r} in scenario; use 'p/q' strings")


# ---------------------------------------------------------------------------
# Exact emission
# ---------------------------------------------------------------------------


def rational_str(q: Fraction) -> str:
    return str(q)


def jsonable(value: Any) -> Any:
    """Recursive exact rendering: Fractions as 'p/q' strings, dataclases
    and mappings as objects, tuples as arrays."""
    from dataclasses import asdict, is_dataclass

    if isinstance(value, Fraction):
        return rational_str(value)
    if isinstance(value, float):
        # Only the infinities ever reach serialisation.
        return {float("inf"): "inf", float("-inf"): "-inf"}[value]
    if is_dataclass(value) and not isinstance(value, type):
        return jsonable(asdict(value))
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def plf_doc(f: PLF) -> dict[str, Any]:
    return {
        "vertices": [[rational_str(t), rational_str(v)] for t, v in f.vertices],
        "final_slope": rational_str(f.final_slope),
    }


def metrised_doc(g: MetrisedRDivisor) -> dict[str, Any]:
    return {
        "base_value": rational_str(g.base_value),
        "edges": {
            x: {"mu": rational_str(e.mu), "phi": plf_doc(e.phi)} for x, e in g.edges
        },
    }


def scenario_doc(
    curve: CurveModel, divisors: Mapping[str, MetrisedRDivisor], params: Mapping[str, Any]
) -> dict[str, Any]:
    return {
        "curve": {"genus": curve.genus, "points": dict(curve.weights)},
        "divisors": {name: metrised_doc(g) for name, g in divisors.items()},
        "params": jsonable(dict(params)),
    }
