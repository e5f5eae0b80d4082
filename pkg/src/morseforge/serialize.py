"""JSON schemas for the pipeline artifacts.

All rationals are carried as decimal strings ("num/den" or "num") so
arbitrary precision survives any JSON parser.  Polynomial term lists are in
graded-lex order; files round-trip bit-exactly on canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from ._rat import Rat, rat, rat_str
from .coord_change import CoordChange, PointSet
from .poly import MultiPoly, PolyMap
from .synth import SaddleField, SynthesisResult, hessian_at, hessian_minors_at

BUNDLE_SCHEMA = "morseforge-bundle-v1"
SADDLE_SCHEMA = "morseforge-saddle-field-v1"


def _matrix_obj(rows) -> list:
    return [[rat_str(c) for c in row] for row in rows]


def _matrix_from(obj) -> list:
    return [[rat(c) for c in row] for row in obj]


def coord_change_obj(change: CoordChange) -> dict:
    return {
        "direction": [rat_str(c) for c in change.direction],
        "linear_part": _matrix_obj(change.linear_part),
        "interpolants": [p.to_obj() for p in change.interpolants],
        "forward": change.forward.to_obj(),
        "inverse": change.inverse.to_obj(),
        "axis_images": [rat_str(c) for c in change.axis_images],
    }


def bundle_obj(result: SynthesisResult) -> dict:
    """The audit bundle: input, coordinate change, every intermediate
    polynomial, the gradient field, and exact per-point Hessian data."""
    hessians = []
    minors = []
    for pt in result.input.points:
        hessians.append(_matrix_obj(hessian_at(result, pt)))
        minors.append([rat_str(m) for m in hessian_minors_at(result, pt)])
    return {
        "schema": BUNDLE_SCHEMA,
        "pointset": result.input.to_obj(),
        "coord_change": coord_change_obj(result.change),
        "alpha": result.morse.alpha.to_obj(),
        "beta": result.morse.beta.to_obj(),
        "f": result.morse.f.to_obj(),
        "q": result.q.to_obj(),
        "p": result.p_poly.to_obj(),
        "grad_field": result.grad_field.to_obj(),
        "hessians": hessians,
        "minors": minors,
        "degree_audit": result.degree_audit(),
    }


@dataclass
class ParsedBundle:
    """A bundle read back from disk.  Stored claims are kept verbatim so the
    verifier can recompute and compare rather than trust them."""

    pointset: PointSet
    forward: PolyMap
    inverse: PolyMap
    p: MultiPoly
    grad_field: PolyMap
    hessians: List[List[List[Rat]]]
    minors: List[List[Rat]]
    axis_images: List[Rat]


def parse_bundle(obj: dict) -> ParsedBundle:
    if obj.get("schema") != BUNDLE_SCHEMA:
        raise ValueError(f"not a {BUNDLE_SCHEMA} document")
    cc = obj["coord_change"]
    return ParsedBundle(
        pointset=PointSet.from_obj(obj["pointset"]),
        forward=PolyMap.from_obj(cc["forward"]),
        inverse=PolyMap.from_obj(cc["inverse"]),
        p=MultiPoly.from_obj(obj["p"]),
        grad_field=PolyMap.from_obj(obj["grad_field"]),
        hessians=[_matrix_from(h) for h in obj["hessians"]],
        minors=[[rat(m) for m in row] for row in obj["minors"]],
        axis_images=[rat(a) for a in cc["axis_images"]],
    )


def saddle_obj(sf: SaddleField) -> dict:
    return {
        "schema": SADDLE_SCHEMA,
        "gamma": sf.gamma.to_obj(),
        "field": sf.field.to_obj(),
        "pullback": sf.pullback.to_obj(),
        "stable_set": [rat_str(a) for a in sf.stable_set],
        "saddle_set": [rat_str(b) for b in sf.saddle_set],
        "coord_change": coord_change_obj(sf.change),
    }
