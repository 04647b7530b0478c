"""
JSON documents for plumbing graphs.

Documents look like::

    {"n": 2,
     "spheres": [{"id": "0", "sign": "positive"}, ...],
     "points": [{"id": "p", "a": "0", "b": "1", "gluing": "f", "pos_a": 0, "pos_b": 0}]}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema
from rest_framework import serializers

from penner.exceptions import PlumbingError

from .models import Gluing, PlumbingGraph, PlumbingPoint, Sign, Sphere

PLUMBING_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["n", "spheres", "points"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "spheres": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "sign"],
                "properties": {
                    "id": {"type": "string"},
                    "sign": {"enum": list(Sign.values)},
                },
            },
        },
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "a", "b"],
                "properties": {
                    "id": {"type": "string"},
                    "a": {"type": "string"},
                    "b": {"type": "string"},
                    "gluing": {"enum": list(Gluing.values)},
                    "pos_a": {"type": "integer", "minimum": 0},
                    "pos_b": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}


class SphereSerializer(serializers.Serializer):
    id = serializers.CharField(max_length=64)
    sign = serializers.ChoiceField(choices=Sign.choices)


class PlumbingPointSerializer(serializers.Serializer):
    id = serializers.CharField(max_length=64)
    a = serializers.CharField(max_length=64)
    b = serializers.CharField(max_length=64)
    gluing = serializers.ChoiceField(choices=Gluing.choices, default=Gluing.F)
    pos_a = serializers.IntegerField(min_value=0, required=False)
    pos_b = serializers.IntegerField(min_value=0, required=False)


class PlumbingGraphSerializer(serializers.Serializer):
    """Validates field types; the Penner-type invariants are checked by ``services.validate``."""

    n = serializers.IntegerField(min_value=1)
    spheres = SphereSerializer(many=True)
    points = PlumbingPointSerializer(many=True)

    def to_graph(self) -> PlumbingGraph:
        data = self.validated_data
        spheres = tuple(Sphere(id=s['id'], sign=s['sign']) for s in data['spheres'])
        # Missing equator positions default to input order on each sphere.
        seen: dict[str, int] = {}
        points = []
        for p in data['points']:
            pos_a = p.get('pos_a', seen.get(p['a'], 0))
            pos_b = p.get('pos_b', seen.get(p['b'], 0))
            seen[p['a']] = seen.get(p['a'], 0) + 1
            seen[p['b']] = seen.get(p['b'], 0) + 1
            points.append(PlumbingPoint(
                id=p['id'], a=p['a'], b=p['b'], gluing=p['gluing'], pos_a=pos_a, pos_b=pos_b,
            ))
        return PlumbingGraph(n=data['n'], spheres=spheres, points=tuple(points))


def graph_from_document(document: dict[str, Any]) -> PlumbingGraph:
    serializer = PlumbingGraphSerializer(data=document)
    if not serializer.is_valid():
        raise PlumbingError(
            'Plumbing document failed validation.',
            code='bad_document',
            details=serializer.errors,
        )
    return serializer.to_graph()


def graph_to_document(graph: PlumbingGraph) -> dict[str, Any]:
    return {
        "n": graph.n,
        "spheres": [{"id": s.id, "sign": str(s.sign)} for s in graph.spheres],
        "points": [
            {
                "id": p.id, "a": p.a, "b": p.b, "gluing": str(p.gluing),
                "pos_a": p.pos_a, "pos_b": p.pos_b,
            }
            for p in graph.points
        ],
    }


def validate_document(document: dict[str, Any]) -> None:
    """Check a document against the published JSON schema."""
    try:
        jsonschema.validate(document, PLUMBING_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise PlumbingError(f'Schema violation: {exc.message}', code='schema_violation') from exc


def load_graph(path: str | Path) -> PlumbingGraph:
    try:
        document = json.loads(Path(path).read_text())
    except OSError as exc:
        raise PlumbingError(f'Cannot read plumbing file {path}: {exc}', code='io_error') from exc
    except json.JSONDecodeError as exc:
        raise PlumbingError(f'Plumbing file {path} is not JSON: {exc}', code='bad_json') from exc
    return graph_from_document(document)
