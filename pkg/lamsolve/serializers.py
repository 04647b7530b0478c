"""
JSON documents for boundary problems and disk towers.

A boundary problem looks like::

    {"sections": [{"constant": [0, 0]}, {"f": [...], "g": [...]}],
     "isotopy": {"gamma": [[[f, g], ...], ...], "radii": [...]},
     "options": {"grid_r": 64, "grid_theta": 256, "inner_radius": 0.1}}

``isotopy`` is optional; when present its traced curve collection
constrains the first pair of potentials.
"""
from __future__ import annotations

from typing import Any

from rest_framework import serializers

from penner.exceptions import LamsolveError

from .models import BoundarySection, TowerStrand
from .services import collection_from_isotopy, lamsolve_settings


class SectionSerializer(serializers.Serializer):
    f = serializers.ListField(child=serializers.FloatField(), required=False, min_length=8)
    g = serializers.ListField(child=serializers.FloatField(), required=False, min_length=8)
    constant = serializers.ListField(child=serializers.FloatField(), required=False, min_length=2, max_length=2)

    def validate(self, attrs):
        if 'constant' in attrs:
            if 'f' in attrs or 'g' in attrs:
                raise serializers.ValidationError('Give either a constant covector or sampled f and g, not both.')
            return attrs
        if 'f' not in attrs or 'g' not in attrs:
            raise serializers.ValidationError('A sampled section needs both f and g.')
        if len(attrs['f']) != len(attrs['g']):
            raise serializers.ValidationError('f and g must have the same number of samples.')
        return attrs


class IsotopySerializer(serializers.Serializer):
    gamma = serializers.ListField(
        child=serializers.ListField(child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)),
        min_length=2,
    )
    radii = serializers.ListField(child=serializers.FloatField(min_value=0.0, max_value=1.0), required=False)


class OptionsSerializer(serializers.Serializer):
    grid_r = serializers.IntegerField(min_value=8, required=False)
    grid_theta = serializers.IntegerField(min_value=8, required=False)
    inner_radius = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)
    margin = serializers.FloatField(min_value=0.0, required=False)


class BoundaryProblemSerializer(serializers.Serializer):
    sections = SectionSerializer(many=True, allow_empty=False)
    isotopy = IsotopySerializer(required=False)
    options = OptionsSerializer(required=False)


class TowerStrandSerializer(serializers.Serializer):
    section = SectionSerializer()
    parent = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    radius = serializers.FloatField(min_value=0.0, max_value=1.0, default=1.0)
    label = serializers.CharField(required=False, allow_blank=True, default='')


class TowerSerializer(serializers.Serializer):
    contraction = serializers.FloatField(min_value=0.0, max_value=1.0)
    levels = serializers.ListField(child=TowerStrandSerializer(many=True, allow_empty=False), min_length=1)
    depth = serializers.IntegerField(min_value=1, required=False)
    options = OptionsSerializer(required=False)


def _validated(serializer_class, document: dict[str, Any], what: str) -> dict:
    serializer = serializer_class(data=document)
    if not serializer.is_valid():
        raise LamsolveError(f'{what} document failed validation.', code='bad_document', details=serializer.errors)
    return serializer.validated_data


def section_from_data(data: dict, samples: int) -> BoundarySection:
    if 'constant' in data:
        return BoundarySection.constant(*data['constant'], samples)
    return BoundarySection(data['f'], data['g'])


def problem_from_document(document: dict[str, Any]) -> dict[str, Any]:
    """Sections, optional traced collection and option overrides of a boundary problem."""
    data = _validated(BoundaryProblemSerializer, document, 'Boundary problem')
    options = dict(data.get('options') or {})
    samples = lamsolve_settings(options)['grid_theta']
    collection = None
    if 'isotopy' in data:
        collection = collection_from_isotopy(data['isotopy']['gamma'], data['isotopy'].get('radii'))
    return {
        'sections': [section_from_data(s, samples) for s in data['sections']],
        'collection': collection,
        'options': options,
    }


def tower_from_document(document: dict[str, Any]) -> dict[str, Any]:
    data = _validated(TowerSerializer, document, 'Tower')
    options = dict(data.get('options') or {})
    samples = lamsolve_settings(options)['grid_theta']
    levels = [
        [
            TowerStrand(
                section=section_from_data(s['section'], samples),
                parent=s['parent'],
                radius=s['radius'],
                label=s['label'],
            )
            for s in level
        ]
        for level in data['levels']
    ]
    return {
        'levels': levels,
        'contraction': data['contraction'],
        'depth': data.get('depth'),
        'options': options,
    }
