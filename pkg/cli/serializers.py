"""
Run configuration for the pipeline commands.

Parameter overrides are merged into the configured engine sections and the
admissibility checks of ``penner.config`` run again on the result.
"""
from __future__ import annotations

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from django.db import models
from rest_framework import serializers

from penner.config import MIN_GRID_SIZE, VALID_PROFILES, engine_settings, engine_tolerance, validate_geometry
from twistsys.models import Orientation


class CommandName(models.TextChoices):
    PLUMB_VALIDATE = 'plumb validate', 'Validate a plumbing graph'
    PLUMB_FIXED_SURFACE = 'plumb fixed-surface', 'Fixed surface of the involution'
    TWIST_CHECK = 'twist check', 'Generalized Penner check'
    TRACK_INVARIANT = 'track invariant', 'Invariant track and its decomposition'
    TRANSFER_MATRIX = 'transfer matrix', 'Transfer matrix of a word'
    TRANSFER_CENSUS = 'transfer census', 'Strand census'
    LIMITS_CERTIFY = 'limits certify', 'Decay and trivial-atom reachability'
    SURFACE_STRETCH = 'surface stretch', 'Stretch factor'
    SURFACE_WEIGHTS = 'surface weights', 'Invariant weights'
    FLOER = 'floer', 'Floer cohomology rank'
    LAMSOLVE_RUN = 'lamsolve run', 'Solve boundary problems or towers'
    LAMSOLVE_NEST = 'lamsolve nest', 'Census-driven nested solve'
    GEOMLAB_CHECK = 'geomlab check', 'Model chart oracle suite'
    EXPORT = 'export', 'Diagram data'


class ExportKind(models.TextChoices):
    MATRIX = 'matrix', 'Transfer matrix as DOT'
    CENSUS = 'census', 'Strand census as CSV'
    DECOMPOSITION = 'decomposition', 'Track decomposition as DOT'


class Example(models.TextChoices):
    RUNNING = 'running', 'Two spheres of one sign and one of the other'
    TWO_SPHERE = 'two_sphere', 'Two spheres meeting once'
    TWO_SPHERE_2 = 'two_sphere_2', 'Two spheres meeting twice'
    TWO_POSITIVE_ONE_NEGATIVE = 'two_positive_one_negative', 'Two positive spheres and one negative'


OVERRIDE_SECTIONS = {
    'geometry': ('r0', 'r1', 'r2', 'trivial_scale', 'trivial_offset'),
    'geomlab': ('epsilon', 'profile', 'fd_step', 'fd_tol'),
    'lamsolve': ('grid_r', 'grid_theta', 'inner_radius', 'margin'),
    'census': ('limit',),
}
INTEGER_KEYS = frozenset({'grid_r', 'grid_theta', 'limit'})

GRAPH_COMMANDS = frozenset(CommandName.values) - {CommandName.LAMSOLVE_RUN.value, CommandName.GEOMLAB_CHECK.value}
WORD_COMMANDS = frozenset(c.value for c in (
    CommandName.TWIST_CHECK, CommandName.TRACK_INVARIANT, CommandName.TRANSFER_MATRIX, CommandName.TRANSFER_CENSUS,
    CommandName.LIMITS_CERTIFY, CommandName.SURFACE_STRETCH, CommandName.SURFACE_WEIGHTS, CommandName.LAMSOLVE_NEST,
    CommandName.EXPORT,
))


def _coerce(key: str, value):
    if key == 'profile':
        if value not in VALID_PROFILES:
            raise serializers.ValidationError(f'profile must be one of {sorted(VALID_PROFILES)}, got {value!r}.')
        return value
    try:
        return int(value) if key in INTEGER_KEYS else float(value)
    except (TypeError, ValueError):
        raise serializers.ValidationError(f'{key} must be a number, got {value!r}.')


def resolve_overrides(overrides: dict) -> dict:
    """Merge overrides into the engine sections and re-check admissibility."""
    known = {key: section for section, keys in OVERRIDE_SECTIONS.items() for key in keys}
    unknown = sorted(set(overrides) - set(known) - {'tolerance'})
    if unknown:
        raise serializers.ValidationError(f'Unknown parameter(s): {", ".join(unknown)}.')

    sections = {section: engine_settings(section) for section in OVERRIDE_SECTIONS}
    for key, value in overrides.items():
        if key != 'tolerance':
            sections[known[key]][key] = _coerce(key, value)

    try:
        validate_geometry(sections['geometry'])
    except ImproperlyConfigured as exc:
        raise serializers.ValidationError(str(exc))
    geomlab, lamsolve = sections['geomlab'], sections['lamsolve']
    if geomlab['epsilon'] <= 0 or geomlab['fd_step'] <= 0 or geomlab['fd_tol'] <= 0:
        raise serializers.ValidationError('epsilon, fd_step and fd_tol must be positive.')
    if min(lamsolve['grid_r'], lamsolve['grid_theta']) < MIN_GRID_SIZE:
        raise serializers.ValidationError(f'Grid sizes must be at least {MIN_GRID_SIZE}.')
    if not 0 < lamsolve['inner_radius'] < 1:
        raise serializers.ValidationError('inner_radius must lie in (0, 1).')
    if lamsolve['margin'] < 0:
        raise serializers.ValidationError('margin must be non-negative.')
    if sections['census']['limit'] < 1:
        raise serializers.ValidationError('limit must be positive.')

    tolerance = _coerce('tolerance', overrides.get('tolerance', engine_tolerance()))
    if tolerance <= 0:
        raise serializers.ValidationError('tolerance must be positive.')
    sections['tolerance'] = tolerance
    return sections


class RunConfigSerializer(serializers.Serializer):
    command = serializers.ChoiceField(choices=CommandName.choices)
    input = serializers.CharField(required=False, allow_blank=False)
    example = serializers.ChoiceField(choices=Example.choices, required=False)
    word = serializers.CharField(required=False)
    word0 = serializers.CharField(required=False)
    core0 = serializers.CharField(required=False)
    word1 = serializers.CharField(required=False)
    core1 = serializers.CharField(required=False)
    orientation = serializers.ChoiceField(choices=Orientation.choices, required=False, allow_null=True, default=None)
    depth = serializers.IntegerField(min_value=0, default=1)
    samples = serializers.IntegerField(min_value=1, default=100)
    seed = serializers.IntegerField(required=False, allow_null=True, default=None)
    kind = serializers.ChoiceField(choices=ExportKind.choices, required=False)
    overrides = serializers.DictField(required=False, default=dict)
    output = serializers.CharField(required=False, allow_blank=False)
    deterministic = serializers.BooleanField(required=False)

    def validate_overrides(self, value):
        return resolve_overrides(value)

    def validate(self, attrs):
        command = attrs['command']
        if command in GRAPH_COMMANDS and not (attrs.get('input') or attrs.get('example')):
            raise serializers.ValidationError({'input': f'{command} needs a plumbing graph (--input or --example).'})
        if command in WORD_COMMANDS and not attrs.get('word'):
            raise serializers.ValidationError({'word': f'{command} needs a word.'})
        if command == CommandName.FLOER:
            missing = [k for k in ('word0', 'core0', 'word1', 'core1') if not attrs.get(k)]
            if missing:
                raise serializers.ValidationError({k: 'Required for floer.' for k in missing})
        if command == CommandName.LAMSOLVE_RUN and not attrs.get('input'):
            raise serializers.ValidationError({'input': 'lamsolve run needs a boundary or tower document.'})
        if command == CommandName.EXPORT and not attrs.get('kind'):
            raise serializers.ValidationError({'kind': 'export needs a kind.'})
        if command == CommandName.LAMSOLVE_NEST and attrs['depth'] < 1:
            raise serializers.ValidationError({'depth': 'A nested solve needs depth >= 1.'})
        if 'deterministic' not in attrs:
            attrs['deterministic'] = getattr(settings, 'PENNER_DETERMINISTIC', True)
        return attrs
