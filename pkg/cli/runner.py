"""
Pipeline runner behind the management commands.

``run(config)`` validates the configuration, applies parameter overrides,
dispatches to the requested stage and renders the report. Exit codes:
0 when everything ran and every certificate passed, 1 when a check failed
or a stage raised a domain error, 2 for usage and I/O errors.
"""
from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import sympy
from django.conf import settings
from rest_framework import serializers

from diskdecomp.services import decomposition_document
from geomlab.tasks import run_oracle_suite
from lamsolve.serializers import problem_from_document, tower_from_document
from lamsolve.services import nest_disks, solve_potentials
from lamsolve.tasks import run_nested_solve
from limits.services import all_scaling_prefixes, approximate_sequence, decay_certificate
from penner.exceptions import CliError, PennerError, SpinningFallback, error_payload
from penner.responses import error_envelope, success_envelope
from plumbing import catalog
from plumbing.serializers import graph_to_document, load_graph
from plumbing.services import fixed_surface, validate
from surface.services import floer_dims, invariant_weights, stretch_report, switch_violations
from transfer.services import (
    counting_matrix,
    geometry_check,
    matrix_document,
    psi_factors,
    psi_matrix,
    recurrent_classes,
    strand_census,
)
from transfer.tasks import run_strand_census
from twistsys.models import Orientation
from twistsys.services import (
    invariant_track,
    is_generalized_penner,
    parse_word,
    sweep_constancy,
    word_orientation,
)

from .export import export_diagram
from .serializers import CommandName, Example, RunConfigSerializer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

USAGE_CODES = frozenset({'io_error', 'bad_json', 'bad_document', 'usage_error', 'invalid_config', 'unsupported_kind'})
TIMING_KEYS = frozenset({'elapsed_seconds'})

EXAMPLES = {
    Example.RUNNING.value: catalog.running_example,
    Example.TWO_SPHERE.value: lambda: catalog.two_sphere(1),
    Example.TWO_SPHERE_2.value: lambda: catalog.two_sphere(2),
    Example.TWO_POSITIVE_ONE_NEGATIVE.value: catalog.two_positive_one_negative,
}

SETTING_NAMES = {
    'geometry': 'PENNER_GEOMETRY',
    'geomlab': 'PENNER_GEOMLAB',
    'lamsolve': 'PENNER_LAMSOLVE',
    'census': 'PENNER_CENSUS',
    'tolerance': 'PENNER_TOLERANCE',
}


@dataclass
class RunConfig:
    """Validated command configuration; ``overrides`` holds the merged engine sections."""

    command: str
    input: str | None = None
    example: str | None = None
    word: str | None = None
    word0: str | None = None
    core0: str | None = None
    word1: str | None = None
    core1: str | None = None
    orientation: str | None = None
    depth: int = 1
    samples: int = 100
    seed: int | None = None
    kind: str | None = None
    overrides: dict | None = None
    output: str | None = None
    deterministic: bool = True

    @classmethod
    def from_data(cls, data: dict[str, Any]) -> RunConfig:
        serializer = RunConfigSerializer(data={k: v for k, v in data.items() if v is not None})
        serializer.is_valid(raise_exception=True)
        return cls(**serializer.validated_data)


@dataclass
class RunResult:
    exit_code: int
    payload: dict | None
    text: str


@contextmanager
def engine_overrides(sections: dict | None):
    """Apply merged engine sections to the settings for the duration of a run."""
    if not sections:
        yield
        return
    missing = object()
    saved = {}
    for section, name in SETTING_NAMES.items():
        saved[name] = getattr(settings, name, missing)
        setattr(settings, name, sections[section])
    try:
        yield
    finally:
        for name, value in saved.items():
            if value is missing:
                delattr(settings, name)
            else:
                setattr(settings, name, value)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, sympy.Basic):
        return str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f'{type(value).__name__} is not JSON serializable')


def _strip_timing(value):
    if isinstance(value, dict):
        return {k: _strip_timing(v) for k, v in value.items() if k not in TIMING_KEYS}
    if isinstance(value, list):
        return [_strip_timing(v) for v in value]
    return value


def render(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + '\n'


def _graph(config: RunConfig):
    if config.input:
        return load_graph(config.input)
    return EXAMPLES[config.example]()


def _read_document(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f'Cannot read {path}: {exc}', code='io_error') from exc
    except json.JSONDecodeError as exc:
        raise CliError(f'{path} is not JSON: {exc}', code='bad_json') from exc


def _word_context(config: RunConfig):
    graph = _graph(config)
    word = parse_word(config.word, graph)
    return graph, word


def plumb_validate(config: RunConfig) -> tuple[dict, bool]:
    report = validate(_graph(config))
    return report.as_dict(), report.is_valid


def plumb_fixed_surface(config: RunConfig) -> tuple[dict, bool]:
    surface = fixed_surface(_graph(config))
    return {'surface': graph_to_document(surface.graph), 'provenance': dict(sorted(surface.provenance.items()))}, True


def twist_check(config: RunConfig) -> tuple[dict, bool]:
    graph, word = _word_context(config)
    orientation = word_orientation(word, graph)
    report = {
        'word': str(word),
        'orientation': orientation and str(orientation),
        'checks': {str(o): is_generalized_penner(word, graph, o).as_dict() for o in Orientation.values},
    }
    if orientation is not None:
        images = sweep_constancy(word, graph, orientation)
        report['sweep'] = {'images': sorted(dc.label for dc in images), 'constant': len(images) == 1}
        return report, len(images) == 1
    return report, False


def track_invariant(config: RunConfig) -> tuple[dict, bool]:
    graph, word = _word_context(config)
    dc = invariant_track(word, graph, config.orientation)
    return {
        'word': str(word),
        'orientation': str(dc.orientation),
        'choice': dc.as_dict(),
        'decomposition': decomposition_document(dc, graph),
    }, True


def transfer_matrix(config: RunConfig) -> tuple[dict, bool]:
    graph, word = _word_context(config)
    psi = psi_matrix(word, graph, config.orientation)
    certificate = geometry_check(psi)
    return {
        'matrix': matrix_document(psi),
        'recurrent_classes': recurrent_classes(counting_matrix(psi)),
        'geometry': certificate.as_dict(),
    }, certificate.passed


def transfer_census(config: RunConfig) -> tuple[dict, bool]:
    graph = _graph(config)
    result = run_strand_census.delay(graph_to_document(graph), config.word, config.depth, config.orientation).get()
    return result, result['geometry']['passed']


def limits_certify(config: RunConfig) -> tuple[dict, bool]:
    graph, word = _word_context(config)
    factors = psi_factors(word, graph, config.orientation)
    psi = psi_matrix(word, graph, config.orientation)
    certificate = decay_certificate(psi, config.depth)
    report = {'decay': certificate.as_dict(), 'spinning_fallback': False, 'extensions': []}
    try:
        for prefix in all_scaling_prefixes(psi, 1):
            report['extensions'].append(approximate_sequence(prefix, 1, factors, graph).as_dict())
    except SpinningFallback as exc:
        logger.info(f"Limits for {word}: {exc.message}")
        report['spinning_fallback'] = True
    report['extensions'].sort(key=lambda e: json.dumps(e, sort_keys=True, default=str))
    return report, certificate.passed


def surface_stretch(config: RunConfig) -> tuple[dict, bool]:
    graph, word = _word_context(config)
    return stretch_report(word, graph, config.orientation).as_dict(), True


def surface_weights(config: RunConfig) -> tuple[dict, bool]:
    graph, word = _word_context(config)
    weights = invariant_weights(word, graph, config.orientation)
    violations = switch_violations(weights, graph)
    return {'word': str(word), 'weights': weights.as_dict(), 'switch_violations': violations}, not violations


def floer(config: RunConfig) -> tuple[dict, bool]:
    report = floer_dims(config.word0, config.core0, config.word1, config.core1, _graph(config))
    return report.as_dict(), True


def lamsolve_run(config: RunConfig) -> tuple[dict, bool]:
    document = _read_document(config.input)
    if 'levels' in document:
        tower = tower_from_document(document)
        report = nest_disks(tower['levels'], tower['contraction'], tower['depth'], tower['options'])
        return report.as_dict(), report.passed
    problem = problem_from_document(document)
    solution = solve_potentials(problem['sections'], problem['collection'], problem['options'])
    gaps = {
        f'{i},{j}': solution.min_gap(i, j)
        for i in range(solution.strands) for j in range(i + 1, solution.strands)
    }
    return {
        'strands': solution.strands,
        'grid': {'r': int(solution.radii.size), 'theta': int(solution.thetas.size)},
        'inner_radius': solution.inner_radius,
        'linear': solution.linear.tolist(),
        'boundary_errors': [solution.boundary_error(i, s) for i, s in enumerate(solution.sections)],
        'min_gaps': gaps,
        'collection_checked': problem['collection'] is not None,
    }, True


def lamsolve_nest(config: RunConfig) -> tuple[dict, bool]:
    graph = _graph(config)
    result = run_nested_solve.delay(graph_to_document(graph), config.word, config.depth, config.orientation).get()
    return result, result['passed']


def geomlab_check(config: RunConfig) -> tuple[dict, bool]:
    result = run_oracle_suite.delay(samples=config.samples, seed=config.seed).get()
    return result, result['passed']


def export(config: RunConfig) -> str:
    graph, word = _word_context(config)
    if config.kind == 'matrix':
        return export_diagram(config.kind, psi_matrix(word, graph, config.orientation))
    if config.kind == 'census':
        return export_diagram(config.kind, strand_census(psi_matrix(word, graph, config.orientation), config.depth))
    return export_diagram(config.kind, decomposition_document(invariant_track(word, graph, config.orientation), graph))


HANDLERS = {
    CommandName.PLUMB_VALIDATE.value: plumb_validate,
    CommandName.PLUMB_FIXED_SURFACE.value: plumb_fixed_surface,
    CommandName.TWIST_CHECK.value: twist_check,
    CommandName.TRACK_INVARIANT.value: track_invariant,
    CommandName.TRANSFER_MATRIX.value: transfer_matrix,
    CommandName.TRANSFER_CENSUS.value: transfer_census,
    CommandName.LIMITS_CERTIFY.value: limits_certify,
    CommandName.SURFACE_STRETCH.value: surface_stretch,
    CommandName.SURFACE_WEIGHTS.value: surface_weights,
    CommandName.FLOER.value: floer,
    CommandName.LAMSOLVE_RUN.value: lamsolve_run,
    CommandName.LAMSOLVE_NEST.value: lamsolve_nest,
    CommandName.GEOMLAB_CHECK.value: geomlab_check,
}


def _write(config: RunConfig | None, text: str) -> None:
    if config is None or not config.output:
        return
    try:
        Path(config.output).write_text(text)
    except OSError as exc:
        raise CliError(f'Cannot write {config.output}: {exc}', code='io_error') from exc


def _failure(payload: dict, code: int, config: RunConfig | None) -> RunResult:
    text = render(payload)
    try:
        _write(config, text)
    except CliError as exc:
        logger.warning(exc.message)
    return RunResult(code, payload, text)


def run(config: RunConfig | dict[str, Any]) -> RunResult:
    """Run one pipeline command and render its report."""
    try:
        if not isinstance(config, RunConfig):
            config = RunConfig.from_data(config)
    except serializers.ValidationError as exc:
        payload = error_envelope('Run configuration failed validation.', code='invalid_config', errors=exc.detail)
        logger.warning(f"Invalid run configuration: {exc.detail}")
        return _failure(payload, EXIT_USAGE, None)

    logger.info(f"Running {config.command!r}")
    try:
        with engine_overrides(config.overrides):
            if config.command == CommandName.EXPORT:
                text = export(config)
                _write(config, text)
                return RunResult(EXIT_OK, None, text)
            report, passed = HANDLERS[config.command](config)
    except PennerError as exc:
        code = EXIT_USAGE if exc.code in USAGE_CODES else EXIT_CHECK_FAILED
        return _failure(error_payload(exc), code, config)

    if config.deterministic:
        report = _strip_timing(report)
    payload = success_envelope(data=report, meta={'command': config.command, 'passed': passed})
    text = render(payload)
    _write(config, text)
    if not passed:
        logger.warning(f"{config.command!r} finished with a failed check")
    return RunResult(EXIT_OK if passed else EXIT_CHECK_FAILED, payload, text)
