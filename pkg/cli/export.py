"""
Diagram data: DOT digraphs for transfer matrices and track decompositions,
CSV for strand censuses. Output order is sorted so repeated exports are
byte-identical.
"""
from __future__ import annotations

import csv
import io

from penner.exceptions import CliError
from transfer.models import StrandCensus, TransferMatrix

from .serializers import ExportKind


def _quote(value: str) -> str:
    return '"' + str(value).replace('\\', '\\\\').replace('"', '\\"') + '"'


def _dot(name: str, directed: bool, nodes: list[tuple[str, dict]], edges: list[tuple[str, str, dict]]) -> str:
    arrow = '->' if directed else '--'
    lines = [f"{'digraph' if directed else 'graph'} {_quote(name)} {{"]
    for node, attrs in nodes:
        lines.append(f"  {_quote(node)}{_attributes(attrs)};")
    for u, v, attrs in edges:
        lines.append(f"  {_quote(u)} {arrow} {_quote(v)}{_attributes(attrs)};")
    lines.append('}')
    return '\n'.join(lines) + '\n'


def _attributes(attrs: dict) -> str:
    if not attrs:
        return ''
    return ' [' + ', '.join(f'{k}={_quote(v)}' for k, v in sorted(attrs.items())) + ']'


def matrix_dot(matrix: TransferMatrix) -> str:
    """One edge per chain, from its source port to its target port, typed by the outermost atom."""
    ports = sorted({str(p) for p in matrix.row_ports} | {str(p) for p in matrix.col_ports})
    edges = []
    for chain in sorted(matrix.chains(), key=lambda c: (str(c.source), str(c.target), c.code)):
        outer = chain.outermost
        edges.append((str(chain.source), str(chain.target), {
            'kind': 'identity' if chain.is_identity else str(outer.kind),
            'label': '.'.join(a.label for a in chain.atoms),
            'radius': f'{chain.radius:.6g}',
        }))
    return _dot(matrix.label or 'transfer', True, [(p, {}) for p in ports], edges)


def census_csv(census: StrandCensus) -> str:
    if census.strands is None:
        raise CliError(
            f'Census at depth {census.depth} has {census.total} strands; raise the limit to export them.',
            code='not_materialized',
        )
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['strand_id', 'disk', 'radius'])
    for port in sorted(census.strands):
        for strand in census.strands[port]:
            writer.writerow([strand.id, str(port), repr(strand.radius)])
    return buffer.getvalue()


def decomposition_dot(document: dict) -> str:
    """Parts, singular disks and regular disks, with containment and adjacency edges."""
    nodes = []
    for part in sorted(document['parts'], key=lambda p: p['id']):
        nodes.append((part['id'], {'kind': part['kind'], 'shape': 'box'}))
    for disk in sorted(document['singular'], key=lambda d: d['id']):
        nodes.append((disk['id'], {'kind': 'singular', 'flavor': disk['flavor'], 'shape': 'circle'}))
    edges = []
    for disk in sorted(document['regular'], key=lambda d: d['id']):
        nodes.append((disk['id'], {'kind': 'regular', 'shape': 'ellipse'}))
        edges += [(disk['id'], part, {'relation': 'contains'}) for part in sorted(disk['parts'])]
        edges += [(disk['id'], other, {'relation': 'adjacent'}) for other in sorted(disk['adjacent'])]
    return _dot('decomposition', False, nodes, edges)


def export_diagram(kind: str, obj) -> str:
    exporters = {
        ExportKind.MATRIX.value: matrix_dot,
        ExportKind.CENSUS.value: census_csv,
        ExportKind.DECOMPOSITION.value: decomposition_dot,
    }
    if kind not in exporters:
        raise CliError(f'Cannot export objects of kind {kind!r}.', code='unsupported_kind')
    return exporters[kind](obj)
