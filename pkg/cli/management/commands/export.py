from cli.serializers import ExportKind

from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Export diagram data: DOT for matrices and decompositions, CSV for censuses'
    family = 'export'

    def add_command_arguments(self, parser):
        parser.add_argument('--kind', choices=ExportKind.values, required=True, help='What to export')
