from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Run the model chart oracle suite'
    family = 'geomlab'
    actions = ('check',)
    needs_graph = False
    needs_word = False

    def add_command_arguments(self, parser):
        parser.add_argument('--samples', type=int, help='Random samples per check (default 100)')
        parser.add_argument('--seed', type=int, help='Sample seed (default PENNER_SEED)')
