from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Rank of Floer cohomology between the images of two core spheres'
    family = 'floer'
    needs_word = False

    def add_command_arguments(self, parser):
        parser.add_argument('--word0', type=str, required=True, help='Standard-type word')
        parser.add_argument('--core0', type=str, required=True, help='Core sphere moved by --word0')
        parser.add_argument('--word1', type=str, required=True, help='Opposite-type word')
        parser.add_argument('--core1', type=str, required=True, help='Core sphere moved by --word1')
