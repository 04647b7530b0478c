from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Print the invariant track of a Penner word with its disk decomposition'
    family = 'track'
    actions = ('invariant',)
