from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Stretch factor and invariant weights of a word on the fixed surface'
    family = 'surface'
    actions = ('stretch', 'weights')
