from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Check the generalized Penner condition and the F sweep of a word'
    family = 'twist'
    actions = ('check',)
