from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Build the transfer matrix of a word or count its strands'
    family = 'transfer'
    actions = ('matrix', 'census')
