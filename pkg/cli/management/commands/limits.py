from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Certify radius decay and extend scaling strands to trivial atoms'
    family = 'limits'
    actions = ('certify',)
