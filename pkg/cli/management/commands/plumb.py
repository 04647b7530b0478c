from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Validate a plumbing graph or build its fixed surface'
    family = 'plumb'
    actions = ('validate', 'fixed-surface')
    needs_word = False
