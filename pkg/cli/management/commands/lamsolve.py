from ._base import PipelineCommand


class Command(PipelineCommand):
    """
    ``lamsolve run --input doc.json`` solves a boundary problem (a document
    with ``sections``) or nests a disk tower (a document with ``levels``).
    ``lamsolve nest`` builds the tower from the strand census of a word.
    """

    help = 'Solve for Lagrangian disks or nest a disk tower'
    family = 'lamsolve'
    actions = ('run', 'nest')
