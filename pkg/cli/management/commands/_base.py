"""
Shared argument handling for the pipeline commands.

Each command maps its arguments onto a run configuration, hands it to
``cli.runner.run`` and writes the rendered report to stdout. A nonzero
exit code surfaces as ``CommandError`` carrying the same return code.
"""
import argparse

from django.core.management.base import BaseCommand, CommandError

from cli.runner import run
from cli.serializers import Example
from twistsys.models import Orientation


def parse_assignment(text):
    key, sep, value = text.partition('=')
    if not sep or not key:
        raise argparse.ArgumentTypeError(f'Expected key=value, got {text!r}')
    return key.strip(), value.strip()


class PipelineCommand(BaseCommand):
    family = ''
    actions: tuple[str, ...] = ()
    needs_graph = True
    needs_word = True

    def add_arguments(self, parser):
        if self.actions:
            parser.add_argument('action', choices=self.actions, help='Stage to run')
        parser.add_argument('--input', type=str, help='Path to a JSON document')
        if self.needs_graph:
            parser.add_argument(
                '--example',
                choices=Example.values,
                help='Use a built-in plumbing graph instead of --input',
            )
        if self.needs_word:
            parser.add_argument('--word', type=str, help='Twist word, e.g. "a1 b1^-1"')
            parser.add_argument('--orientation', choices=Orientation.values, help='Penner orientation to assume')
            parser.add_argument('--depth', type=int, help='Strand depth (default 1)')
        parser.add_argument(
            '--set',
            dest='overrides',
            type=parse_assignment,
            action='append',
            default=[],
            metavar='KEY=VALUE',
            help='Override an engine parameter, e.g. --set r1=0.3',
        )
        parser.add_argument('--output', type=str, help='Also write the report to this path')
        parser.add_argument(
            '--deterministic',
            action=argparse.BooleanOptionalAction,
            default=None,
            help='Drop timing fields so repeated runs are byte-identical',
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def command_name(self, options):
        return f"{self.family} {options['action']}" if self.actions else self.family

    def build_config(self, options):
        keys = (
            'input', 'example', 'word', 'orientation', 'depth', 'output', 'deterministic',
            'word0', 'core0', 'word1', 'core1', 'samples', 'seed', 'kind',
        )
        config = {key: options.get(key) for key in keys}
        config['command'] = self.command_name(options)
        config['overrides'] = dict(options.get('overrides') or [])
        return {k: v for k, v in config.items() if v is not None}

    def handle(self, *args, **options):
        result = run(self.build_config(options))
        self.stdout.write(result.text, ending='')
        if result.exit_code:
            raise CommandError(
                f'{self.command_name(options)} exited with status {result.exit_code}',
                returncode=result.exit_code,
            )
