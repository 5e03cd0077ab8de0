"""
Shared plumbing for the toolkit's management commands
"""

import logging
import os

from django.core.management.base import BaseCommand, CommandError

from ..artifacts import open_input
from ..corpus import load_concepts, parse_corpus, read_contexts
from ..embedding import load_embeddings

logger = logging.getLogger(__name__)

# Options every Django command carries; they are not part of a run's config.
DJANGO_OPTIONS = {
    'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color', 'force_color', 'skip_checks',
    'stdout', 'stderr',
}


class ToolkitCommand(BaseCommand):
    """
    Base command: subclasses implement run(**options)

    Missing files and toolkit errors (all ValueError subclasses) become a
    CommandError, which exits nonzero with a one-line message.
    """

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except FileNotFoundError as e:
            raise CommandError(str(e) if 'file not found' in str(e) else f"file not found: {e.filename}")
        except ValueError as e:
            raise CommandError(str(e))

    def run(self, **options):
        raise NotImplementedError

    def config_echo(self, options):
        """Effective parameters of this invocation, for artifact headers"""
        echo = {key: value for key, value in sorted(options.items()) if key not in DJANGO_OPTIONS}
        echo['command'] = self.command_name()
        return echo

    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]


def read_concepts_file(path):
    with open_input(path) as stream:
        return load_concepts(stream)


def read_contexts_file(path):
    with open_input(path) as stream:
        contexts, _ = read_contexts(stream)
    return contexts


def read_corpus_file(path):
    with open_input(path) as stream:
        return parse_corpus(stream, source=os.path.basename(path))


def read_embeddings_file(path):
    with open_input(path) as stream:
        return load_embeddings(stream)
