from .cli import build_parser, run
from .commands import COMMAND_HANDLERS, EXIT_OK, EXIT_ERROR, EXIT_WARNING

__all__ = ['build_parser', 'run', 'COMMAND_HANDLERS', 'EXIT_OK', 'EXIT_ERROR', 'EXIT_WARNING']
