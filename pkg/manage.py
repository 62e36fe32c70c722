#!/usr/bin/env python
"""Django's command-line utility for the approx toolkit.

The approx subcommands go through `approx.cli.run`, which prepares the run
ledger and maps failures to exit codes; everything else is plain Django.
"""
import os
import sys


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'approx_site.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    from approx import cli

    if len(argv) > 1 and argv[1] in cli.SUBCOMMANDS:
        sys.exit(cli.run(argv[1:]))
    execute_from_command_line(argv)


if __name__ == '__main__':
    main()
