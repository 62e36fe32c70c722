"""Single entry point: `python -m approx <subcommand> ...`.

Subcommands are Django management commands; this wrapper limits the
surface to them, prepares the run ledger and returns the exit code.
"""

import os
import sys

import numpy as np

from .exceptions import EXIT_INVALID, DomainError

SUBCOMMANDS = ("diff", "lowerbound", "specext", "radon", "propc", "repro")
NOISE_PATTERNS = ("uniform", "alternating")

USAGE = (
    "usage: approx {%s} [options]\n"
    "       approx <subcommand> --help\n" % ",".join(SUBCOMMANDS)
)


def synth_noise(signal, delta, seed=0, pattern="uniform"):
    """Signal plus noise with sup-norm at most delta; the result carries delta.

    `alternating` is +delta, -delta, ... from the first sample: full amplitude
    everywhere, yet on an even number of samples it cancels in any central
    difference with an integer step, since samples i-k and i+k share parity.
    `uniform` draws i.i.d. values in [-delta, delta) from a seeded generator.
    """
    if not delta >= 0:
        raise DomainError(f"delta must be nonnegative, got {delta}")
    if pattern not in NOISE_PATTERNS:
        raise DomainError(f"unknown noise pattern {pattern!r}; choose from {NOISE_PATTERNS}")
    if delta == 0:
        return signal.with_values(signal.values, delta=0.0)
    n = len(signal)
    if pattern == "alternating":
        noise = delta * np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    else:
        noise = np.random.default_rng(seed).uniform(-delta, delta, n)
    return signal.with_values(signal.values + noise, delta=delta)


def _setup():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "approx_site.settings")
    import django

    django.setup()
    from django.core.management import call_command

    call_command("migrate", verbosity=0, interactive=False)


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        sys.stderr.write(USAGE)
        if argv and argv[0] not in ("-h", "--help"):
            sys.stderr.write(f"approx: error: unknown subcommand {argv[0]!r}\n")
            return EXIT_INVALID
        return 0 if argv else EXIT_INVALID
    _setup()
    from django.core.management import execute_from_command_line

    try:
        execute_from_command_line(["approx", *argv])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    return 0
