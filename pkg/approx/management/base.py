"""Shared plumbing for the approx subcommands.

A subcommand validates its configuration, runs, digests what it wrote and
leaves a RunRecord behind; saving the record writes the manifest next to
the primary output.
"""

import hashlib
import json
import logging
import sys
import time
from functools import partial
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError, CommandParser
from rest_framework.exceptions import ValidationError

from approx import __version__
from approx.exceptions import EXIT_INVALID, ApproxError, FormatError
from approx.models import RunRecord

logger = logging.getLogger(__name__)

DJANGO_OPTIONS = {
    "verbosity", "settings", "pythonpath", "traceback", "no_color",
    "force_color", "skip_checks", "stdout", "stderr", "config", "action",
}


class UsageParser(CommandParser):
    """Parse errors exit with status 1 and the usage line."""

    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=EXIT_INVALID)


def sha256_of(path):
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def load_config_file(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(path, 0, "file", exc.strerror or str(exc)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(path, exc.lineno, "json", exc.msg) from None
    if not isinstance(data, dict):
        raise FormatError(path, 1, "json", "top level must be an object")
    return data


def flatten_errors(detail, prefix=""):
    if isinstance(detail, dict):
        parts = [flatten_errors(v, f"{prefix}{k}: ") for k, v in detail.items()]
        return "; ".join(parts)
    if isinstance(detail, list):
        return "; ".join(flatten_errors(v, prefix) for v in detail)
    return f"{prefix}{detail}"


def parse_list(text, cast=float):
    return [cast(v) for v in str(text).split(",") if v.strip()]


class ApproxCommand(BaseCommand):
    name = None
    serializer_class = None
    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(UsageParser.error, parser)
        return parser

    def add_action_parsers(self, parser, actions):
        subparsers = parser.add_subparsers(dest="action", required=True, parser_class=UsageParser)
        return {action: subparsers.add_parser(action) for action in actions}

    def add_common_arguments(self, parser, seeded=False):
        parser.add_argument("--config", help="JSON file with configuration keys; flags override it")
        parser.add_argument("--out", help="primary output file")
        if seeded:
            parser.add_argument("--seed", type=int, help="64-bit seed for random draws")

    # configuration

    def load_config(self, options):
        raw = {}
        if options.get("config"):
            raw.update(load_config_file(options["config"]))
        for key, value in options.items():
            if key not in DJANGO_OPTIONS and value is not None:
                raw[key] = value
        if options.get("action"):
            raw["action"] = options["action"]
        serializer = self.serializer_class(data=raw)
        serializer.is_valid(raise_exception=True)
        return dict(serializer.validated_data)

    def output_path(self, config, suffix=".txt"):
        if config.get("out"):
            path = Path(config["out"])
        else:
            stem = "-".join(p for p in (self.name, config.get("action")) if p)
            path = Path(settings.APPROX["OUTPUT_DIR"]) / f"{stem}{suffix}"
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    # execution

    def execute_run(self, config, out):
        """Compute and write outputs, registering each file with `written`."""
        raise NotImplementedError

    def written(self, path):
        self.outputs.append(Path(path))
        return path

    def handle(self, *args, **options):
        started = time.perf_counter()
        record = RunRecord(subcommand=self.name, action=options.get("action") or "", tool_version=__version__)
        self.record = record
        self.outputs = []
        try:
            config = self.load_config(options)
            record.config = json.loads(json.dumps(config, default=str))
            record.seed = "" if config.get("seed") is None else str(config["seed"])
            out = self.output_path(config)
            record.manifest_path = f"{out}.manifest.json"
            self.execute_run(config, out)
        except ValidationError as exc:
            record.exit_status = EXIT_INVALID
            record.message = flatten_errors(exc.detail)
        except ApproxError as exc:
            record.exit_status = exc.exit_code
            record.message = str(exc)
        except Exception:
            logger.exception("%s failed", self.name)
            raise
        finally:
            record.wall_time = time.perf_counter() - started

        if not record.manifest_path:
            stem = "-".join(p for p in (self.name, record.action) if p)
            record.manifest_path = str(Path(settings.APPROX["OUTPUT_DIR"]) / f"{stem}.manifest.json")
        record.outputs = {str(p): sha256_of(p) for p in self.outputs if p.is_file()}
        record.save()
        logger.info("%s %s: exit %d in %.3fs", self.name, record.action, record.exit_status, record.wall_time)
        if record.exit_status:
            raise CommandError(record.message, returncode=record.exit_status)
