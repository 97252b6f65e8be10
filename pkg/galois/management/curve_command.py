"""Shared plumbing for the curve management commands."""

import json
import logging
import sys

from django.core.management.base import BaseCommand, CommandError

from galois.curves import parse_curve_spec
from galois.exceptions import (
    CurveParseError,
    DataIntegrityError,
    GaloisImageError,
    LMFDBUnavailable,
    OutOfScope,
    VerificationError,
)
from galois.lmfdb import curve_from_label

logger = logging.getLogger(__name__)

EXIT_INTERNAL = 1
EXIT_OUT_OF_SCOPE = 2
EXIT_USAGE = 64
EXIT_UNAVAILABLE = 69

VERBOSITY_LEVELS = {2: logging.INFO, 3: logging.DEBUG}


def configure_verbosity(verbosity):
    level = VERBOSITY_LEVELS.get(verbosity)
    if level is not None:
        logging.getLogger('galois').setLevel(level)


def dump_json(payload):
    return json.dumps(payload, sort_keys=True)


class UsageExitMixin:
    """Argument errors exit with EXIT_USAGE instead of argparse's 2."""

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)

        def error(message):
            if parser.called_from_command_line:
                parser.print_usage(sys.stderr)
                parser.exit(EXIT_USAGE, f"{parser.prog}: error: {message}\n")
            raise CommandError(f"Error: {message}", returncode=EXIT_USAGE)

        parser.error = error
        return parser


class CurveCommand(UsageExitMixin, BaseCommand):
    """Base class for commands taking one curve by model or label."""

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--curve', help='Long Weierstrass model "[a1,a2,a3,a4,a6]"')
        source.add_argument('--short', help='Short Weierstrass model "[A,B]"')
        source.add_argument('--label', help='LMFDB curve label, e.g. 441.c2')
        parser.add_argument('--json', action='store_true', help='Print machine-readable JSON')
        parser.add_argument('--no-network', action='store_true', help='Never contact the LMFDB')
        parser.add_argument('--cache', help='Directory of cached LMFDB records')

    def resolve_curve(self, options):
        """(WeierstrassCurve, label or None) from the command options."""
        if options.get('curve'):
            return parse_curve_spec(options['curve'], kind='long'), None
        if options.get('short'):
            return parse_curve_spec(options['short'], kind='short'), None
        network = False if options.get('no_network') else None
        return curve_from_label(options['label'], cache_dir=options.get('cache'), network=network)

    def handle(self, *args, **options):
        configure_verbosity(options.get('verbosity', 1))
        try:
            return self.run(options)
        except CurveParseError as e:
            raise CommandError(str(e), returncode=EXIT_USAGE)
        except OutOfScope as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=EXIT_OUT_OF_SCOPE)
        except LMFDBUnavailable as e:
            raise CommandError(str(e), returncode=EXIT_UNAVAILABLE)
        except (VerificationError, DataIntegrityError) as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=EXIT_INTERNAL)
        except GaloisImageError as e:
            logger.exception(f"Unexpected failure: {e}")
            raise CommandError(f"{type(e).__name__}: {e}", returncode=EXIT_INTERNAL)

    def run(self, options):
        raise NotImplementedError
