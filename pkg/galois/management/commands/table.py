from django.core.management.base import BaseCommand, CommandError

from galois.cmdata import all_simplest_curves, simplest_curves_for
from galois.exceptions import DataIntegrityError, DomainError
from galois.management.curve_command import (
    EXIT_INTERNAL,
    EXIT_USAGE,
    UsageExitMixin,
    configure_verbosity,
    dump_json,
)


class Command(UsageExitMixin, BaseCommand):
    help = 'Lists the embedded simplest CM curves'

    def add_arguments(self, parser):
        which = parser.add_mutually_exclusive_group(required=True)
        which.add_argument('--disc', type=int, help='Discriminant of the CM order, e.g. -7')
        which.add_argument('--all', action='store_true', help='List all 40 curves')
        parser.add_argument('--json', action='store_true', help='Print machine-readable JSON')

    def handle(self, *args, **options):
        configure_verbosity(options.get('verbosity', 1))
        try:
            records = all_simplest_curves() if options['all'] else simplest_curves_for(options['disc'])
        except DataIntegrityError as e:
            raise CommandError(f"DataIntegrityError: {e}", returncode=EXIT_INTERNAL)
        except DomainError as e:
            raise CommandError(str(e), returncode=EXIT_USAGE)

        if options['json']:
            self.stdout.write(dump_json([
                record.model_dump(mode='json', exclude={'ell_adic_gens', 'basis'}) for record in records
            ]))
            return
        for record in records:
            self.stdout.write(
                f"{record.label:<9} disc {record.disc:>5}  ell {record.ell:>3}  n {record.n}  "
                f"conductor {record.conductor:>5}  y^2 = x^3 + ({record.A})x + ({record.B})"
            )
