from galois.adelic import adelic_image
from galois.exceptions import VerificationError
from galois.management.curve_command import CurveCommand, dump_json
from galois.verify import determinant_check, entanglement_check, frobenius_consistency, prime_support_check


class Command(CurveCommand):
    help = 'Checks a computed image against Frobenius traces and its expected entanglement'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--primes', type=int, help='Check every good prime up to this bound')

    def run(self, options):
        curve, label = self.resolve_curve(options)
        result = adelic_image(curve, label=label)
        reports = {}
        try:
            reports['frobenius'] = frobenius_consistency(curve, result, prime_bound=options['primes'])
            reports['entanglement'] = entanglement_check(curve, result.twist, result)
            reports['determinant'] = determinant_check(result)
            reports['prime_support'] = prime_support_check(result)
        except VerificationError as e:
            if e.report is not None:
                self.stdout.write(dump_json({'failed': e.report.model_dump(mode='json')}))
            raise

        if options['json']:
            payload = result.to_payload()
            payload['verify'] = {name: report.model_dump(mode='json') for name, report in reports.items()}
            self.stdout.write(dump_json(payload))
            return

        frobenius = reports['frobenius']
        self.stdout.write(
            f"Frobenius: {frobenius.primes_checked} primes up to {frobenius.prime_bound} agree mod "
            f"{frobenius.level}; {frobenius.classes_hit}/{frobenius.classes_total} trace/det classes hit"
        )
        entanglement = reports['entanglement']
        if entanglement.skipped:
            self.stdout.write('Entanglement: skipped for a simplest curve')
        else:
            pattern = ', '.join(str(i) for i in entanglement.pattern)
            self.stdout.write(
                f"Entanglement: Cartan indices ({pattern}) at "
                f"({entanglement.level}, {entanglement.ell_level}, {entanglement.dagger_level})"
            )
        self.stdout.write(f"Determinant: surjective mod {result.level}")
        self.stdout.write(
            f"Primes of the level: {list(reports['prime_support'].level_primes)} "
            f"(minimal level {result.minimal_level})"
        )
        self.stdout.write(self.style.SUCCESS('All checks passed'))
