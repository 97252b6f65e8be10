from galois.adelic import adelic_image
from galois.management.curve_command import CurveCommand, dump_json


def format_matrix(entries):
    a, b, c, d = entries
    return f"({a},{b};{c},{d})"


class Command(CurveCommand):
    help = 'Computes the adelic Galois image of a CM elliptic curve over Q'

    def run(self, options):
        curve, label = self.resolve_curve(options)
        result = adelic_image(curve, label=label)
        if options['json']:
            self.stdout.write(dump_json(result.to_payload()))
            return

        cm = result.cm
        twist = result.twist
        self.stdout.write(f"Curve: {label or curve}")
        self.stdout.write(f"CM order: disc {cm.disc} (Delta_K {cm.Delta_K}, f {cm.f}), j = {cm.j}")
        self.stdout.write(f"(delta, phi) = ({result.params.delta}, {result.params.phi})")
        if result.is_simplest:
            self.stdout.write(f"Simplest curve {twist.simplest_label}")
        else:
            self.stdout.write(f"Twist of {twist.simplest_label} by N = {twist.N} (N-dagger {twist.N_dagger})")
        self.stdout.write(self.style.SUCCESS(
            f"Level {result.level}, index {result.index}, minimal level {result.minimal_level}"
        ))
        self.stdout.write('Generators: ' + ', '.join(format_matrix(g) for g in result.generators))
