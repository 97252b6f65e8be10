from galois.adelic import adelic_image, levels_of_definition
from galois.management.curve_command import CurveCommand, dump_json


class Command(CurveCommand):
    help = 'Prints the minimal level of definition of the adelic image'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--all-levels', action='store_true',
            help='Also list every divisor of the level at which the image is defined',
        )

    def run(self, options):
        curve, label = self.resolve_curve(options)
        result = adelic_image(curve, label=label)
        payload = {'level': result.level, 'minimal_level': result.minimal_level}
        if options['all_levels']:
            payload['levels_of_definition'] = levels_of_definition(result)
        if label:
            payload['label'] = label

        if options['json']:
            self.stdout.write(dump_json(payload))
            return
        self.stdout.write(str(result.minimal_level))
        if options['all_levels']:
            self.stdout.write('Levels of definition: ' + ', '.join(str(d) for d in payload['levels_of_definition']))
