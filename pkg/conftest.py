"""Configure Django before pytest collects the galois test modules."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cmadelic.settings')
django.setup()
