import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'controversy_project.settings')
django.setup()
