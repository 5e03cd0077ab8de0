from django.apps import AppConfig


class ControversyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'controversy'
    verbose_name = 'Concept controversiality'
