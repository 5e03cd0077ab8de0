"""
Access to toolkit settings.

Values come from ``settings.CONTROVERSY`` with the built-in defaults below
filling any key the project does not set.
"""

from django.conf import settings


DEFAULTS = {
    'MASK_TOKEN': '[MASK]',
    'MIN_LEN': 10,
    'MAX_LEN': 70,
    'MIN_MENTIONS': 0,
    'RADIUS': 0.3,
    'FALLBACK_SCORE': 0.5,
    'ALPHA': 1.0,
    'SKIP_OOV': True,
    'K': 10,
    'MIN_DF': 5,
    'POSITIVE_THRESHOLD': 6,
    'SEED': 0,
}


def get_setting(name):
    """
    Return the effective value of a toolkit setting

    Args:
        name: Setting name, e.g. 'RADIUS'

    Returns:
        The project override if present, otherwise the built-in default
    """
    overrides = getattr(settings, 'CONTROVERSY', {}) if settings.configured else {}
    if name in overrides:
        return overrides[name]
    return DEFAULTS[name]
