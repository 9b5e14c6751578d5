from django.apps import AppConfig

from . import __version__


class NonlocalTransmissionConfig(AppConfig):
    name = "nonlocaltransmission"
    label = "nonlocaltransmission"
    verbose_name = f"Nonlocal Transmission v{__version__}"
