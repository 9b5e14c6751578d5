default_app_config = "nonlocaltransmission.apps.NonlocalTransmissionConfig"

__version__ = "0.1.0"
__title__ = "Nonlocal Transmission"
