import logging
import os
import socket

from django.conf import settings
from django.test import SimpleTestCase, TestCase


class LoggerAddTag(logging.LoggerAdapter):
    """Logger adapter which puts a tag in front of every message."""

    def __init__(self, my_logger, prefix):
        super().__init__(my_logger, {})
        self.prefix = prefix

    def process(self, msg, kwargs):
        return "[%s] %s" % (self.prefix, msg), kwargs


logger = LoggerAddTag(logging.getLogger(__name__), __package__)


def make_logger_prefix(tag: str):
    """Create a function that prefixes texts with tag. Returns tag when called empty."""
    return lambda text="": "{}{}".format(tag, (": " + text) if text else "")


def clean_setting(
    name: str,
    default_value: object,
    min_value: float = None,
    max_value: float = None,
    required_type: type = None,
    choices: list = None,
):
    """Read a custom setting from Django settings and validate it.

    Falls back to `default_value` when the setting is missing, has the wrong
    type, lies outside [min_value, max_value] or is not one of `choices`.
    A `required_type` must be given when the default is `None`.
    Integer settings have a `min_value` of 0 unless specified otherwise.
    Floats are accepted for float settings given as integers.

    Returns the cleaned value.
    """
    if default_value is None and not required_type:
        raise ValueError("You must specify a required_type for None defaults")

    if not required_type:
        required_type = type(default_value)
    accepted_types = (int, float) if required_type is float else required_type

    if min_value is None and required_type == int:
        min_value = 0

    if not hasattr(settings, name):
        return default_value

    dirty_value = getattr(settings, name)
    if (
        isinstance(dirty_value, accepted_types)
        and not (required_type is int and isinstance(dirty_value, bool))
        and (min_value is None or dirty_value >= min_value)
        and (max_value is None or dirty_value <= max_value)
        and (choices is None or dirty_value in choices)
    ):
        return dirty_value

    logger.warning(
        "Your setting for %s is not valid. Please correct it. "
        "Using default for now: %s",
        name,
        default_value,
    )
    return default_value


def set_test_logger(logger_name: str, name: str) -> logging.Logger:
    """Send the log of a tested module to a file next to the test module.

    Args:
    - logger_name: name of the logger to redirect
    - name: path of the test module, e.g. __file__

    Returns:
    - the redirected logger
    """
    f_format = logging.Formatter(
        "%(asctime)s - %(levelname)s - %(module)s:%(funcName)s - %(message)s"
    )
    f_handler = logging.FileHandler("{}.log".format(os.path.splitext(name)[0]), "w+")
    f_handler.setFormatter(f_format)
    my_logger = logging.getLogger(logger_name)
    my_logger.level = logging.DEBUG
    my_logger.addHandler(f_handler)
    my_logger.propagate = False
    return my_logger


class SocketAccessError(Exception):
    pass


class _SocketGuard:
    @classmethod
    def setUpClass(cls):
        cls.socket_original = socket.socket
        socket.socket = cls.guard
        return super().setUpClass()

    @classmethod
    def tearDownClass(cls):
        socket.socket = cls.socket_original
        return super().tearDownClass()

    @staticmethod
    def guard(*args, **kwargs):
        raise SocketAccessError("Attempted to access network")


class NoSocketsTestCase(_SocketGuard, TestCase):
    """TestCase which fails any attempt to open a socket."""


class NoSocketsSimpleTestCase(_SocketGuard, SimpleTestCase):
    """SimpleTestCase which fails any attempt to open a socket."""
