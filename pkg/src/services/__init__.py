"""Services: configuration, validation, inverter discovery and file formats."""

from . import config_manager  # re-export
from . import data_io

__all__ = ["config_manager", "data_io"]
