# irlv/core/exceptions/__init__.py

from .base_exception import (
    IrlvException,
    ConfigException,
    DataException,
)
from .simulation_exceptions import (
    GeometryException,
    ChannelException,
    NumericException,
    TrainingDivergedException,
)

__all__ = [
    "IrlvException",
    "ConfigException",
    "DataException",

    "GeometryException",
    "ChannelException",
    "NumericException",
    "TrainingDivergedException",
]
