"""Goal-driven risk assessment over AND/OR attack trees."""

from .model import DomainError

__version__ = "0.1.0"

__all__ = ["DomainError", "__version__"]
