"""Various utility functions."""
from mixfb.utils import io

__all__ = ["io"]
