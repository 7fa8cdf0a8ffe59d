"""Small-register density-matrix tools for contextuality, Leggett-Garg and discord calculations."""

from .report import VERSION as __version__  # noqa: F401
