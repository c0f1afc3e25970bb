"""Command-line front end: ``setreg generate | register | eval | sweep``."""

from .main import build_parser, main

__all__ = ["build_parser", "main"]
