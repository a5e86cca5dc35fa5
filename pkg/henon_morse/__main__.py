"""Allow ``python -m henon_morse``."""

from .cli import run

run()
