"""``python -m submax`` entry point."""

from .cli import console_main

console_main()
