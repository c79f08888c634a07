"""Allow running as `python -m exactdom`."""

from .main import main

main()
