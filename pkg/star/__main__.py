"""
Executado por `python -m star`.
"""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
