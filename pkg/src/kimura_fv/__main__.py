"""Allow `python -m kimura_fv ...` as an alias for the kimura-fv script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
