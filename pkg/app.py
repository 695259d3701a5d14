import sys

from certilab.cli import CertiLab, main

__all__ = ["CertiLab", "main"]

if __name__ == "__main__":
    sys.exit(main())
