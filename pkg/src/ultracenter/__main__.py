"""
Entry point for running the ultracenter package as a module.
"""
import sys

from . import main

if __name__ == "__main__":
    sys.exit(main())
