"""
ultracenter - centers of distances of finite ultrametric spaces.
"""
import sys
from typing import List, Optional

__version__ = "0.1.0"


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command-line interface."""
    # Import here to avoid circular imports
    from .cli import main as cli_main

    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
