"""
Entry point for the flt-verify command
"""

import sys
from typing import Optional, Sequence

from .cli import run
from .constants import EXIT_CROSS_CHECK, EXIT_RESOURCE, EXIT_USAGE
from .errors import CrossCheckError, PrecisionExhaustedError, UnsupportedError


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Run one command and exit with 0 (ok), 1 (usage), 2 (cross-check) or 3 (resource)"""
    try:
        code = run(argv)
    except CrossCheckError as e:
        print(f"Error: cross-check failed {e}", file=sys.stderr)
        sys.exit(EXIT_CROSS_CHECK)
    except (UnsupportedError, PrecisionExhaustedError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_RESOURCE)
    except (ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    sys.exit(code)


if __name__ == "__main__":
    main()
