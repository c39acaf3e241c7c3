"""Allow `python -m zpd`."""

import sys

from zpd.cli import main

sys.exit(main())
