"""Module entry point: ``python -m molfluor ...``."""

import sys

from .cli import main

sys.exit(main())
