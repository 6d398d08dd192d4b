"""``python -m effmealy``."""

import sys

from .cli import main

sys.exit(main())
