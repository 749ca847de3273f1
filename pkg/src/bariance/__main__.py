"""Module entry point: `python -m bariance`."""

import sys

from .cli import main

sys.exit(main())
