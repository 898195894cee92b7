"""
python -m chernloc entry point.
"""

import sys

from chernloc.cli import main

sys.exit(main())
