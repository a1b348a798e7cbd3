import sys

from permcodes.cli import main

sys.exit(main())
