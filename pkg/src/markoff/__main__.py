import sys

from markoff.cli import main

sys.exit(main())
