import sys

from polyconsensus.cli import main

sys.exit(main())
