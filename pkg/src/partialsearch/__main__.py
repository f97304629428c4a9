import sys

from partialsearch.cli import main

sys.exit(main())
