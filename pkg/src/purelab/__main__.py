import sys

from purelab.cli import main

sys.exit(main())
