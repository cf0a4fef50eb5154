import sys

from hrgcover.cli import main

sys.exit(main())
