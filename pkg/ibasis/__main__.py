import sys

from ibasis.cli import main

sys.exit(main())
