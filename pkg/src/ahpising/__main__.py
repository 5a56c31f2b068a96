import sys

from ahpising.cli import main

sys.exit(main())
