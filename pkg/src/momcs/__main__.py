import sys

from momcs.cli.main import main

sys.exit(main())
