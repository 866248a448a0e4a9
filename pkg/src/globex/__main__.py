import sys

from globex.cli import main

sys.exit(main())
