import sys

from nswfair.cli import main

sys.exit(main())
