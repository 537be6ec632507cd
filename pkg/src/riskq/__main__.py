import sys

from riskq.cli import main

sys.exit(main())
