import sys

from cubicurve.cli import main

sys.exit(main())
