import sys

from quasimodular.cli import main

sys.exit(main())
