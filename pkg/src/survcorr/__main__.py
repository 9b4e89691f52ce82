import sys

from survcorr.cli import main

sys.exit(main())
