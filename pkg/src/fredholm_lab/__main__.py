import sys

from fredholm_lab.cli import main

sys.exit(main())
