import sys

from inflearn.scripts.cli import main

sys.exit(main())
