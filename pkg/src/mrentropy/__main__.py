import sys

from mrentropy.cli import main

sys.exit(main())
