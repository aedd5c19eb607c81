import sys

from kaleido.cli import main

sys.exit(main())
