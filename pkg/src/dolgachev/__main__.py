import sys

from dolgachev.cli import main

sys.exit(main())
