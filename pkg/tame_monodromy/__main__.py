import sys

from tame_monodromy._cli import main

sys.exit(main())
