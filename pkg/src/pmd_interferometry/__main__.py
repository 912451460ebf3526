# Standard imports
import sys
# Local imports
from .cli import main

sys.exit(main())
