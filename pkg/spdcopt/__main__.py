"""Allow `python -m spdcopt ...`"""

import sys

from spdcopt.main import main

if __name__ == "__main__":
    sys.exit(main())
