import sys

from radiozone.cli import main

sys.exit(main())
