"""Allow ``python -m quote_first_pipeline``."""
import sys

from quote_first_pipeline.cli import main

sys.exit(main())
