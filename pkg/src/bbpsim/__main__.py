#! /usr/bin/env python3
"""
python -m bbpsim
Date: Mar 15, 2025
"""
# Standard Library Imports
import sys

# Local Imports
from bbpsim.cli import main

if __name__ == "__main__":
    sys.exit(main())
