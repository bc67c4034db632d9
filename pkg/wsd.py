"""
Word Sense Disambiguation - Command-line entry point
Disambiguates unified-framework datasets against WordNet and scores the results.
"""

import os
import sys

# Add src to path
sys.path.insert(0, os.path.dirname(__file__))

from src.cli import main

if __name__ == '__main__':
    sys.exit(main())
