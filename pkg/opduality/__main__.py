# -*- coding: utf-8 -*-
"""
opduality command-line entry point.

This allows running opduality as a module:
    python -m opduality --cmd verify-all
"""
import sys

from opduality.cli import main

if __name__ == '__main__':
    sys.exit(main())
