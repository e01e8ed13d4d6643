"""
Entry point: python hermspde.py <command> CONFIG [options]
"""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
