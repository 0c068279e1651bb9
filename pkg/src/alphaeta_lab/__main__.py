"""
Main entry point for running as module.

Usage:
    python -m alphaeta_lab [args]
"""

from .cli import main

if __name__ == "__main__":
    main()
