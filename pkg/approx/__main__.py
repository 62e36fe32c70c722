import sys

from approx.cli import run

if __name__ == "__main__":
    sys.exit(run())
