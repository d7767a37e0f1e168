import sys

from nc_concentration.src.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
