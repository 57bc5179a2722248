"""
Checks that the version in setup.py, modtv.__version__ and the CLI's --version output agree.
Prints the versions found and exits with 1 when they differ.
"""

import contextlib
import io
import re
import sys

import modtv
from modtv.cli import build_parser


def setup_version(path="setup.py"):
    with open(path) as setup:
        for line in setup:
            if line.startswith("__version__"):
                match = re.search('"(?P<version>[^"]*)"', line)
                if match:
                    return match.group("version")
    return ""


def cli_version():
    stream = io.StringIO()
    with contextlib.redirect_stdout(stream), contextlib.suppress(SystemExit):
        build_parser().parse_args(["--version"])
    return stream.getvalue().strip().rpartition(" ")[2]


versions = {
    "setup.py": setup_version(),
    "modtv.__version__": modtv.__version__,
    "modtv --version": cli_version(),
}

matching = len(set(versions.values())) == 1
print("Versions match" if matching else "Versions do not match")
for source, version in versions.items():
    print(f"  {version:<10} {source}")
sys.exit(0 if matching else 1)
