"""Rewrite tests/golden/*.out from the current CLI.  Run by hand only."""

import io
import pathlib

from cli_cases import GOLDEN_CASES
from krasfix.cli import main

GOLDEN = pathlib.Path(__file__).parent / "golden"

if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for name, (argv, code) in GOLDEN_CASES.items():
        buf = io.StringIO()
        assert main(argv, out=buf) == code, name
        (GOLDEN / f"{name}.out").write_text(buf.getvalue())
        print("wrote", name)
