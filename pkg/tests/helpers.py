"""Shared fixtures-in-code for the test modules."""

from __future__ import annotations

import io as _io
import json
import time
from contextlib import contextmanager

from floerkit import cli
from floerkit.exactalg import GF, QQ

FIELDS = (GF(2), GF(3), QQ)


def run_cli(*argv) -> tuple[int, str, dict | None]:
    """Run the CLI in-process with --json; returns (code, stdout, parsed report)."""
    buf = _io.StringIO()
    code = cli.run(["--json", *map(str, argv)], stdout=buf)
    out = buf.getvalue()
    try:
        report = json.loads(out) if out.strip() else None
    except json.JSONDecodeError:
        report = None
    return code, out, report


@contextmanager
def timed(limit: float, what: str = ""):
    t = time.perf_counter()
    yield
    dt = time.perf_counter() - t
    assert dt < limit, f"{what} took {dt:.2f}s (limit {limit}s)"
