"""Serialization helpers shared by the CLI and the HTTP service.

All JSON artifacts go through :func:`dumps` so that the two interfaces
produce byte-identical documents for identical inputs. Floats are written
with Python's shortest round-trip repr, which is lossless for IEEE doubles
(never more than 17 significant digits).
"""

from __future__ import annotations

import json
import os
import tempfile


def dumps(payload) -> str:
    """Canonical JSON used for every artifact and every HTTP response."""
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def fmt_float(x: float) -> str:
    """Lossless decimal form of a float, as used in CSV artifacts."""
    return repr(float(x))


def write_text_atomic(path: str, text: str) -> None:
    """Write text via a temp file + rename so readers never see partial output."""
    _write_atomic(path, text.encode("utf-8"))


def write_bytes_atomic(path: str, data: bytes) -> None:
    _write_atomic(path, data)


def _write_atomic(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
