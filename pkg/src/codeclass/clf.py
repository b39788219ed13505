"""Plain-text code list files.

Layout::

    CLF 1 q=3
    # free comment lines start with '#'
    code n=4 k=2
    1011
    0112

    code n=4 k=2
    ...

The header line comes first (comments may precede it).  Every record is a
``code n=<n> k=<k>`` line followed by exactly ``k`` rows of ``n`` digits;
records are separated by blank lines.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .code import LinearCode, RankDeficientError

__all__ = ["CLFError", "CodeList", "parse_clf", "read_clf", "format_clf", "write_clf"]

VERSION = 1
_HEADER = re.compile(r"^CLF\s+(\d+)\s+q=(\d+)\s*$")
_RECORD = re.compile(r"^code\s+n=(\d+)\s+k=(\d+)\s*$")


class CLFError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class CodeList:
    q: int
    codes: list[LinearCode] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)


def parse_clf(text: str) -> CodeList:
    lines = text.splitlines()
    q = None
    out: CodeList | None = None
    i = 0
    while i < len(lines):
        raw = lines[i]
        s = raw.strip()
        lineno = i + 1
        i += 1
        if not s:
            continue
        if s.startswith("#"):
            if out is not None:
                out.comments.append(s[1:].strip())
            continue
        if q is None:
            m = _HEADER.match(s)
            if not m:
                raise CLFError("expected header 'CLF <version> q=<q>'", lineno)
            if int(m.group(1)) != VERSION:
                raise CLFError(f"unsupported format version {m.group(1)}", lineno)
            q = int(m.group(2))
            if q not in (2, 3, 4):
                raise CLFError(f"unsupported field order {q}", lineno)
            out = CodeList(q)
            continue
        m = _RECORD.match(s)
        if not m:
            raise CLFError(f"expected 'code n=<n> k=<k>', got {s!r}", lineno)
        n, k = int(m.group(1)), int(m.group(2))
        if k < 1 or n < k:
            raise CLFError(f"invalid parameters n={n}, k={k}", lineno)
        rows = []
        for _ in range(k):
            if i >= len(lines):
                raise CLFError("record ends early", i)
            row = lines[i].strip()
            i += 1
            if len(row) != n or any(ch not in "0123"[:q] for ch in row):
                raise CLFError(f"bad matrix row {row!r}", i)
            rows.append([int(ch) for ch in row])
        try:
            out.codes.append(LinearCode(np.array(rows, dtype=np.uint8), q))
        except RankDeficientError as exc:
            raise CLFError(str(exc), lineno) from None
    if out is None:
        raise CLFError("missing header", len(lines) or 1)
    return out


def read_clf(path: str | os.PathLike) -> CodeList:
    return parse_clf(Path(path).read_text())


def format_clf(q: int, codes: Iterable[LinearCode], comments: Iterable[str] = ()) -> str:
    parts = [f"CLF {VERSION} q={q}"]
    parts += [f"# {c}" for c in comments]
    body = []
    for c in codes:
        if c.q != q:
            raise ValueError("code over a different field")
        body.append("\n".join([f"code n={c.n} k={c.k}", *c.rows_as_strings()]))
    text = "\n".join(parts) + "\n"
    if body:
        text += "\n" + "\n\n".join(body) + "\n"
    return text


def write_clf(path: str | os.PathLike, q: int, codes: Iterable[LinearCode], comments: Iterable[str] = ()) -> None:
    """Write atomically (temporary file plus rename)."""
    path = Path(path)
    text = format_clf(q, codes, comments)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=".tmp-", suffix=".clf")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
