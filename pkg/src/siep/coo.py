"""COO-SYM matrix text format.

First line ``n``; then one ``i j value`` line per stored entry with
``0 <= i <= j < n``. Omitted entries are zero. Values are written with
``repr`` so a write/read round trip is bit-exact.
"""
from pathlib import Path

import numpy as np

from .errors import FormatError
from .linalg import sym_matrix


def dumps(a):
    a = np.asarray(a)
    n = a.shape[0]
    lines = [str(n)]
    for i in range(n):
        for j in range(i, n):
            v = float(a[i, j])
            if v != 0.0 or np.signbit(v):
                lines.append(f"{i} {j} {v!r}")
    return "\n".join(lines) + "\n"


def loads(text):
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise FormatError("empty COO-SYM input")
    try:
        n = int(rows[0][0])
    except ValueError as exc:
        raise FormatError(f"bad order line {rows[0]!r}") from exc
    if len(rows[0]) != 1 or n < 1:
        raise FormatError(f"bad order line {rows[0]!r}")
    a = np.zeros((n, n))
    seen = set()
    for k, parts in enumerate(rows[1:], start=2):
        if len(parts) != 3:
            raise FormatError(f"line {k}: expected 'i j value'")
        try:
            i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise FormatError(f"line {k}: {exc}") from exc
        if not (0 <= i <= j < n):
            raise FormatError(f"line {k}: index ({i}, {j}) outside upper triangle of order {n}")
        if (i, j) in seen:
            raise FormatError(f"line {k}: duplicate entry ({i}, {j})")
        seen.add((i, j))
        a[i, j] = a[j, i] = v
    try:
        return sym_matrix(a)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def write(path, a):
    Path(path).write_text(dumps(a))


def read(path):
    return loads(Path(path).read_text())
