"""Unit-cost Levenshtein distance.

A compiled kernel is used when the optional extension built at install time
is importable; otherwise a pure-Python two-row dynamic program takes over.
`BACKEND` records which one is active so benchmarks and bug reports can say.
"""

from __future__ import annotations


def _levenshtein_py(s: str, t: str) -> int:
    if s == t:
        return 0
    m, n = len(s), len(t)
    if m == 0:
        return n
    if n == 0:
        return m
    # keep the row over the shorter string
    if m < n:
        s, t = t, s
        m, n = n, m
    row = list(range(n + 1))
    for i, sc in enumerate(s, 1):
        diag = row[0]
        row[0] = i
        for j, tc in enumerate(t, 1):
            tmp = row[j]
            sub = diag if sc == tc else diag + 1
            ins = row[j - 1] + 1
            if ins < sub:
                sub = ins
            if tmp + 1 < sub:
                sub = tmp + 1
            row[j] = sub
            diag = tmp
    return row[n]


try:
    from phishcode._speedups import levenshtein as _levenshtein_c

    BACKEND = "c"
except ImportError:  # pragma: no cover - depends on install toolchain
    _levenshtein_c = None
    BACKEND = "python"


def levenshtein(s: str, t: str) -> int:
    """Minimum number of single-character edits turning `s` into `t`."""
    if _levenshtein_c is not None:
        return _levenshtein_c(s, t)
    return _levenshtein_py(s, t)
