"""Size caps shared by every exhaustive routine.

Exceeding a cap raises :class:`defrep.errors.CapExceeded`; nothing is ever
silently truncated.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Caps:
    ring: int = 5**6  # elements of a coefficient ring
    group: int = 200  # group order
    congruence: int = 10**6  # |G_A| = |1 + m_A M_n(A)|
    dimension: int = 4  # matrix size n
    search: int = 2 * 10**6  # candidate tuples in an exhaustive lift search


_current = Caps()


def get_caps() -> Caps:
    return _current


def set_caps(**kwargs) -> Caps:
    global _current
    _current = replace(_current, **kwargs)
    return _current


@contextmanager
def caps(**kwargs):
    global _current
    saved = _current
    _current = replace(_current, **kwargs)
    try:
        yield _current
    finally:
        _current = saved
