"""Shared numeric conventions and canonical JSON helpers.

All travel times are integers in scaled units (see the instance loader).
``INF`` is the sentinel for unreachable / unbounded; additions must go
through :func:`add_times` so the sentinel saturates instead of overflowing.
Exact rational arithmetic (parameters, caps, thresholds) uses
:class:`fractions.Fraction` end to end; floats only appear in reports.
"""

from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction
from typing import Any, Union

INF: int = 2 ** 62

Rational = Union[int, Fraction]


def is_inf(x: int) -> bool:
    return x >= INF


def add_times(a: int, b: int) -> int:
    """Saturating addition over the integer time domain."""
    if a >= INF or b >= INF:
        return INF
    return a + b


def round_half_up(q: Fraction) -> int:
    """Round to nearest integer, halves away from zero toward +inf."""
    return math.floor(q + Fraction(1, 2))


def floor_frac(q: Rational) -> int:
    return math.floor(q)


def ceil_frac(q: Rational) -> int:
    return math.ceil(q)


def to_fraction(x: Any) -> Fraction:
    """Exact rational from int, Fraction, str ("1/3", "0.35") or float.

    Floats go through repr so a literal like 0.35 means thirty-five
    hundredths, not its binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            raise ValueError("non-finite number")
        return Fraction(repr(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def frac_to_jsonable(q: Rational) -> Union[int, float]:
    """Lossy rendering for report payloads (exact ints stay ints)."""
    q = Fraction(q)
    if q.denominator == 1:
        return int(q)
    return float(q)


def canonical_json_bytes(doc: Any) -> bytes:
    """Stable byte form: sorted keys, no whitespace, UTF-8."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def content_id(doc: Any) -> str:
    """16-hex-char content address of a JSON-able document."""
    return hashlib.sha256(canonical_json_bytes(doc)).hexdigest()[:16]
