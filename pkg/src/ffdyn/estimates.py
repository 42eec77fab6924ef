"""Finite-window growth-rate estimators shared by degree and height sequences.

All estimators work on positive integer sequences ``v_k``.  Two series are
produced: the root series ``v_k^(1/k)`` and the ratio series
``v_k / v_(k-1)``; both are clamped below at 1 because the growth rates they
estimate are always >= 1.  The *tail window* of a series is its second half.
"""

import math
from fractions import Fraction


def root_series(values, start=0):
    """``v_k^(1/k)`` for every ``k >= 1``; ``values[0]`` has index ``start``."""
    out = []
    for k, v in enumerate(values, start):
        if k < 1:
            continue
        out.append(max(1.0, math.exp(math.log(v) / k)) if v > 0 else 1.0)
    return out


def ratio_series(values):
    return [max(1.0, float(Fraction(b, a))) for a, b in zip(values, values[1:])]


def tail(xs):
    return list(xs[len(xs) // 2:])


def geometric_ratio(values):
    """Exact common ratio if the tail window is geometric, else None.

    The tail must hold at least three terms; shorter sequences are tested as
    a whole.  A decreasing ratio is not reported (it cannot persist for
    positive integers).
    """
    window = tail(values)
    if len(window) < 3:
        window = list(values)
    if len(window) < 3:
        return None
    if any(b * b != a * c for a, b, c in zip(window, window[1:], window[2:])):
        return None
    r = Fraction(window[1], window[0])
    return r if r >= 1 else None


def eventual_period(values):
    """Smallest period ``p`` repeating at least twice and covering the tail.

    Returns ``(preperiod, p)`` or None.
    """
    L = len(values)
    for p in range(1, L // 2 + 1):
        pre = 0
        for k in range(L - p - 1, -1, -1):
            if values[k] != values[k + p]:
                pre = k + 1
                break
        if pre <= L // 2 and L - pre >= 2 * p:
            return pre, p
    return None


def window_bounds(series):
    w = tail(series)
    if not w:
        return None, None
    return max(w), min(w)
