"""Bessel functions of the first kind at integer order.

Downward (Miller) recurrence with series normalization: recur
J_{k-1} = (2k/t) J_k - J_{k+1} from a start order high enough that
J_start is negligible, then scale using J_0 + 2*sum J_{2k} = 1.
"""

from __future__ import annotations

import math

MAX_ORDER = 512
MAX_ARG = 1024.0
_RESCALE = 1e250


def bessel_j(order: int, t: float) -> float:
    """J_order(t) accurate to about 1e-10 for |order| <= 512 and
    0 <= t <= 1024; J_{-y} = (-1)^y J_y."""
    if abs(order) > MAX_ORDER:
        raise ValueError(f"order {order} outside supported range [-{MAX_ORDER}, {MAX_ORDER}]")
    if not (0.0 <= t <= MAX_ARG):
        raise ValueError(f"argument {t} outside supported range [0, {MAX_ARG}]")
    y = abs(order)
    sign = -1.0 if (order < 0 and y % 2 == 1) else 1.0
    if t == 0.0:
        return sign * (1.0 if y == 0 else 0.0)

    # start far enough above both the order and the turning point t
    start = int(max(y, math.ceil(t)) + 16.0 * t ** (1.0 / 3.0) + 40)
    if start % 2 == 1:
        start += 1

    jp = 0.0  # J_{k+1}
    jc = 1e-300  # J_k seed; absolute scale fixed by normalization
    target = 0.0
    norm = 0.0
    for k in range(start, 0, -1):
        jm = (2.0 * k / t) * jc - jp
        jp = jc
        jc = jm
        if k - 1 == y:
            target = jc
        if (k - 1) % 2 == 0:
            norm += 2.0 * jc
        if abs(jc) > _RESCALE:
            jc /= _RESCALE
            jp /= _RESCALE
            target /= _RESCALE
            norm /= _RESCALE
    norm -= jc  # the k=0 term enters the sum once, not twice
    return sign * (target / norm)
