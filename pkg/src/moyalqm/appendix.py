"""Literal closed-form tables a0..a7 for the first-order Henon-Heiles state.

Every entry is ``(coefficient(nx, ny), dx, dy)`` and stands for
``coefficient * psi_{nx+dx} psi_{ny+dy}``.  The expressions are transcribed
verbatim, including the ones that disagree with direct perturbation theory;
the comparison lives in :func:`compare_with_generic`.  Factors that multiply a
single axis leave the other label unchanged.  Where a y-slot factor is
printed with an x label (``sqrt(ny(ny-1)) psi_{nx-2}`` in a4) it is read as
the y shift ``-2``.
"""
from __future__ import annotations

import math
from itertools import product

from .oscillator import FockLabel

r = math.sqrt


def _outer(xs, ys):
    """Expand ``(sum_x)(sum_y)`` into single terms."""
    return [
        (lambda nx, ny, fx=fx, fy=fy: fx(nx, ny) * fy(nx, ny), dx, dy)
        for (fx, dx, _), (fy, _, dy) in product(xs, ys)
    ]


def _x(c, f, dx):
    return (lambda nx, ny: c * f(nx), dx, 0)


def _y(c, f, dy):
    return (lambda nx, ny: c * f(ny), 0, dy)


A0 = _outer(
    [_x(1, lambda n: r(n * (n - 1)), -2), _x(-1, lambda n: r((n + 1) * (n + 2)), +2)],
    [_y(1, lambda n: r(n), -1), _y(-1, lambda n: r(n + 1), +1)],
)

A1 = [
    _y(1 / 3, lambda n: r(n * (n - 1) * (n - 2)), -3),
    _y(1, lambda n: r(n * (n + 1) ** 2) + r(n ** 3) + r(n * (n - 1) ** 2), -1),
    _y(-1, lambda n: r((n + 1) * (n + 2) ** 2) + r((n + 1) ** 3) + r(n ** 2 * (n + 1)), +1),
    _y(-1 / 3, lambda n: r((n + 1) * (n + 2) * (n + 3)), +3),
]

A2 = _outer(
    [
        _x(1 / 8, lambda n: r(n * (n - 1) * (n - 2) * (n - 3)), -4),
        _x(1 / 4, lambda n: r(n * (n + 1) ** 2 * (n - 1)), -2),
        _x(1 / 4, lambda n: r(n ** 3 * (n + 1)), -2),
    ],
    [_y(1, lambda n: r(n * (n - 1)), -2)],
) + _outer(
    [_x(1, lambda n: r(n * (n - 1)), -2)],
    [
        _y(1 / 8, lambda n: r(n * (n - 1) * (n - 2) * (n - 3)), -4),
        _y(1 / 4, lambda n: r(n * (n + 1) ** 2 * (n - 1)), -2),
        _y(1 / 4, lambda n: r(n ** 3 * (n - 1)), -2),
    ],
)

A3 = (
    _outer(
        [_x(1, lambda n: r(n * (n - 1)), -2)],
        [
            _y(1 / 4, lambda n: r(n * (n - 1) ** 3), -2),
            _y(-1 / 4, lambda n: r((n + 1) * (n + 2) * (n + 3) ** 2), +2),
            _y(1 / 4, lambda n: r(n * (n - 1) * (n - 2) ** 2), -2),
            _y(-1 / 4, lambda n: r((n + 1) * (n + 2) ** 3), -2),
        ],
    )
    + _outer(
        [
            _x(-1 / 8, lambda n: r(n * (n - 1) * (n - 2) * (n - 3)), -4),
            _x(-1 / 4, lambda n: r(n * (n - 1) * (n + 2) ** 2), -2),
            _x(-1 / 4, lambda n: r(n ** 3 * (n - 1)), -2),
        ],
        [_y(1, lambda n: r((n + 1) + (n + 2)), +2)],
    )
    + _outer(
        [_x(1, lambda n: r(n * (n - 1)), -2)],
        [
            _y(-1 / 4, lambda n: r((n + 1) ** 3 * (n + 2)), +2),
            _y(-1 / 4, lambda n: r(n ** 2 * (n + 1) * (n + 2)), +2),
            _y(-1 / 8, lambda n: r((n + 1) * (n + 2) * (n + 3) * (n + 4)), +4),
        ],
    )
)

_low_y = [_y(1, lambda n: r(n * (n - 1)), -2)]
_high_y = [_y(1, lambda n: r((n + 1) * (n + 2)), +2)]

A4 = (
    _outer(
        [_x(1 / 4, lambda n: r(n * (n - 1) ** 3), -2), _x(-1 / 4, lambda n: r((n + 1) * (n + 2) * (n + 3) ** 2), +2)],
        _low_y,
    )
    + _outer(
        [_x(-1 / 4, lambda n: r(n * (n - 1) ** 3), -2), _x(1 / 4, lambda n: r((n + 1) * (n + 2) * (n + 3) ** 2), +2)],
        _high_y,
    )
    + _outer(
        [_x(1 / 4, lambda n: r(n * (n - 1) * (n - 2) ** 2), -2), _x(-1 / 4, lambda n: r((n + 1) * (n + 2) ** 3), +2)],
        _low_y,
    )
    + _outer(
        [_x(-1 / 4, lambda n: r(n * (n - 1) * (n - 2) ** 2), -2), _x(1 / 4, lambda n: r((n + 1) * (n + 2) ** 3), +2)],
        _high_y,
    )
    + _outer(
        [
            _x(-1 / 4, lambda n: r((n + 1) ** 3 * (n + 2)), +2),
            _x(-1 / 4, lambda n: r(n ** 2 * (n + 1) * (n + 2)), +2),
            _x(-1 / 8, lambda n: r((n + 1) * (n + 2) * (n + 3) * (n + 4)), +4),
        ],
        _low_y,
    )
)

A5 = _outer(
    [_x(1, lambda n: r((n + 1) * (n + 2)), +2)],
    [
        _y(-1 / 8, lambda n: r(n * (n - 1) * (n - 2) * (n - 3)), -4),
        _y(-1 / 4, lambda n: r(n * (n - 1) * (n + 1) ** 2), -2),
        _y(-1 / 4, lambda n: r(n ** 3 * (n - 1)), -2),
        _y(-1 / 4, lambda n: r(n * (n - 1) ** 3), -2),
        _y(1 / 4, lambda n: r((n + 1) * (n + 2) * (n + 3) ** 2), +2),
        _y(-1 / 4, lambda n: r(n * (n - 1) * (n - 2) ** 2), -2),
        _y(1 / 4, lambda n: r((n + 1) * (n + 2) ** 3), +2),
    ],
)

A6 = _outer(
    [
        _x(1 / 4, lambda n: r((n + 1) ** 3 * (n + 2)), +2),
        _x(1 / 4, lambda n: r(n ** 2 * (n + 1) * (n + 2)), +2),
        _x(1 / 8, lambda n: r((n + 1) * (n + 2) * (n + 3) * (n + 4)), +4),
    ],
    _high_y,
) + _outer(
    [_x(1, lambda n: r((n + 1) * (n + 2)), +2)],
    [
        _y(1 / 4, lambda n: r((n + 1) ** 3 * (n + 2)), +2),
        _y(1 / 4, lambda n: r(n ** 2 * (n + 1) * (n + 2)), +2),
        _y(1 / 8, lambda n: r((n + 1) * (n + 2) * (n + 3) * (n + 4)), +4),
    ],
)

A7 = [
    _x(1 / 2, lambda n: r(n * (n - 1)), -2),
    _x(-1 / 2, lambda n: r((n + 1) * (n + 2)), +2),
    _y(1 / 2, lambda n: r(n * (n - 1)), -2),
    _y(-1 / 2, lambda n: r((n + 1) * (n + 2)), +2),
]

TABLES = {"a0": A0, "a1": A1, "a2": A2, "a3": A3, "a4": A4, "a5": A5, "a6": A6, "a7": A7}


def weights(epsilon: float) -> dict:
    """Prefactors of the assembly ``a0/(4 sqrt2) - a1/(6 sqrt2) + 5/16 (a2..a6) - eps/2 a7``."""
    w = {"a0": 1 / (4 * math.sqrt(2)), "a1": -1 / (6 * math.sqrt(2)), "a7": -epsilon / 2}
    for k in ("a2", "a3", "a4", "a5", "a6"):
        w[k] = 5 / 16
    return w


def evaluate_table(name: str, n: FockLabel) -> dict:
    """``{label: coefficient}`` for one table at base label ``n``; negative labels are dropped."""
    out: dict = {}
    for f, dx, dy in TABLES[name]:
        mx, my = n.nx + dx, n.ny + dy
        if mx < 0 or my < 0:
            continue
        c = f(n.nx, n.ny)
        if c != 0:
            m = FockLabel(mx, my)
            out[m] = out.get(m, 0.0) + c
    return out


def assemble(n: FockLabel, epsilon: float) -> dict:
    out: dict = {}
    for name, w in weights(epsilon).items():
        for m, c in evaluate_table(name, n).items():
            out[m] = out.get(m, 0.0) + w * c
    return {m: c for m, c in out.items() if c != 0}
