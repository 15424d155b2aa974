"""Dense exact simplex for ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``.

The slack basis is feasible from the start, so no phase one is needed. All
arithmetic is on ``gmpy2.mpq``; results come back as ``fractions.Fraction``.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq


class Unbounded(ArithmeticError):
    pass


@dataclass(frozen=True)
class SimplexResult:
    value: Fraction
    x: tuple[Fraction, ...]
    duals: tuple[Fraction, ...]
    pivots: int


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def maximize(
    c: Sequence,
    rows: Sequence[Mapping[int, object]],
    b: Sequence,
    *,
    bland_after: int = 50,
) -> SimplexResult:
    """Solve the LP; ``rows`` are sparse ``{column: coefficient}`` maps.

    Dantzig pricing, switching to Bland's rule after ``bland_after``
    consecutive degenerate pivots, which rules out cycling.
    """
    nv, m = len(c), len(rows)
    width = nv + m
    zero = mpq(0)
    tab: list[list] = []
    rhs: list = []
    for i, (row, bi) in enumerate(zip(rows, b)):
        bi = mpq(bi)
        if bi < 0:
            raise ValueError("right-hand side must be non-negative")
        line = [zero] * width
        for j, a in row.items():
            line[j] = mpq(a)
        line[nv + i] = mpq(1)
        tab.append(line)
        rhs.append(bi)
    obj = [-mpq(cj) for cj in c] + [zero] * m
    value = zero
    basis = list(range(nv, width))
    degenerate_run = 0
    pivots = 0
    while True:
        if degenerate_run >= bland_after:
            s = next((j for j in range(width) if obj[j] < 0), None)
        else:
            s, best = None, zero
            for j in range(width):
                if obj[j] < best:
                    s, best = j, obj[j]
        if s is None:
            break
        r = None
        for i in range(m):
            a = tab[i][s]
            if a > 0:
                ratio = rhs[i] / a
                if r is None or ratio < r_ratio or (ratio == r_ratio and basis[i] < basis[r]):
                    r, r_ratio = i, ratio
        if r is None:
            raise Unbounded(f"column {s} is unbounded")
        degenerate_run = degenerate_run + 1 if rhs[r] == 0 else 0
        pr = tab[r]
        piv = pr[s]
        if piv != 1:
            inv = 1 / piv
            nz = [j for j in range(width) if pr[j]]
            for j in nz:
                pr[j] *= inv
            rhs[r] *= inv
        else:
            nz = [j for j in range(width) if pr[j]]
        for i in range(m):
            if i == r:
                continue
            row = tab[i]
            f = row[s]
            if f:
                for j in nz:
                    row[j] -= f * pr[j]
                rhs[i] -= f * rhs[r]
        f = obj[s]
        for j in nz:
            obj[j] -= f * pr[j]
        value -= f * rhs[r]
        basis[r] = s
        pivots += 1
    x = [zero] * nv
    for i, j in enumerate(basis):
        if j < nv:
            x[j] = rhs[i]
    return SimplexResult(
        value=_frac(value),
        x=tuple(_frac(v) for v in x),
        duals=tuple(_frac(obj[nv + i]) for i in range(m)),
        pivots=pivots,
    )
