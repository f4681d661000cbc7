"""Closed-form probability mass function of the walk.

All functions here evaluate the displacement distribution analytically from
the Y polynomial family; the state-vector simulator in ``walk`` is the
independent ground truth they are validated against.

Sign convention: the analytic displacement axis is the mirror image of the
simulator's shift axis.  ``pmf_point(k, d, lam)`` equals the simulated
probability of displacement ``-d``; equivalently a walker with lam close to
1 piles up at d = -k on this axis.  The constant ``CONVENTION_SIGMA = -1``
records the reflection and is stamped into serialized output so downstream
tools can map between the two axes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterator

from .chebyshev import (
    hyp2f1_terminating,
    y_poly,
    _iter_y_rows_exact,
    _iter_y_rows_float,
)

__all__ = [
    "CONVENTION_SIGMA",
    "Pmf",
    "pmf_point",
    "pmf_point_cosine_form",
    "pmf_even_closed",
    "pmf_full",
    "iter_pmf_full",
    "reluctance_profile",
    "pmf_to_csv",
    "pmf_from_csv",
    "pmf_to_json",
    "pmf_from_json",
    "format_float",
]

# The analytic axis is the simulator's axis reflected through the origin.
CONVENTION_SIGMA = -1

# Below this the 2F1 argument 1/lam^2 is not usable; fall back to the series.
_EVEN_CLOSED_LAMBDA_FLOOR = 1e-6

_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class Pmf:
    """Displacement distribution after ``k`` steps.

    ``table`` maps displacement to probability and is kept sorted by
    displacement.  ``lam`` records the coin parameter the table was built
    from; it is None for tables read off a simulated state, where the coin
    is not part of the state.
    """

    k: int
    table: dict[int, float]
    lam: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "table", dict(sorted(self.table.items())))

    @property
    def support(self) -> list[int]:
        return list(self.table)

    def probability(self, d: int) -> float:
        return self.table.get(d, 0.0)

    def total(self) -> float:
        return math.fsum(self.table.values())

    def mean(self) -> float:
        return math.fsum(d * p for d, p in self.table.items())

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum((d - mu) ** 2 * p for d, p in self.table.items())

    def std(self) -> float:
        return math.sqrt(self.variance())


def _clamp(p, clamp: bool):
    if not clamp or isinstance(p, Fraction):
        return p
    if p < -_CLAMP_TOL or p > 1.0 + _CLAMP_TOL:
        raise ValueError(f"probability {p} outside [0, 1] beyond clamp tolerance")
    return min(max(p, 0.0), 1.0)


def _validate_k_lam(k: int, lam) -> None:
    if k < 1:
        raise ValueError(f"step count must be >= 1, got {k}")
    if abs(lam) > 1:
        raise ValueError(f"|lam| must be <= 1, got {lam}")


def pmf_point(k: int, d: int, lam, clamp: bool = True):
    """Probability of displacement ``d`` after ``k`` steps, coin parameter lam.

    Evaluates

        p = (1 - lam^2) * (Y_{|d-1|}^(k-1))^2
            + (Y_{|d|}^(k-2) - lam * Y_{|d+1|}^(k-1))^2

    which is exact for k >= 2; k = 1 is the two-site special case
    p(-1) = lam^2, p(+1) = 1 - lam^2 (the k-2 row does not exist there).
    Zero off the parity-valid support.  A Fraction ``lam`` gives the exact
    rational probability.
    """
    _validate_k_lam(k, lam)
    d = int(d)
    exact = isinstance(lam, Fraction)
    if abs(d) > k or (k - d) % 2:
        return Fraction(0) if exact else 0.0
    if k == 1:
        val = lam * lam if d == -1 else 1 - lam * lam
        return _clamp(val, clamp)
    y_a = y_poly(abs(d - 1), k - 1, lam)
    y_b = y_poly(abs(d), k - 2, lam)
    y_c = y_poly(abs(d + 1), k - 1, lam)
    val = (1 - lam * lam) * y_a * y_a + (y_b - lam * y_c) ** 2
    return _clamp(val, clamp)


def pmf_point_cosine_form(k: int, d: int, lam, clamp: bool = True):
    """Law-of-cosines form of the pmf.

    p = (Y_{|d|}^(k))^2 + (Y_{|d-1|}^(k-1))^2
        - 2 * lam * Y_{|d|}^(k) * Y_{|d-1|}^(k-1)

    Algebraically identical to ``pmf_point`` (the order recurrence of the
    Y family converts one into the other); kept as an independent
    evaluation route.  At lam = 1 it is the exact square
    (Y_d^(k) - Y_{d-1}^(k-1))^2.
    """
    _validate_k_lam(k, lam)
    d = int(d)
    exact = isinstance(lam, Fraction)
    if abs(d) > k or (k - d) % 2:
        return Fraction(0) if exact else 0.0
    y_k = y_poly(abs(d), k, lam)
    y_km1 = y_poly(abs(d - 1), k - 1, lam)
    val = y_k * y_k + y_km1 * y_km1 - 2 * lam * y_k * y_km1
    return _clamp(val, clamp)


def _y_via_2f1(m: int, j: int, lam_q: Fraction) -> Fraction:
    """Y_m^(j) through its terminating-hypergeometric representation.

    Y_m^(j)(lam) = lam^j * C(j, (j+m)/2) * 2F1((m-j)/2, (-m-j)/2; -j; lam^-2)

    Evaluated in exact rational arithmetic: the 2F1 factor grows like
    lam^-j, so fixed-precision intermediates would overflow long before
    the bounded product is formed.
    """
    m = abs(m)
    if m > j or (j - m) % 2:
        return Fraction(0)
    z = 1 / (lam_q * lam_q)
    f = hyp2f1_terminating(Fraction(m - j, 2), Fraction(-m - j, 2), Fraction(-j), z)
    return lam_q**j * comb(j, (j + m) // 2) * f


def pmf_even_closed(k2: int, d2: int, lam, clamp: bool = True):
    """Even-step pmf through the hypergeometric product form.

    Same quantity as ``pmf_point(k2, d2, lam)`` but with every Y factor
    evaluated via its terminating 2F1 representation in 1/lam^2; serves as
    a third, structurally different evaluation route for even steps and
    displacements.  Delegates to the series path when |lam| is below the
    2F1 floor (the argument 1/lam^2 degenerates).
    """
    _validate_k_lam(k2, lam)
    if k2 % 2 or d2 % 2:
        raise ValueError(f"even step and displacement required, got k={k2}, d={d2}")
    exact = isinstance(lam, Fraction)
    if abs(d2) > k2:
        return Fraction(0) if exact else 0.0
    if abs(lam) < _EVEN_CLOSED_LAMBDA_FLOOR:
        return pmf_point(k2, d2, lam, clamp=clamp)
    lam_q = lam if exact else Fraction(lam)
    y_a = _y_via_2f1(d2 - 1, k2 - 1, lam_q)
    y_b = _y_via_2f1(d2, k2 - 2, lam_q)
    y_c = _y_via_2f1(d2 + 1, k2 - 1, lam_q)
    val = (1 - lam_q * lam_q) * y_a * y_a + (y_b - lam_q * y_c) ** 2
    return _clamp(val if exact else float(val), clamp)


def _row_get(row, m: int):
    m = abs(m)
    return row[m] if m < len(row) else 0


def _table_from_rows(k: int, lam, row_km1, row_km2, clamp: bool) -> dict[int, float]:
    lam_f = float(lam)
    one_minus = 1.0 - lam_f * lam_f
    table: dict[int, float] = {}
    for d in range(-k, k + 1, 2):
        y_a = float(_row_get(row_km1, d - 1))
        y_b = float(_row_get(row_km2, d))
        y_c = float(_row_get(row_km1, d + 1))
        p = one_minus * y_a * y_a + (y_b - lam_f * y_c) ** 2
        table[d] = _clamp(p, clamp)
    return table


def iter_pmf_full(lam, k_max: int, exact: bool = True, clamp: bool = True) -> Iterator[Pmf]:
    """Yield the full pmf for k = 1, 2, ..., k_max.

    Shares one rolling pass over the Y recurrence rows, so a whole k-grid
    costs the same as the single largest k.  ``exact=True`` builds the
    rows in rational arithmetic (floats only in the final combination);
    ``exact=False`` uses the float64 rows, adequate to ~1e-12 and much
    faster for plot-scale sweeps.
    """
    _validate_k_lam(1, lam)
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    lam_f = float(lam)
    rows = _iter_y_rows_exact(lam if isinstance(lam, Fraction) else Fraction(lam)) \
        if exact else _iter_y_rows_float(lam_f)
    row_km2: list | None = None
    row_km1 = next(rows)  # row 0
    # k = 1: the k-2 row does not exist; emit the two-site case directly
    p_minus = lam_f * lam_f
    yield Pmf(1, {-1: _clamp(p_minus, clamp), 1: _clamp(1.0 - p_minus, clamp)}, lam=lam_f)
    for k in range(2, k_max + 1):
        row_km2, row_km1 = row_km1, next(rows)  # rows k-2 and k-1
        yield Pmf(k, _table_from_rows(k, lam_f, row_km1, row_km2, clamp), lam=lam_f)


def pmf_full(k: int, lam, exact: bool = True, clamp: bool = True) -> Pmf:
    """Full displacement table after ``k`` steps; normalized by construction."""
    _validate_k_lam(k, lam)
    for pmf in iter_pmf_full(lam, k, exact=exact, clamp=clamp):
        if pmf.k == k:
            return pmf
    raise AssertionError("unreachable")


def reluctance_profile(k: int, lam, exact: bool = True) -> list[tuple[float, float]]:
    """The pmf re-indexed by reluctance r = d/k, as (r, probability) pairs."""
    pmf = pmf_full(k, lam, exact=exact)
    return [(d / k, p) for d, p in pmf.table.items()]


def format_float(x) -> str:
    """Decimal rendering with 17 significant digits (round-trips float64)."""
    return "%.17g" % float(x)


def pmf_to_csv(pmf: Pmf, meta: dict | None = None) -> str:
    """Render a pmf as CSV with columns (k, d, r, lambda, p).

    Optional ``meta`` entries become leading ``# key: value`` comment
    lines.  LF line endings, 17-significant-digit decimals.
    """
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "d", "r", "lambda", "p"])
    lam_text = "" if pmf.lam is None else format_float(pmf.lam)
    for d, p in pmf.table.items():
        writer.writerow([pmf.k, d, format_float(d / pmf.k), lam_text, format_float(p)])
    return buf.getvalue()


def pmf_from_csv(text: str) -> Pmf:
    """Parse ``pmf_to_csv`` output back into a Pmf."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    if not rows or rows[0] != ["k", "d", "r", "lambda", "p"]:
        raise ValueError("not a pmf table: missing 'k,d,r,lambda,p' header")
    k = None
    lam = None
    table: dict[int, float] = {}
    for rec in rows[1:]:
        k = int(rec[0])
        table[int(rec[1])] = float(rec[4])
        lam = float(rec[3]) if rec[3] else None
    if k is None:
        raise ValueError("pmf table has no data rows")
    return Pmf(k, table, lam=lam)


def pmf_to_json(pmf: Pmf, meta: dict | None = None) -> dict:
    """JSON-ready mirror of the CSV table."""
    obj = {
        "k": pmf.k,
        "lambda": pmf.lam,
        "rows": [{"d": d, "r": d / pmf.k, "p": p} for d, p in pmf.table.items()],
    }
    if meta:
        obj["meta"] = dict(meta)
    return obj


def pmf_from_json(obj) -> Pmf:
    if isinstance(obj, str):
        obj = json.loads(obj)
    table = {int(row["d"]): float(row["p"]) for row in obj["rows"]}
    lam = obj.get("lambda")
    return Pmf(int(obj["k"]), table, lam=None if lam is None else float(lam))
