"""Exact membership of ultimately periodic points in schema codes.

The one nontrivial fact this module rests on: for a template whose only
parameter dependence is affine run lengths (and affine Nat constraints),
membership of a fixed ultimately periodic point in the i-th instance is
an eventually periodic function of i, with period dividing the lcm of
the point's period lengths.  Quantifiers over schema indices therefore
reduce to a finite window.  The window onset is computed conservatively
and double-checked at runtime by comparing two consecutive windows.
"""

from __future__ import annotations

import math
from typing import Iterable

from .spaces import (
    Aff,
    Const,
    Cylinder,
    Fin,
    Nat,
    Run,
    cylinder_match,
)
from .words import ProductPoint, UPWord

MAX_SCHEMA_WINDOW = 200_000


class NotExactlyEvaluable(ValueError):
    """Exact evaluation is outside this code/point combination's domain."""


class WindowCheckFailed(AssertionError):
    """The periodicity self-check tripped; the onset bound was too small."""


# ---------------------------------------------------------------------------
# structural bounds


def _walk_affs(obj) -> Iterable[Aff]:
    from . import codes

    if isinstance(obj, Cylinder):
        if obj.empty:
            return
        for f, c in zip(obj.space.factors, obj.constraints):
            if isinstance(f, Nat):
                if c is not None:
                    yield c
            else:
                for s in c:
                    if isinstance(s, Run):
                        yield s.length
    elif isinstance(obj, codes.Basic):
        yield from _walk_family(obj.cells)
    elif isinstance(obj, codes.UnionCompl):
        yield from _walk_family(obj.children)


def _walk_family(fam) -> Iterable[Aff]:
    from . import codes

    if isinstance(fam, codes.FiniteList):
        for x in fam.items:
            yield from _walk_affs(x)
    elif isinstance(fam, codes.AffineSchema):
        yield from _walk_affs(fam.template)
    else:
        for p in fam.parts:
            yield from _walk_family(p)


def _const_weight(obj) -> int:
    from . import codes

    total = 0
    if isinstance(obj, Cylinder):
        if obj.empty:
            return 0
        for f, c in zip(obj.space.factors, obj.constraints):
            if isinstance(f, Nat):
                continue
            total += 2
            for s in c:
                total += len(s.entries) if isinstance(s, Const) else 2
    elif isinstance(obj, codes.Basic):
        total += _family_weight(obj.cells)
    elif isinstance(obj, codes.UnionCompl):
        total += _family_weight(obj.children)
    return total


def _family_weight(fam) -> int:
    from . import codes

    if isinstance(fam, codes.FiniteList):
        return sum(_const_weight(x) for x in fam.items)
    if isinstance(fam, codes.AffineSchema):
        return _const_weight(fam.template)
    return sum(_family_weight(p) for p in fam.parts)


def point_period(pt: ProductPoint) -> tuple[int, int]:
    """(max transient length, lcm of period lengths) over the components."""
    t, v = 0, 1
    for comp in pt.components:
        if isinstance(comp, UPWord):
            t = max(t, len(comp.transient))
            v = v * len(comp.period) // math.gcd(v, len(comp.period))
    return t, v


def schema_window(template, pt: ProductPoint) -> tuple[int, int]:
    """(onset, period) such that instance membership is periodic in the
    schema index beyond onset.

    Negative coefficients (used for unions bounded by an outer variable,
    whose instances go void once a run length turns negative) contribute
    through the absolute-value sum; the runtime window comparison guards
    the bound either way.
    """
    t, v = point_period(pt)
    extra = 0
    for e in _walk_affs(template):
        extra += abs(e.const) + sum(abs(c) for _, c in e.coeffs)
    for comp in pt.components:
        if isinstance(comp, int):
            extra = max(extra, comp + 1)
    onset = t + v + extra + _const_weight(template) + 8
    if onset + 2 * v > MAX_SCHEMA_WINDOW:
        raise NotExactlyEvaluable("schema window too large")
    return onset, v


def _windowed_any(values: list[bool], onset: int, period: int) -> bool:
    w1 = values[onset : onset + period]
    w2 = values[onset + period : onset + 2 * period]
    if w1 != w2:
        raise WindowCheckFailed("schema membership did not settle at the bound")
    return any(values[: onset + period])


def _windowed_tail(values: list[bool], onset: int, period: int) -> list[int]:
    """Residues r with a True tail class onset + r + k*period."""
    w1 = values[onset : onset + period]
    w2 = values[onset + period : onset + 2 * period]
    if w1 != w2:
        raise WindowCheckFailed("schema membership did not settle at the bound")
    return [r for r in range(period) if w1[r]]


# ---------------------------------------------------------------------------
# exact evaluation


def _match_instance(cyl: Cylinder, pt: ProductPoint) -> bool:
    # run lengths may go negative for small indices; those instances are void
    try:
        return cylinder_match(cyl, pt)
    except ValueError:
        return False


def exact_up(code, pt: ProductPoint) -> bool:
    """Exact membership of a UP/natural product point (total on codes whose
    families are finite lists or affine schemas of the pattern language)."""
    from . import codes

    for comp in pt.components:
        if not isinstance(comp, (UPWord, int)):
            raise NotExactlyEvaluable("a non-UP component is present")

    if isinstance(code, codes.Basic):
        return _family_exists(code.cells, pt, lambda cyl: _match_instance(cyl, pt))
    if isinstance(code, codes.UnionCompl):
        return _family_exists(
            code.children, pt, lambda child: not exact_up(child, pt)
        )
    raise NotExactlyEvaluable("universal-set nodes need the budgeted evaluator")


def _family_exists(fam, pt: ProductPoint, pred) -> bool:
    from . import codes

    fam = codes.normalize_family(fam)
    if isinstance(fam, codes.FiniteList):
        return any(pred(x) for x in fam.items)
    if isinstance(fam, codes.AffineSchema):
        onset, period = schema_window(fam.template, pt)
        values = [
            pred(codes.instantiate(fam.template, i))
            for i in range(onset + 2 * period)
        ]
        return _windowed_any(values, onset, period)
    return any(_family_exists(p, pt, pred) for p in fam.parts)


def schema_match_set(
    template: Cylinder, pt: ProductPoint
) -> tuple[list[int], list[tuple[int, int]]]:
    """{i : pt matches template[i]} as sporadic indices plus arithmetic
    progressions (start, step) covering the periodic tail."""
    from . import codes

    onset, period = schema_window(template, pt)
    values = [
        _match_instance(codes.instantiate(template, i), pt)
        for i in range(onset + 2 * period)
    ]
    sporadic = [i for i in range(onset) if values[i]]
    residues = _windowed_tail(values, onset, period)
    return sporadic, [(onset + r, period) for r in residues]


# ---------------------------------------------------------------------------
# zero-position analysis for the universal sets


def zeros_structure(beta: UPWord) -> tuple[list[int], list[tuple[int, int]]]:
    """{k : beta(k) = 0} as sporadic positions plus APs (start, step)."""
    lu, lv = len(beta.transient), len(beta.period)
    sporadic = [k for k in range(lu) if beta.transient[k] == 0]
    aps = [(lu + r, lv) for r in range(lv) if beta.period[r] == 0]
    return sporadic, aps


def ap_contains_code_candidate(start: int, step: int) -> bool:
    """Whether the AP can contain k with N(2^omega, k) nonempty at all.

    Nonempty neighborhoods need k = 2^(a+1) 3^(b+1) ..., in particular a
    multiple of 6; an AP avoiding multiples of 6 certifies emptiness.
    """
    return any((start + j * step) % 6 == 0 for j in range(6))


def full_space_code_in_ap(start: int, step: int) -> bool:
    """Whether the AP provably contains a code of the full-space
    neighborhood (mu(k) = 0), via the witnesses k = 2^(t+1) * 3^271."""
    from .words import seq_encode

    base = 3 ** (seq_encode((0, 2, 0)) + 1)
    power = 2  # 2^(t+1) at t = 0
    for _ in range(4 * step + 8):
        k = power * base
        if k >= start and (k - start) % step == 0:
            return True
        power *= 2
    return False
