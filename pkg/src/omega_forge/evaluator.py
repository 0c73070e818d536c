"""Three-valued and exact membership evaluation of codes at points.

eval() is sound and budget-monotone: a definite answer equals exact
membership, and growing the budget can only resolve Unknowns.  Points
whose components are all ultimately periodic route through the exact
engine; program-word components get the budgeted search.  The strong
Kleene connectives handle Unknown propagation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import codes as C
from .exact import (
    NotExactlyEvaluable,
    exact_up,
    full_space_code_in_ap,
    ap_contains_code_candidate,
    zeros_structure,
)
from .spaces import Fin, SpaceDesc, cylinder_match, nbhd_letters
from .words import (
    ProductPoint,
    ProgramWord,
    SpaceMismatch,
    UPWord,
    deinterleave,
    slice_word,
)


class Truth3(Enum):
    FALSE = 0
    TRUE = 1
    UNKNOWN = 2

    def __bool__(self):
        raise TypeError("Truth3 is three-valued; compare explicitly")

    def negate(self) -> "Truth3":
        if self is Truth3.TRUE:
            return Truth3.FALSE
        if self is Truth3.FALSE:
            return Truth3.TRUE
        return Truth3.UNKNOWN


def or3(values) -> Truth3:
    saw_unknown = False
    for v in values:
        if v is Truth3.TRUE:
            return Truth3.TRUE
        if v is Truth3.UNKNOWN:
            saw_unknown = True
    return Truth3.UNKNOWN if saw_unknown else Truth3.FALSE


def and3(values) -> Truth3:
    saw_unknown = False
    for v in values:
        if v is Truth3.FALSE:
            return Truth3.FALSE
        if v is Truth3.UNKNOWN:
            saw_unknown = True
    return Truth3.UNKNOWN if saw_unknown else Truth3.TRUE


def t3(b: bool) -> Truth3:
    return Truth3.TRUE if b else Truth3.FALSE


@dataclass(frozen=True)
class Budget:
    depth: int = 32
    index_bound: int = 32

    def __post_init__(self):
        if self.depth < 1 or self.index_bound < 1:
            raise ValueError("budgets must be >= 1")

    def doubled(self) -> "Budget":
        return Budget(self.depth * 2, self.index_bound * 2)


class DepthTooSmall(ValueError):
    pass


def _check_point(code, x: ProductPoint) -> None:
    if len(x) != len(code.space.factors):
        raise SpaceMismatch("point arity differs from the code's space")


def _all_up(x: ProductPoint) -> bool:
    return all(isinstance(c, (UPWord, int)) for c in x.components)


def eval_code(code, x: ProductPoint, b: Budget) -> Truth3:
    """Budgeted three-valued membership (see module docstring)."""
    _check_point(code, x)
    if isinstance(code, (C.UniversalCode, C.DiagonalCode)):
        return _eval_universal(code, x, b)
    if _all_up(x):
        try:
            return t3(exact_up(code, x))
        except NotExactlyEvaluable:
            pass
    return _eval_budgeted(code, x, b)


def eval_exact_up(code, x: ProductPoint) -> bool:
    """Exact membership for UP points; total on finite/affine family codes."""
    _check_point(code, x)
    return exact_up(code, x)


def _eval_budgeted(code, x: ProductPoint, b: Budget) -> Truth3:
    if isinstance(code, C.Basic):
        return _family_or(code.cells, x, b, lambda cyl: t3(_match(cyl, x)))
    if isinstance(code, C.UnionCompl):
        return _family_or(
            code.children, x, b, lambda ch: _eval_budgeted(ch, x, b).negate()
        )
    return _eval_universal(code, x, b)


def _match(cyl, x: ProductPoint) -> bool:
    try:
        return cylinder_match(cyl, x)
    except ValueError:
        return False


def _family_or(fam, x, b: Budget, pred) -> Truth3:
    fam = C.normalize_family(fam)
    if isinstance(fam, C.FiniteList):
        return or3(pred(item) for item in fam.items)
    if isinstance(fam, C.AffineSchema):
        r = or3(
            pred(C.instantiate(fam.template, i)) for i in range(b.index_bound)
        )
        return Truth3.UNKNOWN if r is Truth3.FALSE else r
    return or3(_family_or(p, x, b, pred) for p in fam.parts)


# ---------------------------------------------------------------------------
# the universal sets


def _eval_universal(code, x: ProductPoint, b: Budget) -> Truth3:
    if isinstance(code, C.DiagonalCode):
        (gamma,) = x.components
        if isinstance(gamma, UPWord):
            beta, delta = deinterleave(gamma)
        else:
            beta = ProgramWord(gamma.alphabet, lambda k, g=gamma: g(2 * k), label="evens")
            delta = ProgramWord(gamma.alphabet, lambda k, g=gamma: g(2 * k + 1), label="odds")
        return _u_eval(code.n, beta, delta, b)
    beta, delta = x.components
    return _u_eval(code.n, beta, delta, b)


def _u_eval(n: int, beta, delta, b: Budget) -> Truth3:
    """(beta, delta) in the rank-n universal set, as far as the budget and
    the UP zero-position analysis can tell."""
    if n == 1:
        return _u1_eval(beta, delta, b)
    if isinstance(beta, UPWord):
        lu, lv = len(beta.transient), len(beta.period)
        m0 = max(1, (lu + 1).bit_length())
        # slices repeat once 2^m mod lv cycles
        seen: dict[int, int] = {}
        m = m0
        while True:
            r = pow(2, m, lv)
            if r in seen:
                period = m - seen[r]
                break
            seen[r] = m
            m += 1
        ms = range(0, seen[r] + period)
    else:
        ms = range(0, b.index_bound)
    results = []
    for m in ms:
        results.append(_u_eval(n - 1, slice_word(beta, m), delta, b).negate())
    r = or3(results)
    if isinstance(beta, UPWord):
        return r
    return Truth3.UNKNOWN if r is Truth3.FALSE else r


def _u1_eval(beta, delta, b: Budget) -> Truth3:
    def nbhd_contains(k: int) -> bool:
        w = nbhd_letters(k, binary=True)
        return w is not None and all(delta(i) == c for i, c in enumerate(w))

    if isinstance(beta, UPWord):
        sporadic, aps = zeros_structure(beta)
        for k in sporadic:
            if nbhd_contains(k):
                return Truth3.TRUE
        for (start, step) in aps:
            for j in range(b.index_bound):
                if nbhd_contains(start + j * step):
                    return Truth3.TRUE
        if not aps and not any(nbhd_contains(k) for k in sporadic):
            return Truth3.FALSE
        if any(full_space_code_in_ap(s, d) for (s, d) in aps):
            return Truth3.TRUE
        if all(not ap_contains_code_candidate(s, d) for (s, d) in aps):
            return Truth3.FALSE
        return Truth3.UNKNOWN
    for k in range(b.depth * b.index_bound):
        if beta(k) == 0 and nbhd_contains(k):
            return Truth3.TRUE
    return Truth3.UNKNOWN


# ---------------------------------------------------------------------------
# the brute-force cylinder oracle


def brute_cylinders(code, d: int) -> set[str]:
    """All length-d words whose cone lies inside the denoted set.

    Requires finite-list families over a single finite-alphabet factor
    with every cylinder of depth <= d; then each depth-d cone is entirely
    inside or outside the set, so the result determines it completely.
    """
    factor = code.space.single_finite_factor()
    k = factor.size

    def check_depths(c):
        if isinstance(c, C.Basic):
            items, complete = C.family_instances(c.cells, 0, C.instantiate)
            if not complete:
                raise DepthTooSmall("schema families are out of the oracle's scope")
            for cyl in items:
                if cyl.depth() > d:
                    raise DepthTooSmall(f"cylinder of depth {cyl.depth()} > {d}")
        elif isinstance(c, C.UnionCompl):
            items, complete = C.family_instances(c.children, 0, C.instantiate)
            if not complete:
                raise DepthTooSmall("schema families are out of the oracle's scope")
            for ch in items:
                check_depths(ch)
        else:
            raise DepthTooSmall("universal nodes are out of the oracle's scope")

    check_depths(code)
    universe = [""]
    for _ in range(d):
        universe = [w + str(a) for w in universe for a in range(k)]

    def denote(c) -> set[str]:
        if isinstance(c, C.Basic):
            cells, _ = C.family_instances(c.cells, 0, C.instantiate)
            out: set[str] = set()
            for cyl in cells:
                if cyl.empty:
                    continue
                from .spaces import pattern_entries

                entries = pattern_entries(cyl.constraints[0])
                out.update(
                    w
                    for w in universe
                    if all(
                        e is None or int(w[i]) == e for i, e in enumerate(entries)
                    )
                )
            return out
        children, _ = C.family_instances(c.children, 0, C.instantiate)
        out = set()
        for ch in children:
            out.update(set(universe) - denote(ch))
        return out

    return denote(code)
