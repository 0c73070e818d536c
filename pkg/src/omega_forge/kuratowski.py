"""From a complement-form code for B to a closed C in Baire space, a
continuous bijection f : C -> B, and its measurable inverse g.

The presentation splits B into outer members B_i (complements of the
code's children) and disjoint pieces B_{i,j} covering each ~B_i.  A
point of C interleaves, for every i, the witness index h(alpha)(i) with
a point of the sub-representation of the piece it selects; f reads
component 0 back, and g(alpha) assembles the components from the unique
piece indices.  Pieces at rank 1 embed closed subsets of 2^omega into
Baire space with f the identity and g the canonical injection; higher
pieces recurse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import codes as C
from .evaluator import Budget, Truth3, t3
from .exact import exact_up
from .spaces import Cylinder, pattern_entries
from .words import (
    FiniteWord,
    BINARY,
    OMEGA,
    ProductPoint,
    ProgramWord,
    UPWord,
    pair_decode,
    pair_encode,
)


class NotInB(ValueError):
    pass


class NotInC(ValueError):
    pass


DEFAULT_PIECE_BOUND = 512


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class PiPresentation:
    """B = intersection over i of ~B_i, with B_i = ~rho(outer(i)) and the
    disjoint pieces B_{i,j} = ~rho(piece_code(i, j)) covering ~B_i."""

    code: C.UnionCompl
    xi: int
    _outer_items: tuple
    _outer_schema: object | None
    _piece_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def outer(self, i: int) -> C.BorelCode:
        if self._outer_schema is not None:
            return C.instantiate(self._outer_schema, i)
        if i < len(self._outer_items):
            return self._outer_items[i]
        return C.full_code(self.code.space)  # padding: B_i = empty

    def outer_is_finite(self) -> bool:
        return self._outer_schema is None

    def pieces(self, i: int) -> C.CodeFamily:
        if i not in self._piece_cache:
            self._piece_cache[i] = C.disjointify(self.outer(i))
        return self._piece_cache[i]

    def piece_code(self, i: int, j: int) -> C.BorelCode | None:
        fam = self.pieces(i)
        if isinstance(fam, C.FiniteList):
            return fam.items[j] if j < len(fam.items) else None
        if isinstance(fam, C.AffineSchema):
            return C.instantiate(fam.template, j)
        items, complete = C.family_instances(fam, j + 1, C.instantiate)
        if j < len(items):
            return items[j]
        return None if complete else C.instantiate(fam, j)

    def contains(self, alpha: UPWord) -> bool:
        """Exact membership of a UP point in B."""
        return not exact_up(self.code, ProductPoint((alpha,)))

    def piece_contains(self, i: int, j: int, alpha: UPWord) -> bool:
        d = self.piece_code(i, j)
        if d is None:
            return False
        return not exact_up(d, ProductPoint((alpha,)))

    def uniqueness_certificate(
        self, alphas, i_bound: int = 8, j_bound: int = 32
    ) -> bool:
        """Pairwise-disjointness witness: on the sampled points, no two
        pieces of any ~B_i overlap."""
        for alpha in alphas:
            for i in range(i_bound):
                hits = [
                    j
                    for j in range(j_bound)
                    if self.piece_contains(i, j, alpha)
                ]
                if len(hits) > 1:
                    return False
        return True


def present(b: C.BorelCode, max_rank: int = C.DEFAULT_MAX_RANK) -> PiPresentation:
    """Accepts the complement form of a rank-(xi+1) code; B = ~rho(b)."""
    if not isinstance(b, C.UnionCompl):
        raise C.NotPiForm("the code must be an outer union of complements")
    xi = C.rank(b) - 1
    if not 1 <= xi <= max_rank - 1:
        raise C.RankTooLarge(f"xi = {xi} outside [1, {max_rank - 1}]")
    fam = C.normalize_family(b.children)
    if isinstance(fam, C.FiniteList):
        return PiPresentation(b, xi, tuple(fam.items), None)
    if isinstance(fam, C.AffineSchema):
        return PiPresentation(b, xi, (), fam.template)
    items: list = []
    for p in fam.parts:
        if not isinstance(p, C.FiniteList):
            raise C.PullbackNotRepresentable("mixed chain presentations")
        items.extend(p.items)
    return PiPresentation(b, xi, tuple(items), None)


# standard presentations used by the test batteries


def std_full_presentation() -> PiPresentation:
    return present(C.UnionCompl(C.CANTOR, C.FiniteList((C.full_code(C.CANTOR),))))


def std_empty_presentation() -> PiPresentation:
    return present(C.UnionCompl(C.CANTOR, C.FiniteList((C.empty_code(C.CANTOR),))))


def std_p_infty_presentation() -> PiPresentation:
    return present(C.p_infty_sigma_code())


def std_clopen_presentation(prefix: str = "0") -> PiPresentation:
    from .spaces import prefix_cylinder

    cyl = prefix_cylinder(C.CANTOR, prefix)
    child = C.Basic(C.CANTOR, C.FiniteList((cyl,)))
    return present(C.UnionCompl(C.CANTOR, C.FiniteList((child,))))


# ---------------------------------------------------------------------------
# sub-representations of the pieces


class BaseRep:
    """A closed piece of 2^omega viewed inside Baire space: f is the
    identity and g the canonical injection."""

    def __init__(self, piece_code: C.BorelCode):
        self.piece_code = piece_code
        self._cells = None
        if isinstance(piece_code, C.Basic) and C.family_is_finite(piece_code.cells):
            self._cells, _ = C.family_instances(piece_code.cells, 0, C.instantiate)

    def member(self, letters: tuple[int, ...], b: Budget) -> Truth3:
        if any(c > 1 for c in letters):
            return Truth3.FALSE
        if self._cells is not None:
            # the piece is the complement of a finite union of cylinders:
            # the cone of `letters` must not be covered by them
            if self._cone_covered(letters):
                return Truth3.FALSE
            return Truth3.TRUE
        return Truth3.TRUE

    def _cone_covered(self, letters: tuple[int, ...]) -> bool:
        depth = max(
            [len(letters)]
            + [cyl.depth() for cyl in self._cells if not cyl.empty]
        )
        words = [letters]
        for _ in range(depth - len(letters)):
            words = [w + (a,) for w in words for a in (0, 1)]
        for w in words:
            hit = False
            for cyl in self._cells:
                if cyl.empty:
                    continue
                entries = pattern_entries(cyl.constraints[0])
                if all(
                    e is None or (i < len(w) and w[i] == e)
                    for i, e in enumerate(entries)
                ):
                    hit = True
                    break
            if not hit:
                return False
        return True

    def f_letters(self, letters: tuple[int, ...]) -> tuple[int, ...]:
        if any(c > 1 for c in letters):
            raise NotInC("a non-binary letter inside an embedded piece")
        return letters

    def g_letter(self, alpha: UPWord, n: int) -> int:
        return alpha(n)

    def contains(self, alpha: UPWord) -> bool:
        return not exact_up(self.piece_code, ProductPoint((alpha,)))


class NestedRep:
    """A piece of rank >= 2, represented through the full recursion."""

    def __init__(self, piece_code: C.BorelCode, max_rank: int):
        self.piece_code = piece_code
        pres = present(piece_code, max_rank)
        self.closed, self.pair = build(pres, max_rank)

    def member(self, letters, b: Budget) -> Truth3:
        return self.closed.member(letters, b)

    def f_letters(self, letters):
        return tuple(self.pair.f_prefix_from_letters(letters))

    def g_letter(self, alpha: UPWord, n: int) -> int:
        return self.pair.g_word(alpha)(n)

    def contains(self, alpha: UPWord) -> bool:
        return not exact_up(self.piece_code, ProductPoint((alpha,)))


# ---------------------------------------------------------------------------
# the assembled representation


@dataclass
class ClosedRep:
    presentation: PiPresentation
    subrep: Callable

    def member(self, letters: tuple[int, ...], b: Budget) -> Truth3:
        comps: dict[int, list[tuple[int, int]]] = {}
        for n, c in enumerate(letters):
            i, k = pair_decode(n)
            comps.setdefault(i, []).append((k, c))
        alpha: dict[int, int] = {}
        verdicts = [Truth3.TRUE]
        for i, pairs in sorted(comps.items()):
            kmap = dict(pairs)
            if 0 not in kmap:
                continue
            j = kmap[0]
            sub = self.subrep(i, j)
            if sub is None:
                return Truth3.FALSE
            known = sorted(k for k in kmap if k >= 1)
            if known and max(known) == len(known):
                sub_letters = tuple(kmap[k] for k in range(1, len(known) + 1))
            else:
                sub_letters = ()
                for k in range(1, len(kmap) + 2):
                    if k in kmap:
                        sub_letters += (kmap[k],)
                    else:
                        break
            verdicts.append(sub.member(sub_letters, b))
            # f-consistency across components (identity-style subs agree
            # letterwise with component 0)
            try:
                out = sub.f_letters(sub_letters)
            except NotInC:
                return Truth3.FALSE
            for n2, c2 in enumerate(out):
                if alpha.get(n2, c2) != c2:
                    return Truth3.FALSE
                alpha[n2] = c2
        from .evaluator import and3

        return and3(verdicts)


@dataclass
class BijectionPair:
    presentation: PiPresentation
    subrep: Callable
    closed: ClosedRep
    piece_bound: int = DEFAULT_PIECE_BOUND

    def h(self, alpha: UPWord, i: int) -> int:
        """The unique piece index with alpha in B_{i,j}; NotInB when the
        sweep exhausts the bound."""
        fam = self.presentation.pieces(i)
        bound = (
            len(fam.items) if isinstance(fam, C.FiniteList) else self.piece_bound
        )
        for j in range(bound):
            if self.presentation.piece_contains(i, j, alpha):
                return j
        raise NotInB(f"no piece of ~B_{i} holds the point within {bound}")

    def g_word(self, alpha: UPWord, check: bool = True) -> ProgramWord:
        if check and not self.presentation.contains(alpha):
            raise NotInB("the point fails the exact B test")
        hcache: dict[int, int] = {}

        def gen(n: int) -> int:
            i, k = pair_decode(n)
            if i not in hcache:
                hcache[i] = self.h(alpha, i)
            j = hcache[i]
            if k == 0:
                return j
            return self.subrep(i, j).g_letter(alpha, k - 1)

        return ProgramWord(OMEGA, gen, label=f"g({alpha})")

    def f_prefix_from_letters(self, letters: tuple[int, ...]) -> tuple[int, ...]:
        out = []
        k = 1
        while pair_encode(0, k) < len(letters):
            j0 = letters[pair_encode(0, 0)] if letters else 0
            sub = self.subrep(0, j0)
            if sub is None:
                raise NotInC("component 0 selects an empty piece")
            out.append(letters[pair_encode(0, k)])
            k += 1
        j0 = letters[0] if letters else None
        if j0 is not None and self.subrep(0, j0) is None:
            raise NotInC("component 0 selects an empty piece")
        sub = self.subrep(0, j0) if j0 is not None else None
        return tuple(sub.f_letters(tuple(out))) if sub else tuple(out)

    def f_apply(self, delta, b: Budget) -> FiniteWord:
        letters = tuple(delta(n) for n in range(b.depth))
        if self.closed.member(letters, b) is Truth3.FALSE:
            raise NotInC("the prefix is already rejected")
        return FiniteWord(BINARY, self.f_prefix_from_letters(letters))


def build(
    p: PiPresentation, max_rank: int = C.DEFAULT_MAX_RANK
) -> tuple[ClosedRep, BijectionPair]:
    cache: dict[tuple[int, int], object] = {}

    def subrep(i: int, j: int):
        key = (i, j)
        if key not in cache:
            d = p.piece_code(i, j)
            if d is None:
                cache[key] = None
            elif C.rank(d) <= 1:
                cache[key] = BaseRep(d)
            else:
                cache[key] = NestedRep(d, max_rank)
        return cache[key]

    closed = ClosedRep(p, subrep)
    pair = BijectionPair(p, subrep, closed)
    return closed, pair


def g_apply(pair: BijectionPair, alpha: UPWord) -> ProgramWord:
    """g(alpha) as a program word over omega (NotInB off B)."""
    return pair.g_word(alpha)


def f_apply(pair: BijectionPair, delta, b: Budget) -> FiniteWord:
    return pair.f_apply(delta, b)


# ---------------------------------------------------------------------------
# the base-case measurability proxy


def injection_preimage_consistent(alpha: UPWord, k: int) -> bool:
    """The canonical injection's preimage data: embedded alpha lies in
    N(omega^omega, k) iff alpha lies in N(2^omega, k) and the coded
    prefix is binary."""
    from .spaces import mu_of, seq_at

    code = seq_at(seq_at(k, 1), 0)
    radius_ok = seq_at(seq_at(k, 1), 1) != 0
    m = mu_of(k)
    lhs = radius_ok and all(alpha(j) == seq_at(code, j) for j in range(m))
    from .spaces import sg

    rhs = (
        radius_ok
        and all(alpha(j) == sg(seq_at(code, j)) for j in range(m))
        and all(seq_at(code, j) < 2 for j in range(m))
    )
    return lhs == rhs
