"""Finite-rank Borel codes and their syntactic transformations.

A code is either Basic (a countable union of cylinders, rank 1) or
UnionCompl (a countable union of complements of lower codes), plus two
special nodes for the universal sets and their diagonal pullbacks.
Families of children are finite lists, affine schemas (a template with
one free integer parameter), or finite chains of those.

All transformations are structural recursion on the code tree; codes
are well-founded syntax, so no fixed-point device is needed anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .spaces import (
    Aff,
    BAIRE,
    CANTOR,
    CANTOR2,
    Baire,
    Const,
    Cylinder,
    Fin,
    Nat,
    Pattern,
    Run,
    SpaceDesc,
    aff,
    basic_nbhd,
    cylinder_complement_patterns,
    cylinder_intersect,
    empty_cylinder,
    full_cylinder,
    pattern_entries,
    pattern_from_entries,
    pattern_is_concrete,
)
from .words import FiniteWord, SpaceMismatch, UPWord, interleave, pair_encode

DEFAULT_MAX_RANK = 4


class RankTooLarge(ValueError):
    pass


class PullbackNotRepresentable(ValueError):
    """The requested transformation leaves the finite/affine family language."""


class NotPiForm(ValueError):
    pass


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class FiniteList:
    items: tuple

    def __len__(self):
        return len(self.items)


@dataclass(frozen=True)
class AffineSchema:
    """i |-> template[i]; the template's innermost free variable is i."""

    template: object


@dataclass(frozen=True)
class Chain:
    """A finite concatenation of families (still one countable family)."""

    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise ValueError("empty chain")


CodeFamily = FiniteList | AffineSchema | Chain


def family(items=None, schema=None) -> CodeFamily:
    if schema is not None:
        return AffineSchema(schema)
    return FiniteList(tuple(items or ()))


def normalize_family(fam: CodeFamily) -> CodeFamily:
    if isinstance(fam, Chain):
        parts = []
        for p in fam.parts:
            p = normalize_family(p)
            if isinstance(p, Chain):
                parts.extend(p.parts)
            elif isinstance(p, FiniteList) and not p.items:
                continue
            else:
                parts.append(p)
        if not parts:
            return FiniteList(())
        if len(parts) == 1:
            return parts[0]
        if all(isinstance(p, FiniteList) for p in parts):
            return FiniteList(tuple(x for p in parts for x in p.items))
        return Chain(tuple(parts))
    return fam


def chain(*fams: CodeFamily) -> CodeFamily:
    return normalize_family(Chain(tuple(fams)))


def family_map(fam: CodeFamily, fn) -> CodeFamily:
    if isinstance(fam, FiniteList):
        return FiniteList(tuple(fn(x) for x in fam.items))
    if isinstance(fam, AffineSchema):
        return AffineSchema(fn(fam.template))
    return Chain(tuple(family_map(p, fn) for p in fam.parts))


def family_instances(fam: CodeFamily, bound: int, subst) -> tuple[list, bool]:
    """First members of the family; the flag says whether that is all of them."""
    if isinstance(fam, FiniteList):
        return list(fam.items), True
    if isinstance(fam, AffineSchema):
        return [subst(fam.template, i) for i in range(bound)], False
    out, complete = [], True
    for p in fam.parts:
        xs, c = family_instances(p, bound, subst)
        out.extend(xs)
        complete = complete and c
    return out, complete


def family_is_finite(fam: CodeFamily) -> bool:
    if isinstance(fam, FiniteList):
        return True
    if isinstance(fam, AffineSchema):
        return False
    return all(family_is_finite(p) for p in fam.parts)


# ---------------------------------------------------------------------------
# codes


@dataclass(frozen=True)
class Basic:
    space: SpaceDesc
    cells: CodeFamily  # of Cylinder

    def __post_init__(self):
        object.__setattr__(self, "cells", normalize_family(self.cells))


@dataclass(frozen=True)
class UnionCompl:
    space: SpaceDesc
    children: CodeFamily  # of BorelCode

    def __post_init__(self):
        object.__setattr__(self, "children", normalize_family(self.children))


@dataclass(frozen=True)
class UniversalCode:
    """The rank-n universal set over 2^omega x 2^omega (beta pages delta)."""

    n: int

    @property
    def space(self) -> SpaceDesc:
        return CANTOR2


@dataclass(frozen=True)
class DiagonalCode:
    """Pullback of the rank-n universal set under x |-> (evens, odds)."""

    n: int

    @property
    def space(self) -> SpaceDesc:
        return CANTOR


BorelCode = Basic | UnionCompl | UniversalCode | DiagonalCode


def empty_code(space: SpaceDesc = CANTOR) -> Basic:
    return Basic(space, FiniteList(()))


def full_code(space: SpaceDesc = CANTOR) -> Basic:
    return Basic(space, FiniteList((full_cylinder(space),)))


def _family_subst(fam: CodeFamily, value: int, depth: int, item_subst) -> CodeFamily:
    if isinstance(fam, FiniteList):
        return FiniteList(tuple(item_subst(x, value, depth) for x in fam.items))
    if isinstance(fam, AffineSchema):
        return AffineSchema(item_subst(fam.template, value, depth + 1))
    return Chain(tuple(_family_subst(p, value, depth, item_subst) for p in fam.parts))


def code_subst(code: BorelCode, value: int, depth: int = 0) -> BorelCode:
    """Instantiate the schema variable bound at `depth` levels out."""
    if isinstance(code, Basic):
        return Basic(
            code.space,
            _family_subst(code.cells, value, depth, lambda c, v, d: c.subst(v, d)),
        )
    if isinstance(code, UnionCompl):
        return UnionCompl(
            code.space, _family_subst(code.children, value, depth, code_subst)
        )
    return code


def instantiate(schema_member, i: int):
    """Instantiate a family member (cylinder or code) at index i."""
    if isinstance(schema_member, Cylinder):
        return schema_member.subst(i, 0)
    return code_subst(schema_member, i, 0)


def rank(code: BorelCode) -> int:
    """Basic codes have rank 1; a union of complements is one more than its
    children's sup (schema instantiation preserves structure, so the
    template's rank is the sup)."""
    if isinstance(code, Basic):
        return 1
    if isinstance(code, (UniversalCode, DiagonalCode)):
        return code.n
    best = 1

    def walk(fam):
        nonlocal best
        if isinstance(fam, FiniteList):
            for c in fam.items:
                best = max(best, rank(c))
        elif isinstance(fam, AffineSchema):
            best = max(best, rank(fam.template))
        else:
            for p in fam.parts:
                walk(p)

    walk(code.children)
    return 1 + best if _family_nonempty(code.children) else 2


def _family_nonempty(fam: CodeFamily) -> bool:
    if isinstance(fam, FiniteList):
        return bool(fam.items)
    return True


def _check_same_space(codes: Sequence[BorelCode]) -> SpaceDesc:
    sp = codes[0].space
    for c in codes[1:]:
        if c.space != sp:
            raise SpaceMismatch("codes live in different spaces")
    return sp


# ---------------------------------------------------------------------------
# Lemma-style transformations


def complement_code(c: BorelCode) -> BorelCode:
    """Negation; raises the rank by exactly one."""
    return UnionCompl(c.space, FiniteList((c,)))


def promote_code(c: BorelCode) -> BorelCode:
    """View a rank-1 code at rank 2 (higher-rank codes pass through).

    Each cylinder C becomes the complement of the rank-1 code for ~C,
    which needs the finite flip enumeration, hence a finite family.
    """
    if not isinstance(c, Basic):
        return c
    if not family_is_finite(c.cells):
        raise PullbackNotRepresentable("promotion of schema families")
    cells, _ = family_instances(c.cells, 0, instantiate)
    if not cells:
        # empty set at rank 2: the complement of the full space
        return UnionCompl(c.space, FiniteList((full_code(c.space),)))
    children = []
    for cyl in cells:
        children.append(Basic(c.space, FiniteList(tuple(cylinder_complement_patterns(cyl)))))
    return UnionCompl(c.space, FiniteList(tuple(children)))


def bool_code(op: str, cs: Sequence[BorelCode]) -> BorelCode:
    """Finite union/intersection with the rank bookkeeping of the closure
    lemma: rank-1-only inputs stay rank 1, otherwise the max rank wins."""
    if op not in ("union", "intersect"):
        raise ValueError("op must be union or intersect")
    if not cs:
        raise ValueError("need at least one code")
    sp = _check_same_space(cs)
    if len(cs) == 1:
        return cs[0]
    if all(isinstance(c, Basic) for c in cs):
        if op == "union":
            return Basic(sp, chain(*[c.cells for c in cs]))
        if not all(family_is_finite(c.cells) for c in cs):
            raise PullbackNotRepresentable("schema intersections at rank 1")
        acc = [full_cylinder(sp)]
        for c in cs:
            cells, _ = family_instances(c.cells, 0, instantiate)
            acc = [
                z
                for a in acc
                for b in cells
                for z in [cylinder_intersect(a, b)]
                if not z.empty
            ]
        return Basic(sp, FiniteList(tuple(acc)))
    lifted = [promote_code(c) if isinstance(c, Basic) else c for c in cs]
    if op == "union":
        return UnionCompl(sp, chain(*[c.children for c in lifted]))
    # intersection distributes over the children tuples
    if not all(family_is_finite(c.children) for c in lifted):
        raise PullbackNotRepresentable("schema intersections")
    fams = [family_instances(c.children, 0, instantiate)[0] for c in lifted]
    if any(not f for f in fams):
        # one factor is the full space
        fams = [f for f in fams if f]
        if not fams:
            return lifted[0]
    picks: list[list] = [[]]
    for f in fams:
        picks = [p + [x] for p in picks for x in f]
    children = tuple(bool_code("union", p) if len(p) > 1 else p[0] for p in picks)
    return UnionCompl(sp, FiniteList(children))


def section_code(c: BorelCode, x, x_arity: int | None = None) -> BorelCode:
    """The x-section of a code on X x Y, as a code on Y (rank preserved).

    x is a ProductPoint (or tuple) of UP words / naturals for the leading
    factors.  Basic cylinders resolve their X-part against x; schema
    families use the exact index analysis to stay affine.
    """
    from .exact import schema_match_set
    from .words import ProductPoint

    comps = x.components if isinstance(x, ProductPoint) else tuple(x)
    nx = x_arity if x_arity is not None else len(comps)
    if nx >= len(c.space.factors):
        raise SpaceMismatch("section needs a nonempty Y part")
    xf, yf = c.space.factors[:nx], c.space.factors[nx:]
    ysp = SpaceDesc(yf)
    for f, comp in zip(xf, comps):
        if isinstance(f, Nat) and not isinstance(comp, int):
            raise SpaceMismatch("Nat factor needs a natural")
        if not isinstance(f, Nat) and not isinstance(comp, UPWord):
            raise SpaceMismatch("sequence factor needs a UP word")

    def split(cyl: Cylinder) -> tuple[Cylinder, Cylinder]:
        return (
            Cylinder(SpaceDesc(xf), cyl.constraints[:nx]),
            Cylinder(ysp, cyl.constraints[nx:]),
        )

    if isinstance(c, Basic):

        def go(fam: CodeFamily) -> CodeFamily:
            fam = normalize_family(fam)
            if isinstance(fam, FiniteList):
                keep = []
                for cyl in fam.items:
                    if cyl.empty:
                        continue
                    xcyl, ycyl = split(cyl)
                    if not xcyl.is_concrete() or not ycyl.is_concrete():
                        raise PullbackNotRepresentable(
                            "free variables inside a finite list"
                        )
                    from .spaces import cylinder_match

                    if cylinder_match(xcyl, ProductPoint(comps)):
                        keep.append(ycyl)
                return FiniteList(tuple(keep))
            if isinstance(fam, Chain):
                return Chain(tuple(go(p) for p in fam.parts))
            tmpl = fam.template
            if tmpl.empty:
                return FiniteList(())
            xcyl, ycyl = split(tmpl)
            sporadic, aps = schema_match_set(xcyl, ProductPoint(comps))
            parts: list[CodeFamily] = []
            found = [ycyl.subst(i, 0) for i in sporadic]
            if found:
                parts.append(FiniteList(tuple(found)))
            for (start, step) in aps:
                reix = _cyl_reindex(ycyl, step, start)
                parts.append(AffineSchema(reix))
            if not parts:
                return FiniteList(())
            return chain(*parts)

        return Basic(ysp, go(c.cells))

    if isinstance(c, UnionCompl):

        def go_child(child):
            return section_code(child, ProductPoint(comps), nx)

        fam = c.children
        if isinstance(fam, AffineSchema):
            return UnionCompl(ysp, AffineSchema(go_child(fam.template)))
        if isinstance(fam, Chain):
            return UnionCompl(
                ysp,
                Chain(
                    tuple(
                        AffineSchema(go_child(p.template))
                        if isinstance(p, AffineSchema)
                        else family_map(p, go_child)
                        for p in fam.parts
                    )
                ),
            )
        return UnionCompl(ysp, family_map(fam, go_child))

    raise PullbackNotRepresentable("sections of universal-set nodes")


def _cyl_reindex(cyl: Cylinder, a: int, b: int) -> Cylinder:
    """Reindex the innermost schema variable i := a*j + b."""
    if cyl.empty:
        return cyl
    cs = []
    for f, c in zip(cyl.space.factors, cyl.constraints):
        if isinstance(f, Nat):
            cs.append(None if c is None else c.compose_inner(a, b))
        else:
            cs.append(
                tuple(
                    s
                    if isinstance(s, Const)
                    else Run(s.entry, s.length.compose_inner(a, b))
                    for s in c
                )
            )
    return Cylinder(cyl.space, tuple(cs))


@dataclass(frozen=True)
class PrefixMap:
    """A monotone total map on finite words inducing a continuous map
    between sequence spaces; f(x) is the limit of map(x|n)."""

    domain: SpaceDesc
    codomain: SpaceDesc
    map: Callable[[tuple[int, ...]], tuple[int, ...]]

    def __call__(self, letters: tuple[int, ...]) -> tuple[int, ...]:
        return self.map(letters)


def identity_prefix_map(space: SpaceDesc) -> PrefixMap:
    return PrefixMap(space, space, lambda s: s)


def widen_prefix_map(src: SpaceDesc, dst: SpaceDesc) -> PrefixMap:
    return PrefixMap(src, dst, lambda s: s)


def slice_prefix_map(space: SpaceDesc, i: int) -> PrefixMap:
    """delta |-> (delta)_i as a prefix map."""

    def go(s: tuple[int, ...]) -> tuple[int, ...]:
        out = []
        j = 0
        while pair_encode(i, j) < len(s):
            out.append(s[pair_encode(i, j)])
            j += 1
        return tuple(out)

    return PrefixMap(space, space, go)


def substitute_code(c: BorelCode, f: PrefixMap, search_depth: int = 64) -> BorelCode:
    """Pull a code on Y back along f : X -> Y (rank preserved).

    Each Y-cylinder is replaced by the family of minimal X-prefixes whose
    image decides the cylinder.  Works by breadth-first search over X's
    word tree; a finite antichain must decide every cylinder, otherwise
    the pullback is not representable in the family language.
    """
    if c.space != f.codomain:
        raise SpaceMismatch("code space differs from the map's codomain")
    if len(f.domain.factors) != 1 or isinstance(f.domain.factors[0], Nat):
        raise PullbackNotRepresentable("pullbacks need a sequence domain")
    dom_factor = f.domain.factors[0]
    if not isinstance(dom_factor, Fin):
        raise PullbackNotRepresentable("pullbacks over omega^omega domains")
    k = dom_factor.size

    if isinstance(c, Basic):
        if not family_is_finite(c.cells):
            raise PullbackNotRepresentable("pullbacks of schema families")
        cells, _ = family_instances(c.cells, 0, instantiate)
        out: list[Cylinder] = []
        for cyl in cells:
            if cyl.empty:
                continue
            entries = pattern_entries(cyl.constraints[0])
            need = len(entries)
            frontier: list[tuple[int, ...]] = [()]
            guard = 0
            while frontier:
                guard += 1
                if guard > search_depth * (k ** 6):
                    raise PullbackNotRepresentable("pullback frontier did not close")
                s = frontier.pop()
                img = f(s)
                ok = all(
                    e is None or (i < len(img) and img[i] == e)
                    for i, e in enumerate(entries[: len(img)])
                )
                if not ok:
                    continue
                if len(img) >= need:
                    out.append(
                        Cylinder(f.domain, (pattern_from_entries(s),))
                    )
                    continue
                if len(s) > search_depth:
                    raise PullbackNotRepresentable("pullback needs deeper prefixes")
                frontier.extend(s + (a,) for a in range(k))
        return Basic(f.domain, FiniteList(tuple(out)))

    if isinstance(c, UnionCompl):
        return UnionCompl(
            f.domain,
            family_map(c.children, lambda ch: substitute_code(ch, f, search_depth)),
        )

    raise PullbackNotRepresentable("pullbacks of universal-set nodes")


def exists_code(c: BorelCode) -> BorelCode:
    """Projection along a leading Nat factor (rank preserved)."""
    if not isinstance(c.space.factors[0], Nat):
        raise SpaceMismatch("exists_code needs a leading Nat factor")
    ysp = SpaceDesc(c.space.factors[1:])

    if isinstance(c, Basic):

        def drop(cyl: Cylinder) -> Cylinder:
            if cyl.empty:
                return empty_cylinder(ysp)
            return Cylinder(ysp, cyl.constraints[1:])

        return Basic(ysp, family_map(c.cells, drop))

    if isinstance(c, UnionCompl):
        # exists n in a union of complements: section each child at each n;
        # for finite children with eventually-absent Nat constraints the
        # n-family of sections is eventually constant, hence affine.
        if not family_is_finite(c.children):
            raise PullbackNotRepresentable("exists over schema children")
        children, _ = family_instances(c.children, 0, instantiate)
        parts: list[CodeFamily] = []
        for ch in children:
            secs = _nat_section_family(ch)
            parts.append(secs)
        return UnionCompl(ysp, chain(*parts))

    raise SpaceMismatch("universal nodes have no Nat factor")


def _nat_section_family(child: BorelCode) -> CodeFamily:
    """The family (section of child at n)_{n in omega} when it is eventually
    constant in n, as a finite list plus a constant schema tail."""
    consts = _nat_constants(child)
    cutoff = (max(consts) + 1) if consts else 0
    items = [section_code(child, (n,), 1) for n in range(cutoff)]
    tail = section_code(child, (cutoff,), 1)
    fams: list[CodeFamily] = []
    if items:
        fams.append(FiniteList(tuple(items)))
    fams.append(AffineSchema(tail))
    return chain(*fams)


def _nat_constants(code: BorelCode) -> list[int]:
    out: list[int] = []

    def walk_cyl(cyl: Cylinder):
        if cyl.empty:
            return
        cns = cyl.constraints[0]
        if cns is None:
            return
        if not cns.is_const:
            raise PullbackNotRepresentable("variable Nat constraint under exists")
        out.append(cns.value())

    def walk(c: BorelCode):
        if isinstance(c, Basic):
            items, complete = family_instances(c.cells, 0, instantiate)
            if not complete:
                raise PullbackNotRepresentable("schema family under exists")
            for cyl in items:
                walk_cyl(cyl)
        elif isinstance(c, UnionCompl):
            items, complete = family_instances(c.children, 0, instantiate)
            if not complete:
                raise PullbackNotRepresentable("schema family under exists")
            for ch in items:
                walk(ch)
        else:
            raise PullbackNotRepresentable("universal node under exists")

    walk(code)
    return out


def union_family_code(fam: CodeFamily) -> BorelCode:
    """Countable union of a family of codes (rank <= the family's sup for
    sup >= 2; a singleton family returns the member itself)."""
    members, complete = family_instances(fam, 1, instantiate)
    if not members:
        raise ValueError("union over an empty family")
    if complete and len(members) == 1:
        return members[0]
    if isinstance(fam, FiniteList):
        return bool_code("union", list(fam.items))
    if isinstance(fam, AffineSchema):
        t = fam.template
        if isinstance(t, Basic):
            return Basic(t.space, _flatten_basic_schema(t))
        if isinstance(t, UnionCompl):
            return UnionCompl(t.space, _reassoc_schema_children(t))
        raise PullbackNotRepresentable("union over universal nodes")
    parts = [union_family_code(p) for p in fam.parts]
    return bool_code("union", parts)


def _flatten_basic_schema(t: Basic) -> CodeFamily:
    """union_i Basic(cells(i)) = Basic over the (i, cell) pairs."""
    cells = normalize_family(t.cells)
    if isinstance(cells, FiniteList):
        return chain(
            *[AffineSchema(cyl) for cyl in cells.items]
        )
    if isinstance(cells, AffineSchema):
        raise PullbackNotRepresentable("nested schema flattening")
    return chain(*[_flatten_basic_schema(Basic(t.space, p)) for p in cells.parts])


def _reassoc_schema_children(t: UnionCompl) -> CodeFamily:
    ch = normalize_family(t.children)
    if isinstance(ch, FiniteList):
        return chain(*[AffineSchema(c) for c in ch.items])
    raise PullbackNotRepresentable("nested schema flattening")


# ---------------------------------------------------------------------------
# disjointification (the rank-lowering pieces)


def disjointify(c: BorelCode, max_rank: int = DEFAULT_MAX_RANK) -> CodeFamily:
    """Pieces (D_i) with ~rho(D_i) pairwise disjoint, union rho(c), and
    rank(D_i) < max(2, rank(c)).

    Rank-1 finite families use the first-witness subtraction; rank-1
    affine schemas are handled when the template probes one position
    behind a growing wildcard run (the tail-set shape), which is the form
    the standard presentations use.
    """
    if isinstance(c, (UniversalCode, DiagonalCode)):
        raise PullbackNotRepresentable("disjointify of universal nodes")
    if isinstance(c, Basic):
        cells = normalize_family(c.cells)
        if family_is_finite(cells):
            items, _ = family_instances(cells, 0, instantiate)
            out = []
            for i, cyl in enumerate(items):
                fam = list(cylinder_complement_patterns(cyl)) if not cyl.empty else [
                    full_cylinder(c.space)
                ]
                fam.extend(x for x in items[:i] if not x.empty)
                out.append(Basic(c.space, FiniteList(tuple(fam))))
            return FiniteList(tuple(out))
        if isinstance(cells, AffineSchema):
            return AffineSchema(_first_witness_schema_complement(c.space, cells.template))
        raise PullbackNotRepresentable("disjointify of chained schema families")

    # rank >= 2: the classical nested-difference expansion
    children = normalize_family(c.children)
    if not family_is_finite(children):
        raise PullbackNotRepresentable("disjointify over schema children")
    items, _ = family_instances(children, 0, instantiate)
    pieces: list[BorelCode] = []
    piece_fams = [disjointify(ch, max_rank) for ch in items]
    for k, ck in enumerate(items):
        # term_k = (inter_{j<k} B_j) minus B_k, split along the pieces of
        # each ~B_j = union_l P_{j,l}
        if not all(isinstance(pf, FiniteList) for pf in piece_fams[:k]):
            raise PullbackNotRepresentable("schema pieces inside a difference")
        tuples: list[list[BorelCode]] = [[]]
        for pf in piece_fams[:k]:
            tuples = [t + [d] for t in tuples for d in pf.items]
        for t in tuples:
            # ~piece = union_j rho(D_{j,l_j}) union ~B_k, and ~B_k = rho(c_k)
            pieces.append(bool_code("union", t + [ck]) if t else ck)
    return FiniteList(tuple(pieces))


def _first_witness_schema_piece(space: SpaceDesc, tmpl: Cylinder) -> Cylinder:
    """For templates W . wildcard-run(i+b) . letter over a binary factor,
    the first-witness difference C(i) \\ union_{j<i} C(j) is the single
    pattern W . wildcard^b . (1-letter)^i . letter."""
    w0, b, probe = _tail_probe_shape(space, tmpl)
    return Cylinder(
        space,
        (
            (
                Const(w0),
                Run(None, aff(b)),
                Run(1 - probe, Aff.var(0)),
                Const((probe,)),
            ),
        ),
    )


def _tail_probe_shape(space: SpaceDesc, tmpl: Cylinder):
    if tmpl.empty or len(space.factors) != 1 or not isinstance(space.factors[0], Fin):
        raise PullbackNotRepresentable("schema disjointify shape")
    if space.factors[0].size != 2:
        raise PullbackNotRepresentable("schema disjointify needs a binary factor")
    segs = tmpl.constraints[0]
    segs = tuple(s for s in segs if not (isinstance(s, Const) and not s.entries))
    w0: tuple[int | None, ...] = ()
    if len(segs) == 3 and isinstance(segs[0], Const):
        w0, segs = segs[0].entries, segs[1:]
    if (
        len(segs) == 2
        and isinstance(segs[0], Run)
        and segs[0].entry is None
        and isinstance(segs[1], Const)
        and len(segs[1].entries) == 1
        and segs[1].entries[0] is not None
        and segs[0].length.coeffs == ((0, 1),)
    ):
        return w0, segs[0].length.const, segs[1].entries[0]
    raise PullbackNotRepresentable("schema disjointify shape")


def _first_witness_schema_complement(space: SpaceDesc, tmpl: Cylinder) -> Basic:
    """Rank-1 code D(i) with ~rho(D(i)) = the i-th first-witness piece.

    With W the constant prefix, B = |W| + b the probe base and l the
    probed letter, the complement of a piece is covered by the W-flips,
    by "the probe at B+i is not l", and by "some earlier probe t < i and
    the probe at B+i are both l" (a schema over t whose instances go void
    once the wildcard gap i-t-1 turns negative).
    """
    w0, b, probe = _tail_probe_shape(space, tmpl)
    base = len(w0) + b
    flips = cylinder_complement_patterns(
        Cylinder(space, ((Const(w0),),))
    )
    not_at_i = Cylinder(
        space, ((Run(None, Aff.var(0, 1, base)), Const((1 - probe,))),)
    )
    earlier = Cylinder(
        space,
        (
            (
                Run(None, Aff.var(0, 1, base)),  # wildcards through B+t-1
                Const((probe,)),
                Run(None, Aff(-1, ((0, -1), (1, 1)))),  # i - t - 1 wildcards
                Const((probe,)),
            ),
        ),
    )
    fam = chain(
        FiniteList(tuple(flips) + (not_at_i,)),
        AffineSchema(earlier),
    )
    return Basic(space, fam)


# ---------------------------------------------------------------------------
# universal sets and diagonalization


def universal_code(n: int, max_rank: int = DEFAULT_MAX_RANK) -> UniversalCode:
    if n < 1:
        raise ValueError("rank must be >= 1")
    if n > max_rank:
        raise RankTooLarge(f"rank {n} exceeds the configured bound {max_rank}")
    return UniversalCode(n)


def diagonal_set(n: int, max_rank: int = DEFAULT_MAX_RANK) -> DiagonalCode:
    if n < 1:
        raise ValueError("rank must be >= 1")
    if n > max_rank:
        raise RankTooLarge(f"rank {n} exceeds the configured bound {max_rank}")
    return DiagonalCode(n)


def diagonal_point(beta: UPWord) -> UPWord:
    """The interleaving x with x(2k) = x(2k+1) = beta(k)."""
    return interleave(beta, beta)


# ---------------------------------------------------------------------------
# canonical example codes


def p_infty_sigma_code() -> UnionCompl:
    """The canonical rank-2 complement-form presentation of P-infinity:
    it denotes the words with finitely many ones, so the set of words
    with infinitely many ones is exactly its complement."""
    inner = Basic(
        CANTOR,
        AffineSchema(
            Cylinder(
                CANTOR,
                ((Run(None, Aff(0, ((0, 1), (1, 1)))), Const((1,))),),
            )
        ),
    )
    return UnionCompl(CANTOR, AffineSchema(inner))


def p_infty_code() -> BorelCode:
    """A code denoting P-infinity itself (one complement above the
    rank-2 presentation; the set is properly Pi-0-2)."""
    return complement_code(p_infty_sigma_code())


def zero_tail_child(k: int) -> Basic:
    """Rank-1 code for "some position >= k holds a 1" (concrete k)."""
    return Basic(
        CANTOR,
        AffineSchema(
            Cylinder(CANTOR, ((Run(None, Aff.var(0, 1, k)), Const((1,))),))
        ),
    )


# ---------------------------------------------------------------------------
# JSON serialization


def _aff_to_json(e: Aff):
    if e.is_const:
        return e.const
    return {"b": e.const, "terms": [[i, c] for i, c in e.coeffs]}


def _aff_from_json(j) -> Aff:
    if isinstance(j, int):
        return Aff(j)
    return Aff(j["b"], tuple((int(i), int(c)) for i, c in j["terms"]))


def _pattern_to_json(p: Pattern):
    if pattern_is_concrete(p):
        entries = pattern_entries(p)
        return "".join("_" if e is None else str(e) for e in entries)
    segs = []
    for s in p:
        if isinstance(s, Const):
            segs.append(
                {"const": "".join("_" if e is None else str(e) for e in s.entries)}
            )
        else:
            segs.append(
                {
                    "run": "_" if s.entry is None else str(s.entry),
                    "len": _aff_to_json(s.length),
                }
            )
    return {"segs": segs}


def _pattern_from_json(j) -> Pattern:
    if isinstance(j, str):
        return pattern_from_entries(
            tuple(None if ch == "_" else int(ch) for ch in j)
        )
    segs: list = []
    for s in j["segs"]:
        if "const" in s:
            segs.append(
                Const(tuple(None if ch == "_" else int(ch) for ch in s["const"]))
            )
        else:
            segs.append(
                Run(
                    None if s["run"] == "_" else int(s["run"]),
                    _aff_from_json(s["len"]),
                )
            )
    return tuple(segs)


def _space_to_json(sp: SpaceDesc):
    out = []
    for f in sp.factors:
        if isinstance(f, Fin):
            out.append(f.size)
        elif isinstance(f, Baire):
            out.append("baire")
        else:
            out.append("nat")
    return out


def _space_from_json(j) -> SpaceDesc:
    fs: list = []
    for x in j:
        if isinstance(x, int):
            fs.append(Fin(x))
        elif x == "baire":
            fs.append(Baire())
        elif x == "nat":
            fs.append(Nat())
        else:
            raise ValueError(f"bad factor {x!r}")
    return SpaceDesc(tuple(fs))


def _cyl_to_json(cyl: Cylinder):
    if cyl.empty:
        return {"empty": True}
    prefix = []
    nat = []
    for f, c in zip(cyl.space.factors, cyl.constraints):
        if isinstance(f, Nat):
            nat.append(None if c is None else _aff_to_json(c))
        else:
            prefix.append(_pattern_to_json(c))
    out: dict = {"prefix": prefix}
    if nat:
        out["nat"] = nat
    return out


def _cyl_from_json(j, space: SpaceDesc) -> Cylinder:
    if j.get("empty"):
        return empty_cylinder(space)
    prefix = list(j.get("prefix", ()))
    nat = list(j.get("nat", ()))
    cs: list = []
    for f in space.factors:
        if isinstance(f, Nat):
            v = nat.pop(0)
            cs.append(None if v is None else _aff_from_json(v))
        else:
            cs.append(_pattern_from_json(prefix.pop(0)))
    return Cylinder(space, tuple(cs))


def _family_to_json(fam: CodeFamily, item_to_json):
    fam = normalize_family(fam)
    if isinstance(fam, FiniteList):
        return {"finite": [item_to_json(x) for x in fam.items]}
    if isinstance(fam, AffineSchema):
        return {"affine": {"template": item_to_json(fam.template), "var": "i"}}
    return {"chain": [_family_to_json(p, item_to_json) for p in fam.parts]}


def _family_from_json(j, item_from_json) -> CodeFamily:
    if "finite" in j:
        return FiniteList(tuple(item_from_json(x) for x in j["finite"]))
    if "affine" in j:
        return AffineSchema(item_from_json(j["affine"]["template"]))
    return Chain(tuple(_family_from_json(p, item_from_json) for p in j["chain"]))


def code_to_json(code: BorelCode):
    if isinstance(code, UniversalCode):
        return {"kind": "universal", "n": code.n}
    if isinstance(code, DiagonalCode):
        return {"kind": "diagonal", "n": code.n}
    sp = _space_to_json(code.space)
    if isinstance(code, Basic):
        return {
            "space": sp,
            "kind": "basic",
            "family": _family_to_json(code.cells, _cyl_to_json),
        }
    return {
        "space": sp,
        "kind": "unioncompl",
        "family": _family_to_json(code.children, code_to_json),
    }


def code_from_json(j) -> BorelCode:
    kind = j["kind"]
    if kind == "universal":
        return UniversalCode(j["n"])
    if kind == "diagonal":
        return DiagonalCode(j["n"])
    space = _space_from_json(j["space"])
    if kind == "basic":
        return Basic(space, _family_from_json(j["family"], lambda x: _cyl_from_json(x, space)))
    if kind == "unioncompl":
        return UnionCompl(space, _family_from_json(j["family"], code_from_json))
    raise ValueError(f"bad code kind {kind!r}")


def dumps_code(code: BorelCode) -> str:
    return json.dumps(code_to_json(code), sort_keys=True, separators=(",", ":"))


def loads_code(text: str) -> BorelCode:
    return code_from_json(json.loads(text))
