"""Described spaces, affine pattern cylinders, and coded basic neighborhoods.

A space is a product of factors: Fin(k) for k-letter sequence spaces,
Baire for omega^omega, Nat for a discrete omega factor.  A cylinder
constrains each sequence factor by a pattern (a word over letters and
wildcards, possibly with runs whose lengths are affine in enclosing
schema variables) and each Nat factor by an exact value or a wildcard.

Patterns with wildcards are the one liberalization over plain prefixes:
they are what lets rank-1 codes express position constraints such as
"the letter at index n is 1", which the standard presentations of the
tail sets behind P-infinity need.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .words import (
    Alphabet,
    ProductPoint,
    SpaceMismatch,
    UPWord,
    seq_at,
)


# ---------------------------------------------------------------------------
# factors and spaces


@dataclass(frozen=True)
class Fin:
    size: int

    def alphabet(self) -> Alphabet:
        return Alphabet(self.size)


@dataclass(frozen=True)
class Baire:
    def alphabet(self) -> Alphabet:
        return Alphabet(None)


@dataclass(frozen=True)
class Nat:
    pass


Factor = Fin | Baire | Nat


@dataclass(frozen=True)
class SpaceDesc:
    factors: tuple[Factor, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a space needs at least one factor")

    def __len__(self):
        return len(self.factors)

    def __mul__(self, other: "SpaceDesc") -> "SpaceDesc":
        return SpaceDesc(self.factors + other.factors)

    def is_type_le_1(self) -> bool:
        return True  # all our factors are omega, 2^omega-like, or omega^omega

    def single_finite_factor(self) -> Fin:
        if len(self.factors) == 1 and isinstance(self.factors[0], Fin):
            return self.factors[0]
        raise SpaceMismatch("expected a single finite-alphabet sequence factor")


CANTOR = SpaceDesc((Fin(2),))
CANTOR2 = SpaceDesc((Fin(2), Fin(2)))
FOUR = SpaceDesc((Fin(4),))
BAIRE = SpaceDesc((Baire(),))


def space_of_size(k: int) -> SpaceDesc:
    return SpaceDesc((Fin(k),))


# ---------------------------------------------------------------------------
# affine expressions in schema variables
#
# Variables are de Bruijn style: index 0 is the innermost enclosing
# AffineSchema.  Instantiating a schema at value n substitutes index 0
# and shifts the remaining variables down.


@dataclass(frozen=True)
class Aff:
    const: int = 0
    coeffs: tuple[tuple[int, int], ...] = ()  # sorted (var_index, coeff), coeff != 0

    @staticmethod
    def of(const: int, **kw) -> "Aff":
        return Aff(const)

    @staticmethod
    def var(index: int = 0, coeff: int = 1, const: int = 0) -> "Aff":
        if coeff == 0:
            return Aff(const)
        return Aff(const, ((index, coeff),))

    @property
    def is_const(self) -> bool:
        return not self.coeffs

    def value(self) -> int:
        if self.coeffs:
            raise ValueError("affine expression still has free variables")
        return self.const

    def subst(self, value: int, index: int = 0) -> "Aff":
        """Substitute the variable at `index` and shift deeper ones down."""
        const = self.const
        out = []
        for idx, c in self.coeffs:
            if idx == index:
                const += c * value
            elif idx > index:
                out.append((idx - 1, c))
            else:
                out.append((idx, c))
        return Aff(const, tuple(out))

    def shift(self, by: int = 1) -> "Aff":
        return Aff(self.const, tuple((i + by, c) for i, c in self.coeffs))

    def add_const(self, d: int) -> "Aff":
        return Aff(self.const + d, self.coeffs)

    def compose_inner(self, a: int, b: int) -> "Aff":
        """Reindex the innermost variable i := a*j + b."""
        const = self.const
        out = []
        for idx, c in self.coeffs:
            if idx == 0:
                const += c * b
                if c * a:
                    out.append((0, c * a))
            else:
                out.append((idx, c))
        return Aff(const, tuple(sorted(out)))

    def mentions(self, index: int) -> bool:
        return any(i == index for i, _ in self.coeffs)

    def __str__(self):
        parts = [f"{c}*i{i}" for i, c in self.coeffs]
        parts.append(str(self.const))
        return "+".join(parts)


def aff(x) -> Aff:
    if isinstance(x, Aff):
        return x
    return Aff(int(x))


# ---------------------------------------------------------------------------
# patterns
#
# A pattern is a tuple of segments.  Const segments carry concrete
# entries (letters or None wildcards); Run segments repeat one entry an
# affine number of times.


@dataclass(frozen=True)
class Const:
    entries: tuple[int | None, ...]


@dataclass(frozen=True)
class Run:
    entry: int | None
    length: Aff


Segment = Const | Run
Pattern = tuple[Segment, ...]


def pat(*segs) -> Pattern:
    """Pattern from a mix of strings ('10', '_' wildcard), (entry, len) runs."""
    out: list[Segment] = []
    for s in segs:
        if isinstance(s, (Const, Run)):
            out.append(s)
        elif isinstance(s, str):
            out.append(Const(tuple(None if ch == "_" else int(ch) for ch in s)))
        elif isinstance(s, tuple) and len(s) == 2:
            entry, ln = s
            out.append(Run(entry, aff(ln)))
        else:
            raise TypeError(f"bad pattern piece {s!r}")
    return tuple(out)


def pattern_is_concrete(p: Pattern) -> bool:
    return all(isinstance(s, Const) or s.length.is_const for s in p)


def pattern_subst(p: Pattern, value: int, index: int = 0) -> Pattern:
    return tuple(
        s if isinstance(s, Const) else Run(s.entry, s.length.subst(value, index))
        for s in p
    )


def pattern_shift_vars(p: Pattern, by: int = 1) -> Pattern:
    return tuple(
        s if isinstance(s, Const) else Run(s.entry, s.length.shift(by)) for s in p
    )


def pattern_entries(p: Pattern) -> tuple[int | None, ...]:
    """Expand a concrete pattern into per-position entries."""
    out: list[int | None] = []
    for s in p:
        if isinstance(s, Const):
            out.extend(s.entries)
        else:
            n = s.length.value()
            if n < 0:
                raise ValueError("negative run length")
            out.extend([s.entry] * n)
    # trailing wildcards constrain nothing
    while out and out[-1] is None:
        out.pop()
    return tuple(out)


def pattern_from_entries(entries: Sequence[int | None]) -> Pattern:
    return (Const(tuple(entries)),) if entries else ()


def pattern_depth(p: Pattern) -> int:
    return len(pattern_entries(p))


# ---------------------------------------------------------------------------
# cylinders


@dataclass(frozen=True)
class Cylinder:
    """A basic set of a product space; `empty` marks the distinguished
    empty cylinder.  constraints[i] is a Pattern for sequence factors and
    an Aff | None for Nat factors."""

    space: SpaceDesc
    constraints: tuple
    empty: bool = False

    def __post_init__(self):
        if self.empty:
            return
        if len(self.constraints) != len(self.space.factors):
            raise SpaceMismatch("one constraint per factor")

    def is_concrete(self) -> bool:
        if self.empty:
            return True
        for f, c in zip(self.space.factors, self.constraints):
            if isinstance(f, Nat):
                if c is not None and not c.is_const:
                    return False
            else:
                if not pattern_is_concrete(c):
                    return False
        return True

    def subst(self, value: int, index: int = 0) -> "Cylinder":
        if self.empty:
            return self
        cs = []
        for f, c in zip(self.space.factors, self.constraints):
            if isinstance(f, Nat):
                cs.append(None if c is None else c.subst(value, index))
            else:
                cs.append(pattern_subst(c, value, index))
        return Cylinder(self.space, tuple(cs))

    def depth(self) -> int:
        if self.empty:
            return 0
        d = 0
        for f, c in zip(self.space.factors, self.constraints):
            if not isinstance(f, Nat):
                d = max(d, pattern_depth(c))
        return d


def empty_cylinder(space: SpaceDesc) -> Cylinder:
    return Cylinder(space, (), empty=True)


def full_cylinder(space: SpaceDesc) -> Cylinder:
    cs = []
    for f in space.factors:
        cs.append(None if isinstance(f, Nat) else ())
    return Cylinder(space, tuple(cs))


def prefix_cylinder(space: SpaceDesc, *prefixes) -> Cylinder:
    """Cylinder from per-factor prefix strings/patterns (Nat: int or None)."""
    cs = []
    for f, p in zip(space.factors, prefixes):
        if isinstance(f, Nat):
            cs.append(None if p is None else aff(p))
        elif isinstance(p, str):
            cs.append(pat(p))
        elif isinstance(p, tuple) and all(isinstance(s, (Const, Run)) for s in p):
            cs.append(p)
        else:
            cs.append(pattern_from_entries(tuple(p)))
    return Cylinder(space, tuple(cs))


def cylinder_match(cyl: Cylinder, x: ProductPoint) -> bool:
    """Exact membership of a point in a concrete cylinder."""
    if cyl.empty:
        return False
    if len(x) != len(cyl.space.factors):
        raise SpaceMismatch("point arity differs from space arity")
    for f, c, comp in zip(cyl.space.factors, cyl.constraints, x.components):
        if isinstance(f, Nat):
            if c is not None and c.value() != comp:
                return False
        else:
            for n, e in enumerate(pattern_entries(c)):
                if e is not None and comp(n) != e:
                    return False
    return True


def cylinder_intersect(a: Cylinder, b: Cylinder) -> Cylinder:
    """Meet of two concrete cylinders (possibly Empty)."""
    if a.space != b.space:
        raise SpaceMismatch("cylinder spaces differ")
    if a.empty or b.empty:
        return empty_cylinder(a.space)
    cs = []
    for f, ca, cb in zip(a.space.factors, a.constraints, b.constraints):
        if isinstance(f, Nat):
            if ca is None:
                cs.append(cb)
            elif cb is None or ca.value() == cb.value():
                cs.append(ca)
            else:
                return empty_cylinder(a.space)
        else:
            ea, eb = pattern_entries(ca), pattern_entries(cb)
            n = max(len(ea), len(eb))
            merged: list[int | None] = []
            for i in range(n):
                x = ea[i] if i < len(ea) else None
                y = eb[i] if i < len(eb) else None
                if x is None:
                    merged.append(y)
                elif y is None or x == y:
                    merged.append(x)
                else:
                    return empty_cylinder(a.space)
            cs.append(pattern_from_entries(merged))
    return Cylinder(a.space, tuple(cs))


def cylinder_complement_patterns(cyl: Cylinder) -> list[Cylinder]:
    """The complement of a concrete cylinder over finite-alphabet factors,
    as a finite list of cylinders (one per flipped constrained position)."""
    if cyl.empty:
        return [full_cylinder(cyl.space)]
    out: list[Cylinder] = []
    flat: list[tuple[int, int, int]] = []  # (factor, position, letter) / Nat: (f, -1, v)
    for fi, (f, c) in enumerate(zip(cyl.space.factors, cyl.constraints)):
        if isinstance(f, Nat):
            if c is not None:
                flat.append((fi, -1, c.value()))
        else:
            for n, e in enumerate(pattern_entries(c)):
                if e is not None:
                    flat.append((fi, n, e))
    for t, (fi, n, e) in enumerate(flat):
        f = cyl.space.factors[fi]
        if isinstance(f, Nat) or not isinstance(f, Fin):
            raise SpaceMismatch("finite complement needs finite-alphabet factors")
        for other in range(f.size):
            if other == e:
                continue
            cs = []
            for fj, fac in enumerate(cyl.space.factors):
                if isinstance(fac, Nat):
                    v = None
                    for (fi2, n2, e2) in flat[:t]:
                        if fi2 == fj and n2 == -1:
                            v = aff(e2)
                    cs.append(v)
                else:
                    ent: dict[int, int] = {}
                    for (fi2, n2, e2) in flat[:t]:
                        if fi2 == fj and n2 >= 0:
                            ent[n2] = e2
                    if fj == fi:
                        ent[n] = other
                    size = max(ent) + 1 if ent else 0
                    cs.append(
                        pattern_from_entries(
                            tuple(ent.get(i) for i in range(size))
                        )
                    )
            out.append(Cylinder(cyl.space, tuple(cs)))
    return out


# ---------------------------------------------------------------------------
# the integer-coded basic neighborhoods N(X, k)


def mu_parts(a: int, b: int) -> int:
    """Least l with 1/(l+1) < a/b (0 when a = 0)."""
    if a == 0:
        return 0
    q = Fraction(a, b)
    l = 0
    while Fraction(1, l + 1) >= q:
        l += 1
    return l


def mu_of(k: int) -> int:
    """Prefix length of the coded neighborhood N(X, k)."""
    return mu_parts(seq_at(seq_at(k, 1), 1), seq_at(seq_at(k, 1), 2) + 1)


def sg(n: int) -> int:
    return 0 if n == 0 else 1


def nbhd_from_parts(space: SpaceDesc, code: int, a: int, b: int) -> Cylinder:
    """The neighborhood with radius data a/b and prefix data `code`
    (i.e. N(X, k) for any k whose second component decodes to
    (code, a, b-1))."""
    if len(space.factors) != 1 or isinstance(space.factors[0], Nat):
        raise SpaceMismatch("basic_nbhd works on a single sequence factor")
    factor = space.factors[0]
    if a == 0:
        return empty_cylinder(space)
    letters = []
    for j in range(mu_parts(a, b)):
        c = seq_at(code, j)
        if isinstance(factor, Fin):
            c = sg(c) if factor.size == 2 else c % factor.size
        letters.append(c)
    return Cylinder(space, (pattern_from_entries(tuple(letters)),))


def basic_nbhd(space: SpaceDesc, k: int) -> Cylinder:
    """N(X, k) for X in {2^omega, omega^omega}: Empty when the coded
    radius numerator is zero, else the cylinder fixing the first mu(k)
    letters (through sg on 2^omega)."""
    t = seq_at(k, 1)
    return nbhd_from_parts(space, seq_at(t, 0), seq_at(t, 1), seq_at(t, 2) + 1)


def nbhd_letters(k: int, binary: bool) -> tuple[int, ...] | None:
    """The concrete prefix constrained by N(X, k); None when Empty."""
    if seq_at(seq_at(k, 1), 1) == 0:
        return None
    code = seq_at(seq_at(k, 1), 0)
    out = []
    for j in range(mu_of(k)):
        c = seq_at(code, j)
        out.append(sg(c) if binary else c)
    return tuple(out)
