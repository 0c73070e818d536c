"""Alphabets, finite words, ultimately periodic words, and integer codings.

Letters are plain naturals.  Words over alphabets of size <= 4 render as
character strings '0'..'3'; wider (or unbounded) alphabets render as
comma-separated decimal tokens.  An ultimately periodic word u|v denotes
the infinite word u v v v ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence


class NotAPrefix(ValueError):
    """s is not a prefix of the given infinite word."""


class SpaceMismatch(ValueError):
    """A point or word does not inhabit the expected space."""


# ---------------------------------------------------------------------------
# alphabets and finite words


@dataclass(frozen=True)
class Alphabet:
    """Letters are naturals < size; size=None means unbounded (an omega factor)."""

    size: int | None = 2

    def __post_init__(self):
        if self.size is not None and self.size < 2:
            raise ValueError("alphabet size must be >= 2 (or None for unbounded)")

    @property
    def bounded(self) -> bool:
        return self.size is not None

    def check(self, letter: int) -> None:
        if letter < 0 or (self.size is not None and letter >= self.size):
            raise SpaceMismatch(f"letter {letter} outside alphabet of size {self.size}")


BINARY = Alphabet(2)
TERNARY = Alphabet(3)
QUATERNARY = Alphabet(4)
OMEGA = Alphabet(None)


def _fmt_letters(letters: Sequence[int], alphabet: Alphabet) -> str:
    if alphabet.bounded and alphabet.size <= 4:
        return "".join(str(c) for c in letters)
    return ",".join(str(c) for c in letters)


def _parse_letters(text: str, alphabet: Alphabet) -> tuple[int, ...]:
    if not text:
        return ()
    if "," in text or not (alphabet.bounded and alphabet.size <= 4):
        return tuple(int(tok) for tok in text.split(",") if tok != "")
    return tuple(int(ch) for ch in text)


@dataclass(frozen=True)
class FiniteWord:
    alphabet: Alphabet
    letters: tuple[int, ...]

    def __post_init__(self):
        for c in self.letters:
            self.alphabet.check(c)

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "FiniteWord") -> "FiniteWord":
        if other.alphabet != self.alphabet:
            raise SpaceMismatch("concatenation across alphabets")
        return FiniteWord(self.alphabet, self.letters + other.letters)

    def is_prefix_of(self, other: "FiniteWord") -> bool:
        return self.letters == other.letters[: len(self.letters)]

    def __str__(self):
        return _fmt_letters(self.letters, self.alphabet)


def fword(letters: Iterable[int] | str, alphabet: Alphabet = BINARY) -> FiniteWord:
    if isinstance(letters, str):
        return FiniteWord(alphabet, _parse_letters(letters, alphabet))
    return FiniteWord(alphabet, tuple(letters))


# ---------------------------------------------------------------------------
# ultimately periodic words


def _minimal_period(v: tuple[int, ...]) -> tuple[int, ...]:
    # shortest w with v = w^k, via the KMP failure function
    n = len(v)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and v[i] != v[k]:
            k = fail[k - 1]
        if v[i] == v[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return v[:p] if n % p == 0 else v


@dataclass(frozen=True)
class UPWord:
    """Canonical form of u v^omega: minimal period, then minimal transient."""

    alphabet: Alphabet
    transient: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")
        for c in self.transient + self.period:
            self.alphabet.check(c)
        v = _minimal_period(self.period)
        u = list(self.transient)
        vv = list(v)
        # roll the transient back into the period while the tail letters agree
        while u and u[-1] == vv[-1]:
            u.pop()
            vv.insert(0, vv.pop())
        object.__setattr__(self, "transient", tuple(u))
        object.__setattr__(self, "period", tuple(vv))

    def __call__(self, n: int) -> int:
        if n < len(self.transient):
            return self.transient[n]
        return self.period[(n - len(self.transient)) % len(self.period)]

    def prefix(self, n: int) -> FiniteWord:
        return FiniteWord(self.alphabet, tuple(self(i) for i in range(n)))

    def __str__(self):
        return "%s|%s" % (
            _fmt_letters(self.transient, self.alphabet),
            _fmt_letters(self.period, self.alphabet),
        )


def upword(text_or_transient, period=None, alphabet: Alphabet = BINARY) -> UPWord:
    """Build a UPWord from "u|v" text or from explicit transient/period parts."""
    if period is None:
        text = text_or_transient
        if "|" not in text:
            raise ValueError('UPWord text must look like "u|v"')
        u_txt, v_txt = text.split("|", 1)
        return UPWord(alphabet, _parse_letters(u_txt, alphabet), _parse_letters(v_txt, alphabet))
    u = text_or_transient
    if isinstance(u, str):
        u = _parse_letters(u, alphabet)
    if isinstance(period, str):
        period = _parse_letters(period, alphabet)
    return UPWord(alphabet, tuple(u), tuple(period))


def constant_word(letter: int, alphabet: Alphabet = BINARY) -> UPWord:
    return UPWord(alphabet, (), (letter,))


@dataclass(frozen=True)
class ProgramWord:
    """An infinite word given by a total, pure letter generator.

    Equality of program words is not provided; callers compare prefixes
    under a budget.
    """

    alphabet: Alphabet
    generator: Callable[[int], int]
    label: str = field(default="", compare=False)

    def __call__(self, n: int) -> int:
        c = self.generator(n)
        self.alphabet.check(c)
        return c

    def prefix(self, n: int) -> FiniteWord:
        return FiniteWord(self.alphabet, tuple(self(i) for i in range(n)))

    def __str__(self):
        return f"<program word {self.label or hex(id(self.generator))}>"


InfiniteWord = UPWord | ProgramWord


@dataclass(frozen=True)
class ProductPoint:
    """A point of a product space: UP/program words and naturals, one per factor."""

    components: tuple

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]


def point(*components) -> ProductPoint:
    return ProductPoint(tuple(components))


# ---------------------------------------------------------------------------
# the integer codings


_PRIMES_CACHE = [2, 3, 5, 7, 11, 13]


def _prime(i: int) -> int:
    while len(_PRIMES_CACHE) <= i:
        c = _PRIMES_CACHE[-1] + 2
        while any(c % p == 0 for p in _PRIMES_CACHE if p * p <= c):
            c += 2
        _PRIMES_CACHE.append(c)
    return _PRIMES_CACHE[i]


def seq_encode(t: Sequence[int]) -> int:
    """<t0,...,tl> = p0^(t0+1) ... pl^(tl+1); the empty sequence encodes as 1."""
    k = 1
    for i, ti in enumerate(t):
        k *= _prime(i) ** (ti + 1)
    return k


def _valuation(n: int, p: int) -> tuple[int, int]:
    """(e, n / p^e) with p^e the exact power of p dividing n; binary lifting
    keeps this usable on towers like 3^1000000."""
    if n % p != 0:
        return 0, n
    powers = [p]
    while True:
        sq = powers[-1] * powers[-1]
        if n % sq != 0:
            break
        powers.append(sq)
    e = 0
    for j in range(len(powers) - 1, -1, -1):
        if n % powers[j] == 0:
            n //= powers[j]
            e += 1 << j
    return e, n


def seq_decode(k: int) -> tuple[bool, int, tuple[int, ...]]:
    """Inverse of seq_encode on its range; (False, 0, ()) off-range.

    Off-range accessors read as 0, matching the "0 otherwise" convention
    used by seq_at.
    """
    if k < 1:
        return (False, 0, ())
    if k == 1:
        return (True, 0, ())
    comps = []
    i = 0
    rest = k
    while rest > 1:
        p = _prime(i)
        e, rest = _valuation(rest, p)
        if e == 0:
            return (False, 0, ())
        comps.append(e - 1)
        i += 1
    return (True, len(comps), tuple(comps))


def seq_at(k: int, i: int) -> int:
    """(k)_i: component accessor with the 0-default off range."""
    ok, n, comps = seq_decode(k)
    if ok and i < n:
        return comps[i]
    return 0


def seq_len(k: int) -> int:
    """lh(k): 0 when k is not a sequence code."""
    ok, n, _ = seq_decode(k)
    return n if ok else 0


def pair_encode(i: int, j: int) -> int:
    """The bijection omega^2 -> omega, (i, j) |-> 2^i (2j+1) - 1."""
    return (1 << i) * (2 * j + 1) - 1


def pair_decode(n: int) -> tuple[int, int]:
    m = n + 1
    i = (m & -m).bit_length() - 1
    return i, ((m >> i) - 1) // 2


def slice_word(gamma: InfiniteWord, i: int) -> InfiniteWord:
    """(gamma)_i(j) = gamma(pair_encode(i, j)).

    Slicing a UP word yields a UP word: the read positions form the
    arithmetic progression 2^(i+1) j + (2^i - 1), so the induced word is
    eventually periodic.
    """
    if isinstance(gamma, ProgramWord):
        return ProgramWord(
            gamma.alphabet,
            lambda j, g=gamma, i=i: g(pair_encode(i, j)),
            label=f"({gamma.label or 'w'})_{i}",
        )
    stride = 1 << (i + 1)
    offset = (1 << i) - 1
    lu, lv = len(gamma.transient), len(gamma.period)
    # first j landing in the periodic zone
    j0 = 0 if offset >= lu else -(-(lu - offset) // stride)
    per = lv // math.gcd(stride, lv)
    letters = [gamma(offset + j * stride) for j in range(j0 + per)]
    return UPWord(gamma.alphabet, tuple(letters[:j0]), tuple(letters[j0:]))


def shift(alpha: UPWord, s: FiniteWord | Sequence[int]) -> UPWord:
    """alpha - s: drop the prefix s (which must actually be a prefix)."""
    letters = tuple(s) if not isinstance(s, FiniteWord) else s.letters
    for n, c in enumerate(letters):
        if alpha(n) != c:
            raise NotAPrefix(f"{_fmt_letters(letters, alpha.alphabet)} is not a prefix")
    return shift_by(alpha, len(letters))


def shift_by(alpha: UPWord, k: int) -> UPWord:
    lu = len(alpha.transient)
    if k <= lu:
        return UPWord(alpha.alphabet, alpha.transient[k:], alpha.period)
    r = (k - lu) % len(alpha.period)
    v = alpha.period[r:] + alpha.period[:r]
    return UPWord(alpha.alphabet, (), v)


def interleave(alpha: UPWord, beta: UPWord) -> UPWord:
    """The word x with x(2k) = alpha(k) and x(2k+1) = beta(k)."""
    if alpha.alphabet != beta.alphabet:
        raise SpaceMismatch("interleave across alphabets")
    lu = max(len(alpha.transient), len(beta.transient))
    lv = (len(alpha.period) * len(beta.period)) // math.gcd(
        len(alpha.period), len(beta.period)
    )
    u = []
    for k in range(lu):
        u += [alpha(k), beta(k)]
    v = []
    for k in range(lu, lu + lv):
        v += [alpha(k), beta(k)]
    return UPWord(alpha.alphabet, tuple(u), tuple(v))


def deinterleave(x: UPWord) -> tuple[UPWord, UPWord]:
    """Split x into its even- and odd-position subwords (both UP)."""
    lu, lv = len(x.transient), len(x.period)
    half_v = lv if lv % 2 == 0 else 2 * lv
    k0 = (lu + 1) // 2
    evens = [x(2 * k) for k in range(k0 + half_v // 2)]
    odds = [x(2 * k + 1) for k in range(k0 + half_v // 2)]
    return (
        UPWord(x.alphabet, tuple(evens[:k0]), tuple(evens[k0:])),
        UPWord(x.alphabet, tuple(odds[:k0]), tuple(odds[k0:])),
    )


def words_equal_on(a: InfiniteWord, b: InfiniteWord, n: int) -> bool:
    return all(a(i) == b(i) for i in range(n))
