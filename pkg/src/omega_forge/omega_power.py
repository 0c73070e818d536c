"""The master construction: pair enumeration, rigid compact sets, the
dictionaries mu and pi, decomposition of shape words, the derived
transition system, and membership machinery for the omega-power of
A = mu union pi.

Alphabet conventions: dictionary words live over four letters
{0, 1, 2, 3}; 0 and 1 are the data letters, 2 and 3 the spacers that
build the rigid block shapes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .evaluator import Budget, Truth3, t3
from .words import (
    Alphabet,
    BINARY,
    FiniteWord,
    ProgramWord,
    QUATERNARY,
    UPWord,
    fword,
)


class LengthMismatch(ValueError):
    pass


class BadIndices(ValueError):
    pass


class NotInK(ValueError):
    pass


class NotMuWord(ValueError):
    pass


class NotInP(ValueError):
    pass


# ---------------------------------------------------------------------------
# the enumeration of equal-length binary pairs


def m_bound(j: int) -> int:
    """M_j = sum over i < j of 4^(i+1); the index of the last length-j pair."""
    return (4 ** (j + 1) - 4) // 3


def m_index(value: int) -> int | None:
    """j with M_j = value, else None."""
    j = 0
    while m_bound(j) < value:
        j += 1
    return j if m_bound(j) == value else None


def q_pair(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The n-th pair (beta side, alpha side); pairs are grouped by length
    and ordered lexicographically as sequences over 2x2."""
    if n == 0:
        return (), ()
    j = 1
    while m_bound(j) < n:
        j += 1
    offset = n - m_bound(j - 1) - 1
    digits = []
    for _ in range(j):
        digits.append(offset % 4)
        offset //= 4
    digits.reverse()
    return tuple(d >> 1 for d in digits), tuple(d & 1 for d in digits)


def q_index(s: Sequence[int], t: Sequence[int]) -> int:
    if len(s) != len(t):
        raise LengthMismatch("pair components must have equal length")
    j = len(s)
    if j == 0:
        return 0
    offset = 0
    for a, b in zip(s, t):
        offset = offset * 4 + (a << 1 | b)
    return m_bound(j - 1) + 1 + offset


def q_len(n: int) -> int:
    j = 0
    while m_bound(j) < n:
        j += 1
    return j


# ---------------------------------------------------------------------------
# transition trees (prefix-closed pair sets)


class TransitionTree:
    """contains(t, s) on equal-length binary tuples; closed under taking
    equal-length prefix pairs."""

    def contains(self, t: Sequence[int], s: Sequence[int]) -> bool:
        raise NotImplementedError

    def spec(self) -> dict:
        raise NotImplementedError


class FullTree(TransitionTree):
    def contains(self, t, s):
        return len(t) == len(s)

    def spec(self):
        return {"kind": "full"}


class DiagonalTree(TransitionTree):
    def contains(self, t, s):
        return len(t) == len(s) and tuple(t) == tuple(s)

    def spec(self):
        return {"kind": "diagonal"}


class ExplicitTree(TransitionTree):
    """A finite set of pairs, closed downward at construction; pairs
    beyond the listed ones are out."""

    def __init__(self, pairs: Iterable[tuple[tuple[int, ...], tuple[int, ...]]]):
        closed = set()
        for t, s in pairs:
            t, s = tuple(t), tuple(s)
            if len(t) != len(s):
                raise LengthMismatch("tree pairs must have equal length")
            for k in range(len(t) + 1):
                closed.add((t[:k], s[:k]))
        self.pairs = closed

    def contains(self, t, s):
        return (tuple(t), tuple(s)) in self.pairs

    def spec(self):
        items = sorted(
            ("".join(map(str, t)), "".join(map(str, s))) for t, s in self.pairs
        )
        return {"kind": "explicit", "pairs": items}


class FuncTree(TransitionTree):
    def __init__(self, fn: Callable[[tuple, tuple], bool], descr: str = "func"):
        self.fn = fn
        self.descr = descr

    def contains(self, t, s):
        return len(t) == len(s) and self.fn(tuple(t), tuple(s))

    def spec(self):
        return {"kind": self.descr}


def tree_from_spec(spec: dict) -> TransitionTree:
    kind = spec["kind"]
    if kind == "full":
        return FullTree()
    if kind == "diagonal":
        return DiagonalTree()
    if kind == "explicit":
        return ExplicitTree(
            (tuple(map(int, t)), tuple(map(int, s))) for t, s in spec["pairs"]
        )
    raise ValueError(f"bad tree kind {kind!r}")


def q_f(n: int, tree: TransitionTree) -> bool:
    """Accepting states: the beta side ends in 1 and the pair is in the tree."""
    t, s = q_pair(n)
    return len(t) > 0 and t[-1] == 1 and tree.contains(t, s)


def steps(n: int, m: int, tree: TransitionTree | None = None) -> list[int]:
    """Successors p of n on input m: the beta side grows by one free
    letter, the alpha side by m; optionally filtered by tree membership."""
    t, s = q_pair(n)
    out = []
    for a in (0, 1):
        t2, s2 = t + (a,), s + (m,)
        if tree is None or tree.contains(t2, s2):
            out.append(q_index(t2, s2))
    return out


# ---------------------------------------------------------------------------
# the rigid compact sets K_{N,j} and their coordinate maps


def _k_class(N: int, j: int, pos: int) -> tuple[str, int]:
    """('two'|'three'|'free', data_index) for each position of K_{N,j}."""
    if pos < N:
        return ("two", -1)
    if pos == N:
        return ("free", 0)
    p = N + 1
    i = 0
    while True:
        run = m_bound(j + i + 1)
        if pos < p + run:
            return ("two", -1)
        if pos == p + run:
            return ("three", -1)
        if pos < p + 2 * run + 1:
            return ("two", -1)
        if pos == p + 2 * run + 1:
            return ("free", i + 1)
        p += 2 * run + 2
        i += 1


def _data_position(N: int, j: int, i: int) -> int:
    """Position of the i-th data letter inside K_{N,j}."""
    if i == 0:
        return N
    p = N + 1
    for t in range(i - 1):
        p += 2 * m_bound(j + t + 1) + 2
    return p + 2 * m_bound(j + i) + 1


def k_member(N: int, j: int, w: FiniteWord | Sequence[int]) -> bool:
    """Prefix form: does the finite word extend to an element of K_{N,j}?
    (Decidable outright, since the shape pins every position.)"""
    if N > m_bound(j):
        raise BadIndices(f"need N <= M_j, got N={N}, M_{j}={m_bound(j)}")
    letters = tuple(w)
    for pos, c in enumerate(letters):
        cls, _ = _k_class(N, j, pos)
        if cls == "two" and c != 2:
            return False
        if cls == "three" and c != 3:
            return False
        if cls == "free" and c not in (0, 1):
            return False
    return True


def k_member_up(N: int, j: int, w: UPWord) -> bool:
    """Full membership of an ultimately periodic word: always false, since
    the spacer runs grow without bound while UP runs are bounded."""
    if N > m_bound(j):
        raise BadIndices(f"need N <= M_j, got N={N}, M_{j}={m_bound(j)}")
    return False


@dataclass(frozen=True)
class KWord(ProgramWord):
    """phi_{N,j}^(-1)(source): the K-shaped program word carrying its data."""

    N: int = 0
    j: int = 0
    source: object = None  # UPWord | ProgramWord over the binary alphabet


def phi_inv(N: int, j: int, alpha) -> KWord:
    if N > m_bound(j):
        raise BadIndices(f"need N <= M_j, got N={N}, M_{j}={m_bound(j)}")

    def gen(pos: int) -> int:
        cls, idx = _k_class(N, j, pos)
        if cls == "two":
            return 2
        if cls == "three":
            return 3
        return alpha(idx)

    return KWord(QUATERNARY, gen, label=f"phi_inv({N},{j})", N=N, j=j, source=alpha)


def phi(N: int, j: int, gamma) -> object:
    """The coordinate map: data letters of a K_{N,j} word, in order.

    Program words built by phi_inv hand back their source exactly; other
    words are read positionally, with the shape checked on the fly."""
    if N > m_bound(j):
        raise BadIndices(f"need N <= M_j, got N={N}, M_{j}={m_bound(j)}")
    if isinstance(gamma, KWord) and gamma.N == N and gamma.j == j:
        return gamma.source

    def gen(i: int) -> int:
        pos = _data_position(N, j, i)
        # certificate: verify the spacers up to the data position
        for p in range(max(0, pos - 2), pos):
            cls, _ = _k_class(N, j, p)
            c = gamma(p)
            if cls == "two" and c != 2:
                raise NotInK(f"position {p} should be a 2")
            if cls == "three" and c != 3:
                raise NotInK(f"position {p} should be a 3")
        c = gamma(pos)
        if c not in (0, 1):
            raise NotInK(f"data position {pos} holds {c}")
        return c

    return ProgramWord(BINARY, gen, label=f"phi({N},{j})")


# ---------------------------------------------------------------------------
# the dictionaries


def _parse_shape(letters: Sequence[int]):
    """Parse 2^N followed by blocks m 2^P 3 2^R; returns (N, blocks) or
    None when the word is not of the shape (blocks may be empty)."""
    i, n = 0, len(letters)
    while i < n and letters[i] == 2:
        i += 1
    N = i
    blocks = []
    while i < n:
        m = letters[i]
        if m not in (0, 1):
            return None
        i += 1
        p = 0
        while i < n and letters[i] == 2:
            p += 1
            i += 1
        if i >= n or letters[i] != 3:
            return None
        i += 1
        r = 0
        while i < n and letters[i] == 2:
            r += 1
            i += 1
        blocks.append((m, p, r))
    return N, blocks


def mu_parse(s: FiniteWord | Sequence[int]):
    """The unique canonical form (N, (m_i, P_i, R_i) blocks), or None."""
    parsed = _parse_shape(tuple(s))
    if parsed is None:
        return None
    N, blocks = parsed
    if len(blocks) < 2:
        return None
    if any(m_index(p) is None for (_, p, _) in blocks):
        return None
    return N, blocks


def mu_member(s: FiniteWord | Sequence[int]) -> tuple[bool, bool]:
    """(in mu0, in mu1): the second-to-last block breaks the run equality,
    or (failing that) the last inner run is not the next M value."""
    parsed = mu_parse(s)
    if parsed is None:
        return (False, False)
    _, blocks = parsed
    l = len(blocks) - 2
    _, p_l, r_l = blocks[l]
    _, p_l1, _ = blocks[l + 1]
    clause0 = p_l != r_l
    j = m_index(p_l)
    clause1 = p_l1 != m_bound(j + 1)
    return (clause0, clause1 and not clause0)


def in_mu(s: FiniteWord | Sequence[int]) -> bool:
    a, b = mu_member(s)
    return a or b


def _parse_pi_surface(letters: Sequence[int]):
    """Parse 2^A0 m0 2^B0 3 2^A1 m1 ... m_l 2^Bl 3 2^A(l+1); returns
    (A0, [(m_i, B_i)], A_last) or None."""
    i, n = 0, len(letters)
    if n == 0:
        return None
    while i < n and letters[i] == 2:
        i += 1
    a0 = i
    if i >= n:
        return None
    blocks = []
    interiors = []
    while True:
        m = letters[i]
        if m not in (0, 1):
            return None
        i += 1
        b = 0
        while i < n and letters[i] == 2:
            b += 1
            i += 1
        if i >= n or letters[i] != 3:
            return None
        i += 1
        r = 0
        while i < n and letters[i] == 2:
            r += 1
            i += 1
        blocks.append((m, b))
        if i >= n:
            return a0, blocks, interiors, r
        interiors.append(r)


def pi_member(s: FiniteWord | Sequence[int], tree: TransitionTree) -> bool:
    """Membership in pi: a layered run of the transition system whose
    written form merges the adjacent spacer runs; the final state must be
    accepting.  The search space is finite."""
    letters = tuple(s)
    parsed = _parse_pi_surface(letters)
    if parsed is None:
        return False
    a0, blocks, interiors, a_last = parsed
    l = len(blocks) - 1
    bs = [b for (_, b) in blocks]
    ms = [m for (m, _) in blocks]
    # B_0 = M_{j+1} pins j; interior runs must echo the preceding B
    j0 = m_index(bs[0])
    if j0 is None or j0 < 1:
        return False
    j = j0 - 1
    if a0 > m_bound(j):
        return False
    for i, b in enumerate(bs):
        if b != m_bound(j + i + 1):
            return False
    for i, r in enumerate(interiors):
        if r != bs[i]:
            return False
    p_last = bs[l] - a_last
    if p_last < 0:
        return False
    return _chain_ok(a0, ms, p_last, tree)


def _chain_ok(n0: int, ms: Sequence[int], p_last: int, tree: TransitionTree) -> bool:
    """Whether some transition chain n0 -> ... -> p_last reads ms.  The
    final pair determines the whole chain: predecessors are prefix pairs."""
    t, s = q_pair(p_last)
    t0, s0 = q_pair(n0)
    if len(t) != len(t0) + len(ms):
        return False
    if t[: len(t0)] != t0 or s[: len(s0)] != s0:
        return False
    if s[len(s0) :] != tuple(ms):
        return False
    return q_f(p_last, tree)


@dataclass
class Dict:
    """A set of finite words: total membership plus a length-bounded
    enumerator (exact: all members of length <= l)."""

    alphabet: Alphabet
    member: Callable[[tuple[int, ...]], bool]
    name: str = ""
    _enumerator: Callable[[int], list[tuple[int, ...]]] | None = None
    max_word_len: int | None = None  # None: unbounded / unknown
    tree: "TransitionTree | None" = None  # set on the mu/pi dictionaries

    def enumerate(self, max_len: int) -> list[tuple[int, ...]]:
        if self._enumerator is not None:
            return self._enumerator(max_len)
        out = []
        # length-lexicographic order
        level: list[tuple[int, ...]] = [()]
        for _ in range(max_len):
            nxt = []
            for w in level:
                for a in range(self.alphabet.size):
                    nxt.append(w + (a,))
            out.extend(w for w in nxt if self.member(w))
            level = nxt
        return out


def build_dictionary(tree: TransitionTree) -> Dict:
    """A = mu union pi for the given tree."""

    def member(w: tuple[int, ...]) -> bool:
        return in_mu(w) or pi_member(w, tree)

    return Dict(QUATERNARY, member, name="mu+pi", tree=tree)


def mu_dictionary() -> Dict:
    return Dict(QUATERNARY, lambda w: in_mu(w), name="mu")


def pi_dictionary(tree: TransitionTree) -> Dict:
    return Dict(QUATERNARY, lambda w: pi_member(w, tree), name="pi", tree=tree)


# ---------------------------------------------------------------------------
# suitable triples and the decomposition map


def suitable(t: Sequence[int], S: int, j: int) -> bool:
    """All three clauses, with the exponent in the third read as the
    first run length of K_{0,j} (namely M_{j+1})."""
    t = tuple(t)
    if t and not in_mu(t):
        raise NotMuWord("the first component must be empty or a mu word")
    if not t and S > m_bound(j):
        return False
    if t and t[-1] != 3:
        return False
    probe_run = m_bound(j + 1)
    for m in (0, 1):
        w = t + (2,) * S + (m,) + (2,) * probe_run + (3,)
        if in_mu(w):
            return False
    return True


@dataclass(frozen=True)
class Decomposition:
    kind: str  # 'mu_inf' | 'triple' | 'unknown'
    triple: tuple[tuple[int, ...], int, int] | None = None  # P-convention
    f_value: tuple[tuple[int, ...], int, int] | None = None  # paper's F output
    exact: bool = False


def _check_up_shape(gamma: UPWord) -> None:
    """Validate the full block shape of a UP word exactly (one block cycle
    suffices: blocks at equal phases repeat forever); NotInP on failure."""
    if all(c == 2 for c in gamma.period):
        raise NotInP("the word ends in an infinite spacer run")
    lu, lv = len(gamma.transient), len(gamma.period)
    run_bound = lu + 2 * lv + 2
    window = lu + (lv + 3) * (3 * run_bound + 6) + 16
    letters = [gamma(i) for i in range(window)]
    i, n = 0, len(letters)
    while i < n and letters[i] == 2:
        i += 1
    seen_phases: set[int] = set()
    while i < n:
        start = i
        m = letters[i]
        if m not in (0, 1):
            raise NotInP(f"letter {m} where a data letter is required")
        i += 1
        p = 0
        while i < n and letters[i] == 2:
            p += 1
            i += 1
        if i >= n:
            break
        if letters[i] != 3:
            raise NotInP("a data letter interrupts the spacer run")
        if m_index(p) is None:
            raise NotInP(f"run length {p} is not an M value")
        i += 1
        while i < n and letters[i] == 2:
            i += 1
        if start >= lu:
            phase = (start - lu) % lv
            if phase in seen_phases:
                return  # the cycle is fully validated
            seen_phases.add(phase)
    raise NotInP("no complete block cycle inside the analysis window")


def decompose(gamma, b: Budget) -> Decomposition:
    """The decomposition map on the shape set.

    Ultimately periodic shape words always fall on the mu-power side:
    their spacer runs are bounded, so the defect-free progression (whose
    run lengths grow strictly) cannot persist, and a defect inside the
    period recurs forever.  Program words get the prefix-certified
    triple."""
    if isinstance(gamma, UPWord):
        _check_up_shape(gamma)
        return Decomposition("mu_inf", exact=True)

    letters = tuple(gamma(i) for i in range(b.depth)) if not isinstance(
        gamma, (tuple, list, FiniteWord)
    ) else tuple(gamma)
    i, n = 0, len(letters)
    while i < n and letters[i] == 2:
        i += 1
    N = i
    blocks = []
    while i < n:
        m = letters[i]
        if m not in (0, 1):
            raise NotInP(f"letter {m} where a data letter is required")
        i += 1
        p = 0
        while i < n and letters[i] == 2:
            p += 1
            i += 1
        if i >= n:
            break
        if letters[i] != 3:
            raise NotInP("a data letter interrupts the spacer run")
        if m_index(p) is None:
            raise NotInP(f"run length {p} is not an M value")
        i += 1
        r = 0
        while i < n and letters[i] == 2:
            r += 1
            i += 1
        blocks.append((m, p, r))
    if len(blocks) < 1:
        return Decomposition("unknown")
    defects = [i for i in range(len(blocks) - 1) if _defect(blocks, i)]
    if not defects:
        j0 = m_index(blocks[0][1])
        if j0 is None or j0 < 1:
            return Decomposition("unknown")
        return Decomposition(
            "triple",
            triple=((), N, j0 - 1),
            f_value=((), N, j0),
        )
    l = max(defects)
    if l + 2 >= len(blocks):
        return Decomposition("unknown")
    j1 = m_index(blocks[l + 2][1])
    if j1 is None or j1 < 1:
        return Decomposition("unknown")
    t: tuple[int, ...] = (2,) * N
    for (m, p, r) in blocks[: l + 1]:
        t += (m,) + (2,) * p + (3,) + (2,) * r
    m_next, p_next, r_next = blocks[l + 1]
    t += (m_next,) + (2,) * p_next + (3,)
    S = r_next
    return Decomposition(
        "triple", triple=(t, S, j1 - 1), f_value=(t, S, j1)
    )


def _defect(blocks, i) -> bool:
    _, p_i, r_i = blocks[i]
    _, p_n, _ = blocks[i + 1]
    if p_i != r_i:
        return True
    j = m_index(p_i)
    return j is None or p_n != m_bound(j + 1)


# ---------------------------------------------------------------------------
# omega-power membership by decomposition search


def omega_power_member(d: Dict, w, b: Budget) -> Truth3:
    """Decomposition search.  Ultimately periodic inputs get the
    suffix-state closure (definite both ways at the given budget);
    program-word inputs only ever return True or Unknown."""
    if isinstance(w, UPWord):
        return _opm_up(d, w, b)
    if isinstance(w, KWord) and isinstance(w.source, UPWord):
        return _opm_kword(d, w, b)
    return _opm_prefix(d, w, b)


def _opm_up(d: Dict, w: UPWord, b: Budget) -> Truth3:
    lu, lv = len(w.transient), len(w.period)
    nstates = lu + lv

    def state(p: int) -> int:
        return p if p < lu else lu + (p - lu) % lv

    maxlen = b.depth if d.max_word_len is None else min(b.depth, d.max_word_len)
    edges: dict[int, set[int]] = {}
    seen = set()
    frontier = [state(0)]
    while frontier:
        st = frontier.pop()
        if st in seen:
            continue
        seen.add(st)
        base = st  # a representative position with this state
        outs = set()
        for ln in range(1, maxlen + 1):
            piece = tuple(w(base + t) for t in range(ln))
            if d.member(piece):
                outs.add(state(base + ln))
        edges[st] = outs
        frontier.extend(outs - seen)
    # a reachable cycle yields an infinite decomposition
    color: dict[int, int] = {}

    def has_cycle(u: int) -> bool:
        color[u] = 1
        for v in edges.get(u, ()):
            cv = color.get(v, 0)
            if cv == 1:
                return True
            if cv == 0 and has_cycle(v):
                return True
        color[u] = 2
        return False

    return t3(has_cycle(state(0)))


def _opm_prefix(d: Dict, w, b: Budget) -> Truth3:
    """Plain program words: a finite cover never certifies full
    membership and dictionary words may outgrow any figure, so the
    search can only fail to refute."""
    letters = tuple(w(i) for i in range(2 * b.depth))
    reach = {0}
    frontier = [0]
    while frontier:
        p = frontier.pop()
        for ln in range(1, min(b.depth, len(letters) - p) + 1):
            q = p + ln
            if q in reach:
                continue
            if d.member(letters[p:q]):
                reach.add(q)
                frontier.append(q)
    return Truth3.UNKNOWN


def _merge_rle(parts):
    out: list[list[int]] = []
    for letter, count in parts:
        if count <= 0:
            continue
        if out and out[-1][0] == letter:
            out[-1][1] += count
        else:
            out.append([letter, count])
    return out


def _pi_member_rle(rle, tree: TransitionTree) -> bool:
    """pi membership read off a run-length encoding (same logic as
    pi_member, without materializing the spacer runs)."""
    rle = _merge_rle(rle)
    if not rle:
        return False
    idx = 0
    a0 = 0
    if rle[idx][0] == 2:
        a0 = rle[idx][1]
        idx += 1
    blocks = []
    interiors = []
    a_last = None
    while idx < len(rle):
        m, cnt = rle[idx]
        if m not in (0, 1) or cnt != 1:
            return False
        idx += 1
        if idx >= len(rle) or rle[idx][0] != 2:
            return False
        bb = rle[idx][1]
        idx += 1
        if idx >= len(rle) or rle[idx][0] != 3 or rle[idx][1] != 1:
            return False
        idx += 1
        r = 0
        if idx < len(rle) and rle[idx][0] == 2:
            r = rle[idx][1]
            idx += 1
        blocks.append((m, bb))
        if idx >= len(rle):
            a_last = r
            break
        interiors.append(r)
    if a_last is None:
        return False
    l = len(blocks) - 1
    bs = [bb for (_, bb) in blocks]
    ms = [m for (m, _) in blocks]
    j0 = m_index(bs[0])
    if j0 is None or j0 < 1:
        return False
    j = j0 - 1
    if a0 > m_bound(j):
        return False
    for i, bb in enumerate(bs):
        if bb != m_bound(j + i + 1):
            return False
    for i, r in enumerate(interiors):
        if r != bs[i]:
            return False
    p_last = bs[l] - a_last
    if p_last < 0:
        return False
    return _chain_ok(a0, ms, p_last, tree)


def _opm_kword(d: Dict, w: KWord, b: Budget) -> Truth3:
    """Rigid-shape program words with ultimately periodic data admit a
    sound pumping certificate.

    A decomposition of such a word cuts inside the spacer run after some
    block's 3, handing the state index to the next piece.  If a piece
    links cut (i0, state t0) to cut (i1, t1) with i1 - i0 a multiple of
    the data period and t1 = t0 b, then repeating the extension b links
    (i1, t1) to (i1 + (i1-i0), t1 b) and so on: the data letters repeat
    and the spacer runs shift in lockstep, so verifying one unrolled
    instance certifies the whole tail.  True needs a reachable verified
    loop plus its first unrolling; otherwise the search is inconclusive."""
    if d.tree is None:
        return _opm_prefix(d, w, b)
    alpha: UPWord = w.source
    tree: TransitionTree = d.tree
    N, j = w.N, w.j
    ublocks, vblocks = len(alpha.transient), len(alpha.period)

    def L(t: int) -> int:
        return m_bound(j + t + 1)

    def s_side(i: int) -> tuple[int, ...]:
        # the alpha-side of any state at block i (q_N^1 then data letters)
        return q_pair(N)[1] + tuple(alpha(t) for t in range(i + 1))

    def start_piece(i: int, p_idx: int):
        parts = [(2, N)]
        for t in range(0, i + 1):
            parts.append((alpha(t), 1))
            parts.append((2, L(t)))
            parts.append((3, 1))
            if t < i:
                parts.append((2, L(t)))
        parts.append((2, L(i) - p_idx))
        return parts

    def between_piece(i0: int, p0_idx: int, i1: int, p1_idx: int):
        parts = [(2, p0_idx)]
        for t in range(i0 + 1, i1 + 1):
            parts.append((alpha(t), 1))
            parts.append((2, L(t)))
            parts.append((3, 1))
            if t < i1:
                parts.append((2, L(t)))
        parts.append((2, L(i1) - p1_idx))
        return parts

    def accepting_states(i: int) -> list[tuple[tuple[int, ...], int]]:
        s = s_side(i)
        out = []
        for bits in range(1 << len(s)):
            t = tuple((bits >> k) & 1 for k in range(len(s)))
            if t and t[-1] == 1 and tree.contains(t, s):
                out.append((t, q_index(t, s)))
        return out

    if ublocks + 3 * vblocks + len(q_pair(N)[1]) > 16:
        return Truth3.UNKNOWN  # the state enumeration would blow up

    for i0 in range(ublocks, ublocks + vblocks):
        for k in (1, 2):
            i1 = i0 + k * vblocks
            for (t0, p0) in accepting_states(i0):
                if not _pi_member_rle(start_piece(i0, p0), tree):
                    continue
                for (t1, p1) in accepting_states(i1):
                    if t1[: len(t0)] != t0:
                        continue
                    if not _pi_member_rle(between_piece(i0, p0, i1, p1), tree):
                        continue
                    # unroll once: the same extension one period further
                    ext = t1[len(t0) :]
                    t2 = t1 + ext
                    s2 = s_side(i1 + k * vblocks)
                    if not tree.contains(t2, s2):
                        continue
                    p2 = q_index(t2, s2)
                    if _pi_member_rle(
                        between_piece(i1, p1, i1 + k * vblocks, p2), tree
                    ):
                        return Truth3.TRUE
    return Truth3.UNKNOWN


# ---------------------------------------------------------------------------
# the transition system and its runs


@dataclass
class TransitionSystem:
    tree: TransitionTree
    initial: int = 0

    def accepting(self, n: int) -> bool:
        return q_f(n, self.tree)

    def step(self, n: int, m: int) -> list[int]:
        return steps(n, m, self.tree)


def ts_from(tree: TransitionTree) -> TransitionSystem:
    return TransitionSystem(tree)


def ts_run(ts: TransitionSystem, alpha, depth: int):
    """All runs of length <= depth on the word, with accepting-state
    counts (bounded check only)."""
    runs = [((ts.initial,), 0)]
    out = [runs[0]]
    for i in range(depth):
        m = alpha(i)
        nxt = []
        for (states, hits) in runs:
            for p in ts.step(states[-1], m):
                nxt.append((states + (p,), hits + (1 if ts.accepting(p) else 0)))
        runs = nxt
        out.extend(runs)
        if not runs:
            break
    return [r for r in out if len(r[0]) == depth + 1] or runs


def export_dot(tree: TransitionTree, depth: int) -> str:
    """The depth-k slice of the transition system in DOT form."""
    lines = ["digraph ts {", '  rankdir=LR;']
    seen = set()
    level = [0]
    edges = []
    for _ in range(depth):
        nxt = []
        for n in level:
            if n in seen:
                continue
            seen.add(n)
            for m in (0, 1):
                for p in steps(n, m, tree):
                    edges.append((n, m, p))
                    nxt.append(p)
        level = nxt
    for n in sorted(seen | {p for (_, _, p) in edges}):
        t, s = q_pair(n)
        label = "%s|%s" % ("".join(map(str, t)), "".join(map(str, s)))
        shape = "doublecircle" if q_f(n, tree) else "circle"
        lines.append(f'  q{n} [label="{n}:{label}", shape={shape}];')
    for (n, m, p) in sorted(edges):
        lines.append(f'  q{n} -> q{p} [label="{m}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the sections E_N


class EnContext:
    """What en-membership needs: an exact decider for B and the coded
    inverse beta = g(.) read as a binary word."""

    def b_contains(self, alpha: UPWord) -> bool:
        raise NotImplementedError

    def g_beta_letter(self, alpha: UPWord, n: int) -> int:
        raise NotImplementedError


class IdentityContext(EnContext):
    """C = B inside the binary tree with f the identity."""

    def __init__(self, decider: Callable[[UPWord], bool]):
        self.decider = decider

    def b_contains(self, alpha: UPWord) -> bool:
        return self.decider(alpha)

    def g_beta_letter(self, alpha: UPWord, n: int) -> int:
        return alpha(n)


class KuratowskiContext(EnContext):
    """beta is the run-length coding 0^delta(0) 1 0^delta(1) 1 ... of the
    Baire-space point delta = g(alpha)."""

    def __init__(self, presentation, pair):
        self.presentation = presentation
        self.pair = pair
        self._gcache: dict[UPWord, ProgramWord] = {}

    def b_contains(self, alpha: UPWord) -> bool:
        return self.presentation.contains(alpha)

    def g_beta_letter(self, alpha: UPWord, n: int) -> int:
        if alpha not in self._gcache:
            self._gcache[alpha] = self.pair.g_word(alpha)
        delta = self._gcache[alpha]
        pos = 0
        i = 0
        while True:
            run = delta(i)
            if n < pos + run:
                return 0
            if n == pos + run:
                return 1
            pos += run + 1
            i += 1


def en_member(N: int, alpha: UPWord, ctx: EnContext) -> bool:
    """alpha in E_N: the alpha-side state prefix leads into B and the
    coded inverse starts with the beta-side state prefix."""
    t, s = q_pair(N)
    shifted = UPWord(alpha.alphabet, s + alpha.transient, alpha.period)
    if not ctx.b_contains(shifted):
        return False
    return all(ctx.g_beta_letter(shifted, i) == t[i] for i in range(len(t)))
