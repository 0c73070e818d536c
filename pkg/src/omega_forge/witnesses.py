"""The concrete Sigma-0-2 context-free witness and the explicit low-rank
dictionary gallery, each with an exact omega-power decider on
ultimately periodic words.

The witness works over three letters: a 2 erases the last surviving 1.
Its omega-power equals the erasing map's preimage of "everything except
1 0^omega", which the exact decider evaluates through a stack simulation
with period-drift analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import kernels
from .evaluator import Budget, Truth3
from .omega_power import Dict
from .words import Alphabet, BINARY, TERNARY, UPWord, upword


class NotInT(ValueError):
    pass


def t_member(word) -> bool:
    """Finite words: every prefix holds at least as many 1s as 2s."""
    return kernels.t_member(tuple(word))


def t_member_up(alpha: UPWord) -> bool:
    """UP words: the prefix condition holds through one transient-plus-
    period window and the per-period drift is nonnegative, which pins
    every later prefix."""
    lu, lv = len(alpha.transient), len(alpha.period)
    drift = sum(1 if c == 1 else (-1 if c == 2 else 0) for c in alpha.period)
    if drift < 0:
        return False
    surplus = 0
    for n in range(lu + lv):
        c = alpha(n)
        surplus += 1 if c == 1 else (-1 if c == 2 else 0)
        if surplus < 0:
            return False
    return True


def erase(word) -> tuple[int, ...]:
    if not t_member(word):
        raise NotInT("erase is defined on the safe tree only")
    return kernels.erase(tuple(word))


def e_member(word) -> bool:
    """The primary definition of E (erase-based)."""
    return kernels.e_member_primary(tuple(word))


def e_member_counting(word) -> bool:
    """The count characterization of E; equality with e_member is a
    tested property, not an assumption."""
    return kernels.e_member_counting(tuple(word))


def a2_member(word) -> bool:
    """The witness dictionary over three letters."""
    return kernels.a2_member(tuple(word))


def a2_dict() -> Dict:
    return Dict(TERNARY, lambda w: kernels.a2_member(w), name="thm2")


# ---------------------------------------------------------------------------
# the erasing limit on UP words


def erase_limit(alpha: UPWord) -> UPWord:
    """The limit of the erasures of the prefixes, computed exactly.

    A 1 pushed to stack height h survives iff the surplus never returns
    below h afterwards.  With period drift d >= 0 the future minimum is
    reached inside a bounded window (d > 0: the surplus eventually
    out-climbs anything; d = 0: the surplus profile repeats), and the
    survival pattern is periodic in the position's phase, so the limit
    word is ultimately periodic."""
    if not t_member_up(alpha):
        raise NotInT("the limit needs the full safety condition")
    lu, lv = len(alpha.transient), len(alpha.period)
    drift = sum(1 if c == 1 else (-1 if c == 2 else 0) for c in alpha.period)

    def surplus_at(n: int) -> int:
        # surplus of the length-n prefix, in O(lu + lv)
        if n <= lu + lv:
            return sum(
                1 if alpha(i) == 1 else (-1 if alpha(i) == 2 else 0)
                for i in range(n)
            )
        k = (n - lu) // lv
        r = (n - lu) % lv
        return surplus_at(lu + r) + k * drift

    def future_min(p: int, h: int) -> int:
        # min surplus over positions > p, within the certified window
        if drift > 0:
            window = lu + lv * (h + 2)
        else:
            window = lu + 2 * lv + 1
        return min(surplus_at(q) for q in range(p + 1, p + window + 1))

    def survives(p: int) -> bool:
        h = surplus_at(p + 1)
        return future_min(p, h) >= h

    out_transient: list[int] = []
    out_period: list[int] = []
    for p in range(lu + lv):
        c = alpha(p)
        if c == 2:
            continue
        target = out_transient if p < lu else out_period
        if c == 0:
            target.append(0)
        else:
            target.append(1 if survives(p) else 0)
    if not out_period:
        # the period is all 2s: impossible inside T (negative drift)
        raise NotInT("no output letters in the period")
    return UPWord(BINARY, tuple(out_transient), tuple(out_period))


def a2_omega_member(alpha: UPWord) -> bool:
    """alpha in the witness's omega-power: safe forever and the erased
    limit is anything but 1 0^omega."""
    if not t_member_up(alpha):
        return False
    return erase_limit(alpha) != UPWord(BINARY, (1,), (0,))


# ---------------------------------------------------------------------------
# one-counter automata


@dataclass
class OneCounterAutomaton:
    """Nondeterministic single-counter machine; a run accepts when the
    input is consumed in an accepting state with the counter at zero
    (so the counter never goes negative on any accepted run)."""

    n_states: int
    transitions: list  # (src, letter 0..2 or 4 for eps, test 0any/1zero/2pos, delta, dst)
    accepting: set

    def accepts(self, word) -> bool:
        return kernels.run_oca(self.machine(), tuple(word))

    def machine(self):
        return (self.n_states, self.transitions, self.accepting)

    def to_json(self) -> dict:
        tests = {0: "any", 1: "zero", 2: "pos"}
        return {
            "states": self.n_states,
            "initial": 0,
            "accepting": sorted(self.accepting),
            "acceptance": "final state and empty counter",
            "transitions": [
                {
                    "from": src,
                    "letter": None if letter == 4 else letter,
                    "test": tests[test],
                    "counter": delta,
                    "to": dst,
                }
                for (src, letter, test, delta, dst) in self.transitions
            ],
        }


def counter_e() -> OneCounterAutomaton:
    """Three control states: enter on a 1, stay strictly positive inside,
    guess the final 2 into the accept state."""
    transitions = [
        (0, 1, 1, +1, 1),   # start: the first letter is a 1 at zero
        (1, 1, 2, +1, 1),
        (1, 0, 2, 0, 1),
        (1, 2, 2, -1, 1),
        (1, 2, 2, -1, 2),   # guessed last letter
    ]
    return OneCounterAutomaton(3, transitions, {2})


class _Frag:
    """A machine fragment under construction (Thompson style, with
    epsilon moves); states are global indices into the builder."""

    def __init__(self, start: int, accepts: set):
        self.start = start
        self.accepts = accepts


class _Builder:
    def __init__(self):
        self.n = 0
        self.transitions: list = []

    def state(self) -> int:
        self.n += 1
        return self.n - 1

    def edge(self, src, letter, test, delta, dst):
        self.transitions.append((src, letter, test, delta, dst))

    def atom(self, letter) -> _Frag:
        a, b = self.state(), self.state()
        self.edge(a, letter, 0, 0, b)
        return _Frag(a, {b})

    def e_machine(self) -> _Frag:
        a, run, acc = self.state(), self.state(), self.state()
        self.edge(a, 1, 1, +1, run)
        self.edge(run, 1, 2, +1, run)
        self.edge(run, 0, 2, 0, run)
        self.edge(run, 2, 2, -1, run)
        self.edge(run, 2, 2, -1, acc)
        return _Frag(a, {acc})

    def concat(self, f1: _Frag, f2: _Frag) -> _Frag:
        for s in f1.accepts:
            self.edge(s, 4, 1, 0, f2.start)  # counter is empty between words
        return _Frag(f1.start, set(f2.accepts))

    def union(self, *frags: _Frag) -> _Frag:
        a = self.state()
        accepts = set()
        for f in frags:
            self.edge(a, 4, 0, 0, f.start)
            accepts |= f.accepts
        return _Frag(a, accepts)

    def star(self, f: _Frag) -> _Frag:
        a = self.state()
        self.edge(a, 4, 0, 0, f.start)
        for s in f.accepts:
            self.edge(s, 4, 1, 0, a)
        return _Frag(a, f.accepts | {a})

    def plus(self, f: _Frag) -> _Frag:
        st = self.star(f)
        # at least one pass: start directly into f
        a = self.state()
        self.edge(a, 4, 0, 0, f.start)
        for s in f.accepts:
            self.edge(s, 4, 1, 0, st.start)
        return _Frag(a, set(f.accepts))


def counter_a() -> OneCounterAutomaton:
    """The witness dictionary by closure: {0} union E union the block
    words (({0} | E)* 1)^k with k >= 2, or one block with a nonempty
    core."""
    b = _Builder()
    zero = b.atom(0)
    e1 = b.e_machine()
    unit = b.union(zero, e1)
    core = b.star(unit)
    one = b.atom(1)
    block = b.concat(core, one)  # ({0}|E)* 1

    # one block with nonempty core: ({0}|E)+ 1
    unit2 = b.union(b.atom(0), b.e_machine())
    plus_core = b.plus(unit2)
    single = b.concat(plus_core, b.atom(1))

    block2a = b.concat(
        b.concat(b.star(b.union(b.atom(0), b.e_machine())), b.atom(1)),
        b.concat(b.star(b.union(b.atom(0), b.e_machine())), b.atom(1)),
    )
    multi = b.concat(block2a, b.star(b.concat(b.star(b.union(b.atom(0), b.e_machine())), b.atom(1))))

    total = b.union(b.atom(0), b.e_machine(), single, multi)
    # re-root so that state 0 is initial
    mapping = {total.start: 0, 0: total.start}

    def remap(s):
        return mapping.get(s, s)

    transitions = [
        (remap(src), letter, test, delta, remap(dst))
        for (src, letter, test, delta, dst) in b.transitions
    ]
    accepting = {remap(s) for s in total.accepts}
    return OneCounterAutomaton(b.n, transitions, accepting)


# ---------------------------------------------------------------------------
# the gallery of explicit low-rank dictionaries


class UnknownName(KeyError):
    pass


@dataclass
class GalleryEntry:
    name: str
    dict: Dict
    exact_decider: Callable[[UPWord], bool]
    claim: str


def _starts_with(word, prefix) -> bool:
    return len(word) >= len(prefix) and tuple(word[: len(prefix)]) == tuple(prefix)


def _delta1_member(w) -> bool:
    return _starts_with(w, (0,)) or _starts_with(w, (1, 1))


def _delta1_exact(a: UPWord) -> bool:
    return not (a(0) == 1 and a(1) == 0)


def _sigma1_member(w) -> bool:
    if _starts_with(w, (0,)):
        return True
    if not w or w[0] != 1:
        return False
    rest = tuple(w[1:])
    k = 0
    while k < len(rest) and rest[k] == 0:
        k += 1
    return k < len(rest) and rest[k] == 1


def _sigma1_exact(a: UPWord) -> bool:
    return a != UPWord(BINARY, (1,), (0,))


def _pi1_member(w) -> bool:
    return tuple(w) == (0,)


def _pi1_exact(a: UPWord) -> bool:
    return a == UPWord(BINARY, (), (0,))


def _pi2_member(w) -> bool:
    return len(w) >= 1 and all(c == 0 for c in w[:-1]) and w[-1] == 1


def _pi2_exact(a: UPWord) -> bool:
    return 1 in a.period


def _d2sigma1_member(w) -> bool:
    if _starts_with(w, (0,)):
        return True
    if tuple(w) == (1, 0, 0):
        return True
    i = 0
    while len(w) >= i + 3 and tuple(w[i : i + 3]) == (1, 0, 1):
        i += 3
    return len(w) >= i + 3 and tuple(w[i : i + 3]) == (1, 1, 1)


def _d2sigma1_exact(a: UPWord) -> bool:
    if a == UPWord(BINARY, (), (1, 0, 0)):
        return True
    p = 0
    while all(a(3 * p + t) == (1, 0, 0)[t] for t in range(3)):
        p += 1
        if p > len(a.transient) + 3 * len(a.period):
            raise AssertionError("unreachable: the block scan must leave the cycle")
    base = 3 * p
    if a(base) == 0:
        return True
    q = 0
    while all(a(base + 3 * q + t) == (1, 0, 1)[t] for t in range(3)):
        q += 1
        if q > len(a.transient) + 3 * len(a.period):
            return False  # alpha tails into (101)^omega: no 111 block ever
    return all(a(base + 3 * q + t) == 1 for t in range(3))


def _d2sigma2_member(w) -> bool:
    return _starts_with(w, (1, 1)) or tuple(w) == (0,)


def _d2sigma2_exact(a: UPWord) -> bool:
    # first factor: 0^omega, or the first 1 is followed by a 1
    lu, lv = len(a.transient), len(a.period)
    first_one = None
    for n in range(lu + lv):
        if a(n) == 1:
            first_one = n
            break
    if first_one is not None and a(first_one + 1) != 1:
        return False
    # second factor: finitely many 1s, or infinitely many 11s
    if 1 not in a.period:
        return True
    return any(
        a.period[r] == 1 and a.period[(r + 1) % lv] == 1 for r in range(lv)
    )


_GALLERY = {
    "delta1": (
        _delta1_member,
        _delta1_exact,
        "everything outside the cone of 10",
        None,
    ),
    "sigma1": (
        _sigma1_member,
        _sigma1_exact,
        "everything except 1 0^omega",
        None,
    ),
    "pi1": (_pi1_member, _pi1_exact, "the single point 0^omega", 1),
    "pi2": (
        _pi2_member,
        _pi2_exact,
        "the words with infinitely many ones",
        None,
    ),
    "d2sigma1": (
        _d2sigma1_member,
        _d2sigma1_exact,
        "union of the (100)^p 0 and (100)^p (101)^q 111 cones plus (100)^omega",
        None,
    ),
    "d2sigma2": (
        _d2sigma2_member,
        _d2sigma2_exact,
        "double-one starts meeting the finitely-many-ones or infinitely-many-double-ones tail condition",
        None,
    ),
}


def gallery_names() -> list[str]:
    return sorted(_GALLERY)


def gallery(name: str) -> GalleryEntry:
    if name not in _GALLERY:
        raise UnknownName(name)
    member, exact, claim, max_len = _GALLERY[name]
    d = Dict(BINARY, member, name=name, max_word_len=max_len)
    return GalleryEntry(name, d, exact, claim)
