"""Pure-Python backend for the hot word kernels.

Same contract as the compiled backend in _speedups.pyx; selected at
import time by omega_forge.kernels when the extension is unavailable.
Letters are 0, 1, 2 over the three-letter alphabet; words are tuples.
"""

from __future__ import annotations


def t_member(word) -> bool:
    """Every prefix has at least as many 1s as 2s."""
    surplus = 0
    for c in word:
        if c == 1:
            surplus += 1
        elif c == 2:
            surplus -= 1
            if surplus < 0:
                return False
    return True


def erase(word):
    """The erasing rewrite: each 2 turns the last surviving 1 into a 0.
    Assumes the word is in T; output drops the 2s."""
    out = []
    stack = []
    for c in word:
        if c == 0:
            out.append(0)
        elif c == 1:
            stack.append(len(out))
            out.append(1)
        else:
            out[stack.pop()] = 0
    return tuple(out)


def e_member_primary(word) -> bool:
    """s in T, counts balanced, nonempty, and the erase of all but the
    last letter starts with a surviving 1."""
    n = len(word)
    if n == 0:
        return False
    surplus = 0
    bottom_alive = word[0] == 1
    for i, c in enumerate(word):
        if c == 1:
            surplus += 1
        elif c == 2:
            surplus -= 1
            if surplus < 0:
                return False
            if surplus == 0 and i < n - 1:
                bottom_alive = False
    return surplus == 0 and bottom_alive


def e_member_counting(word) -> bool:
    """The end characterization: strict surplus strictly inside, balance
    at the end, first letter 1, last letter 2."""
    n = len(word)
    if n == 0 or word[0] != 1 or word[-1] != 2:
        return False
    surplus = 0
    for i, c in enumerate(word):
        if i >= 1 and surplus <= 0:
            return False
        if c == 1:
            surplus += 1
        elif c == 2:
            surplus -= 1
    return surplus == 0


def _unit_table(word):
    """unit[p][q]: word[p:q] in {0} union E (q > p)."""
    n = len(word)
    unit = [[False] * (n + 1) for _ in range(n + 1)]
    for p in range(n):
        if word[p] == 0:
            unit[p][p + 1] = True
        if word[p] != 1:
            continue
        surplus = 0
        for q in range(p, n):
            c = word[q]
            if q > p and surplus <= 0:
                break
            if c == 1:
                surplus += 1
            elif c == 2:
                surplus -= 1
            if surplus == 0 and c == 2:
                unit[p][q + 1] = True
    return unit


def a2_member(word) -> bool:
    """The dictionary of Theorem 2: {0}, E, and words of blocks c 1 with
    c a star of {0} union E (at least two blocks, or one nonempty c)."""
    n = len(word)
    if n == 0:
        return False
    if word == (0,) or len(word) == 1 and word[0] == 0:
        return True
    if e_member_primary(word):
        return True
    unit = _unit_table(word)
    # star[p][q]: word[p:q] splits into {0} union E words (empty allowed)
    star = [[False] * (n + 1) for _ in range(n + 1)]
    for p in range(n + 1):
        star[p][p] = True
        for q in range(p + 1, n + 1):
            star[p][q] = any(star[p][m] and unit[m][q] for m in range(p, q))
    # blocks[i]: word[0:i] = (c_0 1)...(c_m 1); count the blocks
    best = [0] * (n + 1)  # 0: unreachable, else max block count
    single_nonempty = [False] * (n + 1)
    for i in range(1, n + 1):
        if word[i - 1] != 1:
            continue
        for p in range(i):
            if p == 0:
                if star[0][i - 1]:
                    best[i] = max(best[i], 1)
                    if i - 1 > 0:
                        single_nonempty[i] = True
            elif best[p]:
                if star[p][i - 1]:
                    best[i] = max(best[i], best[p] + 1)
    return best[n] >= 2 or (best[n] == 1 and single_nonempty[n])


# ---------------------------------------------------------------------------
# exhaustive sweeps (the hot loops)


def _t_words_upto(max_len):
    words = [()]
    level = [()]
    for _ in range(max_len):
        nxt = []
        for w in level:
            surplus = 0
            for c in w:
                surplus += 1 if c == 1 else (-1 if c == 2 else 0)
            for a in (0, 1, 2):
                if a == 2 and surplus == 0:
                    continue
                nxt.append(w + (a,))
        words.extend(nxt)
        level = nxt
    return words


def sweep_morphism(max_len: int) -> tuple[int, int]:
    """erase(s t) == erase(s) erase(t) over all pairs of T words up to
    max_len; returns (pairs checked, failures)."""
    words = _t_words_upto(max_len)
    cache = {w: erase(w) for w in words}
    pairs = 0
    bad = 0
    for s in words:
        es = cache[s]
        for t in words:
            pairs += 1
            if erase(s + t) != es + cache[t]:
                bad += 1
    return pairs, bad


def sweep_e_equiv(max_len: int) -> tuple[int, int]:
    """Both E definitions over all three-letter words up to max_len
    (words leaving T count as agreeing Falses); (checked, disagreements)."""
    total = sum(3 ** k for k in range(max_len + 1))
    checked = 0
    bad = 0
    # DFS over the T tree with incremental state for both definitions
    # state: (word length, surplus, bottom_alive, min_inner, first, last)
    stack = [((), 0, False, None)]
    while stack:
        word, surplus, alive, _ = stack.pop()
        n = len(word)
        if n:
            d1 = e_member_primary(word)
            d2 = e_member_counting(word)
            if d1 != d2:
                bad += 1
        checked += 1
        if n == max_len:
            continue
        for a in (0, 1, 2):
            if a == 2 and surplus == 0:
                continue  # leaves T; both definitions are False hereafter
            s2 = surplus + (1 if a == 1 else (-1 if a == 2 else 0))
            stack.append((word + (a,), s2, alive, None))
    return total, bad


def run_oca(machine, word) -> bool:
    """machine: (n_states, transitions, accepting) with transitions
    (src, letter or 4 for eps, test 0any/1zero/2pos, delta, dst);
    acceptance: input consumed, accepting state, counter zero."""
    n_states, transitions, accepting = machine
    by_src: dict[int, list] = {}
    for tr in transitions:
        by_src.setdefault(tr[0], []).append(tr)

    def eps_close(configs):
        out = set(configs)
        frontier = list(configs)
        while frontier:
            st, c = frontier.pop()
            for (_, letter, test, delta, dst) in by_src.get(st, ()):
                if letter != 4:
                    continue
                if test == 1 and c != 0:
                    continue
                if test == 2 and c == 0:
                    continue
                c2 = c + delta
                if c2 < 0:
                    continue
                if (dst, c2) not in out:
                    out.add((dst, c2))
                    frontier.append((dst, c2))
        return out

    configs = eps_close({(0, 0)})
    for a in word:
        nxt = set()
        for (st, c) in configs:
            for (_, letter, test, delta, dst) in by_src.get(st, ()):
                if letter != a:
                    continue
                if test == 1 and c != 0:
                    continue
                if test == 2 and c == 0:
                    continue
                c2 = c + delta
                if c2 >= 0:
                    nxt.add((dst, c2))
        configs = eps_close(nxt)
        if not configs:
            return False
    return any(st in accepting and c == 0 for (st, c) in configs)


def sweep_oca(max_len: int, machine, mode: str) -> tuple[int, int]:
    """Compare the counter machine against the direct predicate over all
    three-letter words up to max_len; (words checked, disagreements)."""
    direct = e_member_primary if mode == "e" else a2_member
    checked = 0
    bad = 0
    stack = [()]
    while stack:
        word = stack.pop()
        checked += 1
        if len(word) >= 1:
            if run_oca(machine, word) != direct(word):
                bad += 1
        if len(word) < max_len:
            for a in (0, 1, 2):
                stack.append(word + (a,))
    return checked, bad
