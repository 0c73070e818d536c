# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the hot word kernels (same API as _kernels_py)."""

from libc.string cimport memcpy


cdef inline int _surplus_step(int surplus, int c) nogil:
    if c == 1:
        return surplus + 1
    if c == 2:
        return surplus - 1
    return surplus


def t_member(word):
    cdef int surplus = 0
    cdef int c
    for c in word:
        if c == 1:
            surplus += 1
        elif c == 2:
            surplus -= 1
            if surplus < 0:
                return False
    return True


def erase(word):
    cdef list out = []
    cdef list stack = []
    cdef int c
    for c in word:
        if c == 0:
            out.append(0)
        elif c == 1:
            stack.append(len(out))
            out.append(1)
        else:
            out[stack.pop()] = 0
    return tuple(out)


cdef bint _e_primary(unsigned char * w, int n) nogil:
    cdef int surplus = 0
    cdef bint alive
    cdef int i
    if n == 0:
        return False
    alive = w[0] == 1
    for i in range(n):
        if w[i] == 1:
            surplus += 1
        elif w[i] == 2:
            surplus -= 1
            if surplus < 0:
                return False
            if surplus == 0 and i < n - 1:
                alive = False
    return surplus == 0 and alive


cdef bint _e_counting(unsigned char * w, int n) nogil:
    cdef int surplus = 0
    cdef int i
    if n == 0 or w[0] != 1 or w[n - 1] != 2:
        return False
    for i in range(n):
        if i >= 1 and surplus <= 0:
            return False
        if w[i] == 1:
            surplus += 1
        elif w[i] == 2:
            surplus -= 1
    return surplus == 0


cdef bint _a2(unsigned char * w, int n):
    cdef int p, q, m, i
    cdef int surplus
    if n == 0:
        return False
    if n == 1 and w[0] == 0:
        return True
    if _e_primary(w, n):
        return True
    # unit[p*(n+1)+q]: w[p:q] in {0} union E
    cdef int stride = n + 1
    cdef bytearray unit_b = bytearray(stride * stride)
    cdef unsigned char[:] unit = unit_b
    for p in range(n):
        if w[p] == 0:
            unit[p * stride + p + 1] = 1
        if w[p] != 1:
            continue
        surplus = 0
        for q in range(p, n):
            if q > p and surplus <= 0:
                break
            if w[q] == 1:
                surplus += 1
            elif w[q] == 2:
                surplus -= 1
            if surplus == 0 and w[q] == 2:
                unit[p * stride + q + 1] = 1
    cdef bytearray star_b = bytearray(stride * stride)
    cdef unsigned char[:] star = star_b
    for p in range(n + 1):
        star[p * stride + p] = 1
        for q in range(p + 1, n + 1):
            for m in range(p, q):
                if star[p * stride + m] and unit[m * stride + q]:
                    star[p * stride + q] = 1
                    break
    cdef bytearray best_b = bytearray(n + 1)
    cdef unsigned char[:] best = best_b
    cdef bytearray single_b = bytearray(n + 1)
    cdef unsigned char[:] single = single_b
    for i in range(1, n + 1):
        if w[i - 1] != 1:
            continue
        if star[0 * stride + i - 1]:
            if best[i] < 1:
                best[i] = 1
            if i - 1 > 0:
                single[i] = 1
        for p in range(1, i):
            if best[p] and star[p * stride + i - 1]:
                if best[p] + 1 > best[i]:
                    best[i] = min(best[p] + 1, 250)
    return best[n] >= 2 or (best[n] == 1 and single[n] == 1)


def e_member_primary(word):
    cdef bytes b = bytes(word)
    return bool(_e_primary(b, len(b)))


def e_member_counting(word):
    cdef bytes b = bytes(word)
    return bool(_e_counting(b, len(b)))


def a2_member(word):
    cdef bytes b = bytes(word)
    return bool(_a2(b, len(b)))


# ---------------------------------------------------------------------------
# sweeps


def sweep_morphism(int max_len):
    # enumerate T words as byte strings, cache their erasures
    cdef list words = [b""]
    cdef list level = [b""]
    cdef list nxt
    cdef bytes wrd
    cdef int k, c, surplus
    for k in range(max_len):
        nxt = []
        for wrd in level:
            surplus = 0
            for c in wrd:
                surplus = _surplus_step(surplus, c)
            for c in range(3):
                if c == 2 and surplus == 0:
                    continue
                nxt.append(wrd + bytes((c,)))
        words.extend(nxt)
        level = nxt
    cdef list eras = [erase(wrd) for wrd in words]
    cdef long pairs = 0
    cdef long bad = 0
    cdef int n_words = len(words)
    cdef unsigned char buf[64]
    cdef unsigned char out[64]
    cdef int stack[64]
    cdef int i, jj, ns, nt, sp, outn, pos
    cdef bytes s, t
    cdef tuple es, et
    for i in range(n_words):
        s = words[i]
        es = eras[i]
        ns = len(s)
        for jj in range(n_words):
            t = words[jj]
            nt = len(t)
            pairs += 1
            # simulate erase(s + t) in C
            outn = 0
            sp = 0
            for pos in range(ns):
                c = s[pos]
                if c == 0:
                    out[outn] = 0
                    outn += 1
                elif c == 1:
                    stack[sp] = outn
                    sp += 1
                    out[outn] = 1
                    outn += 1
                else:
                    sp -= 1
                    out[stack[sp]] = 0
            for pos in range(nt):
                c = t[pos]
                if c == 0:
                    out[outn] = 0
                    outn += 1
                elif c == 1:
                    stack[sp] = outn
                    sp += 1
                    out[outn] = 1
                    outn += 1
                else:
                    sp -= 1
                    out[stack[sp]] = 0
            et = eras[jj]
            if outn != len(es) + len(et):
                bad += 1
                continue
            for pos in range(len(es)):
                if out[pos] != (<int> es[pos]):
                    bad += 1
                    break
            else:
                for pos in range(len(et)):
                    if out[len(es) + pos] != (<int> et[pos]):
                        bad += 1
                        break
    return pairs, bad


def sweep_e_equiv(int max_len):
    cdef long total = 0
    cdef long bad = 0
    cdef int k
    for k in range(max_len + 1):
        total += 3 ** k
    # iterative DFS over the T tree
    cdef unsigned char w[32]
    cdef int letter_at[32]
    cdef int depth = 0
    cdef int surplus
    cdef bint d1, d2
    letter_at[0] = 0
    while depth >= 0:
        if letter_at[depth] >= 3:
            depth -= 1
            continue
        w[depth] = letter_at[depth]
        letter_at[depth] += 1
        # T check incrementally
        surplus = 0
        d1 = True
        for k in range(depth + 1):
            surplus = _surplus_step(surplus, w[k])
            if surplus < 0:
                d1 = False
                break
        if not d1:
            continue  # both definitions stay False on this subtree
        d1 = _e_primary(w, depth + 1)
        d2 = _e_counting(w, depth + 1)
        if d1 != d2:
            bad += 1
        if depth + 1 < max_len:
            depth += 1
            letter_at[depth] = 0
    return total, bad


def run_oca(machine, word):
    n_states, transitions, accepting = machine
    cdef list by_src = [[] for _ in range(n_states)]
    for tr in transitions:
        by_src[tr[0]].append(tr)
    cdef set configs = {(0, 0)}
    cdef set out
    cdef list frontier
    configs = _eps_close(configs, by_src)
    for a in word:
        out = set()
        for (st, c) in configs:
            for (_, letter, test, delta, dst) in by_src[st]:
                if letter != a:
                    continue
                if test == 1 and c != 0:
                    continue
                if test == 2 and c == 0:
                    continue
                if c + delta >= 0:
                    out.add((dst, c + delta))
        configs = _eps_close(out, by_src)
        if not configs:
            return False
    for (st, c) in configs:
        if c == 0 and st in accepting:
            return True
    return False


cdef set _eps_close(set configs, list by_src):
    cdef set out = set(configs)
    cdef list frontier = list(configs)
    while frontier:
        st, c = frontier.pop()
        for (_, letter, test, delta, dst) in by_src[st]:
            if letter != 4:
                continue
            if test == 1 and c != 0:
                continue
            if test == 2 and c == 0:
                continue
            if c + delta < 0:
                continue
            if (dst, c + delta) not in out:
                out.add((dst, c + delta))
                frontier.append((dst, c + delta))
    return out


def sweep_oca(int max_len, machine, mode):
    """Exhaustive comparison of the machine against the direct predicate;
    configurations are tracked as per-state counter bitmasks."""
    n_states_o, transitions, accepting_o = machine
    cdef int n_states = n_states_o
    cdef int ntr = len(transitions)
    cdef int[:] tr_src = _int_mv([t[0] for t in transitions])
    cdef int[:] tr_letter = _int_mv([t[1] for t in transitions])
    cdef int[:] tr_test = _int_mv([t[2] for t in transitions])
    cdef int[:] tr_delta = _int_mv([t[3] for t in transitions])
    cdef int[:] tr_dst = _int_mv([t[4] for t in transitions])
    cdef int[:] acc = _int_mv([1 if s in accepting_o else 0 for s in range(n_states)])
    cdef bint use_e = mode == "e"

    if n_states > 64 or max_len > 18:
        raise ValueError("sweep_oca is compiled for <= 64 states, length <= 18")
    # masks[depth][state]: bit c set when (state, counter=c) reachable
    cdef unsigned long long masks[20][64]
    cdef unsigned char w[20]
    cdef int letter_at[20]
    cdef int depth, st, i, c
    cdef long checked = 0
    cdef long bad = 0
    cdef unsigned long long m, cur, moved
    cdef bint changed, machine_accepts, direct
    cdef bytes pyword

    for st in range(n_states):
        masks[0][st] = 0
    masks[0][0] = 1  # state 0, counter 0
    _close_eps(&masks[0][0], n_states, ntr, tr_src, tr_letter, tr_test, tr_delta, tr_dst)
    depth = 0
    letter_at[0] = 0
    checked = 1  # the empty word (agrees trivially; predicates give False)
    while depth >= 0:
        if letter_at[depth] >= 3:
            depth -= 1
            continue
        w[depth] = letter_at[depth]
        letter_at[depth] += 1
        # step the configuration set from masks[depth] by letter w[depth]
        for st in range(n_states):
            masks[depth + 1][st] = 0
        for i in range(ntr):
            if tr_letter[i] != w[depth]:
                continue
            cur = masks[depth][tr_src[i]]
            if cur == 0:
                continue
            if tr_test[i] == 1:
                cur &= 1
            elif tr_test[i] == 2:
                cur &= ~(<unsigned long long> 1)
            if cur == 0:
                continue
            if tr_delta[i] == 1:
                moved = cur << 1
            elif tr_delta[i] == -1:
                moved = cur >> 1
            else:
                moved = cur
            masks[depth + 1][tr_dst[i]] |= moved
        _close_eps(&masks[depth + 1][0], n_states, ntr, tr_src, tr_letter, tr_test, tr_delta, tr_dst)
        checked += 1
        machine_accepts = False
        for st in range(n_states):
            if acc[st] and (masks[depth + 1][st] & 1):
                machine_accepts = True
                break
        if use_e:
            direct = _e_primary(w, depth + 1)
        else:
            direct = _a2(w, depth + 1)
        if machine_accepts != direct:
            bad += 1
        if depth + 1 < max_len:
            depth += 1
            letter_at[depth] = 0
    return checked, bad


cdef void _close_eps(
    unsigned long long * mask,
    int n_states,
    int ntr,
    int[:] tr_src,
    int[:] tr_letter,
    int[:] tr_test,
    int[:] tr_delta,
    int[:] tr_dst,
):
    cdef bint changed = True
    cdef int i
    cdef unsigned long long cur, moved
    while changed:
        changed = False
        for i in range(ntr):
            if tr_letter[i] != 4:
                continue
            cur = mask[tr_src[i]]
            if cur == 0:
                continue
            if tr_test[i] == 1:
                cur &= 1
            elif tr_test[i] == 2:
                cur &= ~(<unsigned long long> 1)
            if cur == 0:
                continue
            if tr_delta[i] == 1:
                moved = cur << 1
            elif tr_delta[i] == -1:
                moved = cur >> 1
            else:
                moved = cur
            if moved & ~mask[tr_dst[i]]:
                mask[tr_dst[i]] |= moved
                changed = True


def _int_mv(values):
    import array
    return memoryview(array.array("i", values))
