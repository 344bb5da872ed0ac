"""Compiled inner loops for simulation and loop detection.

Tables are flat int64 arrays indexed by ``state * n_symbols + symbol``; a
``nxt`` entry of -1 halts, -2 marks a transition not yet defined (tree
normal form enumeration stops there).  Tapes are int8 buffers with the head
starting at ``origin``; input ``x`` puts ones on ``origin+1 .. origin+x``.
"""
import numpy as np
from numba import njit

HALTED = 0
UNDEFINED = 1
FUEL = 2

UNDEF = -2


def tape_size(fuel, input_len):
    return 2 * fuel + input_len + 3


@njit(cache=True)
def simulate(write, move, nxt, n_symbols, input_len, cap, tape):
    """Run from the initial tape for at most ``cap`` steps.

    ``tape`` must be a zeroed buffer of at least ``tape_size(cap, input_len)``
    cells; it is zeroed again before returning.
    Returns (status, steps, state, symbol_under_head, score).
    """
    origin = cap + 1
    for i in range(input_len):
        tape[origin + 1 + i] = 1
    lo = origin
    hi = origin + input_len
    head = origin
    state = 0
    steps = 0
    status = FUEL
    while steps < cap:
        idx = state * n_symbols + tape[head]
        nx = nxt[idx]
        if nx == UNDEF:
            status = UNDEFINED
            break
        tape[head] = write[idx]
        head += move[idx]
        steps += 1
        if head < lo:
            lo = head
        elif head > hi:
            hi = head
        if nx == -1:
            status = HALTED
            break
        state = nx
    symbol = tape[head]
    score = 0
    for i in range(lo, hi + 1):
        if tape[i] != 0:
            score += 1
        tape[i] = 0
    return status, steps, state, symbol, score


@njit(cache=True)
def find_cycler(write, move, nxt, n_symbols, input_len, fuel):
    """Look for two identical configurations within ``fuel`` steps.

    Reference configurations are taken at steps 0, 1, 2, 4, 8, ...
    Returns (found, start_step, period).
    """
    size = 2 * fuel + input_len + 3
    origin = fuel + 1
    tape = np.zeros(size, dtype=np.int8)
    for i in range(input_len):
        tape[origin + 1 + i] = 1
    ref = tape.copy()
    ref_t = 0
    ref_state = 0
    ref_head = origin
    lo = origin
    hi = origin + input_len
    head = origin
    state = 0
    for t in range(1, fuel + 1):
        idx = state * n_symbols + tape[head]
        nx = nxt[idx]
        if nx < 0:
            return False, 0, 0
        tape[head] = write[idx]
        head += move[idx]
        state = nx
        if head < lo:
            lo = head
        elif head > hi:
            hi = head
        if state == ref_state and head == ref_head:
            same = True
            for i in range(lo, hi + 1):
                if tape[i] != ref[i]:
                    same = False
                    break
            if same:
                return True, ref_t, t - ref_t
        if t >= 2 * ref_t:
            ref[lo:hi + 1] = tape[lo:hi + 1]
            ref_t = t
            ref_state = state
            ref_head = head
    return False, 0, 0


@njit(cache=True)
def find_translated_cycler(write, move, nxt, n_symbols, input_len, fuel):
    """Look for a configuration that recurs shifted at a tape edge.

    At a record step (head on a cell never visited and beyond the input, so
    everything on that side is blank) the window between the head and the
    furthest excursion back since the reference record is compared with the
    reference snapshot.  References are re-taken Brent-style.
    Returns (found, start_step, period, shift).
    """
    size = 2 * fuel + input_len + 3
    origin = fuel + 1
    tape = np.zeros(size, dtype=np.int8)
    for i in range(input_len):
        tape[origin + 1 + i] = 1
    lo = origin
    hi = origin + input_len
    head = origin
    state = 0

    # right-edge reference; valid at step 0 only with an empty input
    r_ok = input_len == 0
    r_snap = tape.copy()
    r_t = 0
    r_state = 0
    r_head = origin
    r_min = origin
    # left-edge reference
    l_ok = True
    l_snap = tape.copy()
    l_t = 0
    l_state = 0
    l_head = origin
    l_max = origin

    for t in range(1, fuel + 1):
        idx = state * n_symbols + tape[head]
        nx = nxt[idx]
        if nx < 0:
            return False, 0, 0, 0
        tape[head] = write[idx]
        head += move[idx]
        state = nx
        if head < r_min:
            r_min = head
        if head > l_max:
            l_max = head
        if head > hi:
            hi = head
            if r_ok and state == r_state:
                w = r_head - r_min
                same = True
                for i in range(w + 1):
                    if tape[head - i] != r_snap[r_head - i]:
                        same = False
                        break
                if same:
                    return True, r_t, t - r_t, head - r_head
            if not r_ok or t >= 2 * r_t:
                r_snap[lo:hi + 1] = tape[lo:hi + 1]
                r_ok = True
                r_t = t
                r_state = state
                r_head = head
                r_min = head
        elif head < lo:
            lo = head
            if l_ok and state == l_state:
                w = l_max - l_head
                same = True
                for i in range(w + 1):
                    if tape[head + i] != l_snap[l_head + i]:
                        same = False
                        break
                if same:
                    return True, l_t, t - l_t, head - l_head
            if t >= 2 * l_t:
                l_snap[lo:hi + 1] = tape[lo:hi + 1]
                l_t = t
                l_state = state
                l_head = head
                l_max = head
    return False, 0, 0, 0


@njit(cache=True)
def ctl_closed(write, move, nxt, n_symbols, input_len, left, right, seen, stack):
    """Closure of (left DFA state, state, head symbol, right DFA state) tuples.

    ``seen`` and ``stack`` are scratch buffers with one slot per tuple.
    Returns True if the reachable set avoids every halting entry.
    """
    k = n_symbols
    n_states = nxt.shape[0] // k
    n_left = left.shape[0] // k
    n_right = right.shape[0] // k
    span_r = n_right
    span_s = k * span_r
    span_q = n_states * span_s
    seen[:n_left * span_q] = False
    r0 = 0
    for _ in range(input_len):
        r0 = right[r0 * k + 1]
    top = 0
    seen[r0] = True
    stack[top] = r0
    top += 1
    while top > 0:
        top -= 1
        code = stack[top]
        l = code // span_q
        state = (code // span_s) % n_states
        sym = (code // span_r) % k
        r = code % span_r
        idx = state * k + sym
        nx = nxt[idx]
        if nx < 0:
            return False
        w = write[idx]
        for b in range(k):
            if move[idx] > 0:
                l2 = left[l * k + w]
                for r2 in range(n_right):
                    if right[r2 * k + b] == r:
                        c = l2 * span_q + nx * span_s + b * span_r + r2
                        if not seen[c]:
                            seen[c] = True
                            stack[top] = c
                            top += 1
            else:
                r2 = right[r * k + w]
                for l2 in range(n_left):
                    if left[l2 * k + b] == l:
                        c = l2 * span_q + nx * span_s + b * span_r + r2
                        if not seen[c]:
                            seen[c] = True
                            stack[top] = c
                            top += 1
    return True


@njit(cache=True)
def ctl_scan(write, move, nxt, n_symbols, input_len, lefts, rights, budget):
    """First (i, j) with ``lefts[i]``, ``rights[j]`` closed, trying at most
    ``budget`` pairs in row-major order.  Returns (i, j, tried); i = -1 if none."""
    n_states = nxt.shape[0] // n_symbols
    size = (lefts.shape[1] // n_symbols) * n_states * n_symbols * (rights.shape[1] // n_symbols)
    seen = np.zeros(size, dtype=np.bool_)
    stack = np.zeros(size, dtype=np.int64)
    tried = 0
    for i in range(lefts.shape[0]):
        for j in range(rights.shape[0]):
            if tried >= budget:
                return -1, -1, tried
            tried += 1
            if ctl_closed(write, move, nxt, n_symbols, input_len, lefts[i], rights[j],
                          seen, stack):
                return i, j, tried
    return -1, -1, tried


@njit(cache=True)
def _pd_add(rel, work, top, p, g, q):
    if not rel[p, g, q]:
        rel[p, g, q] = True
        work[top, 0] = p
        work[top, 1] = g
        work[top, 2] = q
        top += 1
    return top


@njit(cache=True)
def pushdown_closed(write, move, nxt, n_symbols, input_len, left):
    """Saturate the reachable stack languages of the pushdown abstraction.

    Control states are (left DFA state, machine state); the stack is the
    tape right of the head with a bottom marker for the blank tail.  Moving
    left pops a cell from the left half, which the DFA only knows up to its
    predecessor states, so every (l2, c) with left[l2, c] = l is pushed.
    Returns True if no halting entry is reachable.
    """
    k = n_symbols
    n_states = nxt.shape[0] // k
    n_left = left.shape[0] // k
    n_ctrl = n_left * n_states
    bot = k
    eps = k + 1
    final = n_ctrl
    base1 = n_ctrl + 1                 # after pushing c: (p2, c)
    base2 = base1 + n_ctrl * k         # after pushing c, w above the bottom
    base3 = base2 + n_ctrl * k * k     # head cell and input cells
    size = base3 + (input_len + 1 if input_len > 0 else 0)
    rel = np.zeros((size, k + 2, size), dtype=np.bool_)
    work = np.empty((size * (k + 2) * size, 3), dtype=np.int64)
    top = 0
    prev = 0
    if input_len > 0:
        top = _pd_add(rel, work, top, 0, 0, base3)
        prev = base3
    for j in range(input_len):
        top = _pd_add(rel, work, top, prev, 1, base3 + 1 + j)
        prev = base3 + 1 + j
    top = _pd_add(rel, work, top, prev, bot, final)
    while top > 0:
        top -= 1
        p = work[top, 0]
        g = work[top, 1]
        q = work[top, 2]
        if g == eps:
            for g2 in range(k + 1):
                for q2 in range(size):
                    if rel[q, g2, q2]:
                        top = _pd_add(rel, work, top, p, g2, q2)
            continue
        for p2 in range(size):
            if rel[p2, eps, p]:
                top = _pd_add(rel, work, top, p2, g, q)
        if p >= n_ctrl:
            continue
        l = p // n_states
        st = p % n_states
        sym = 0 if g == bot else g
        idx = st * k + sym
        nx = nxt[idx]
        if nx < 0:
            return False
        w = write[idx]
        if move[idx] > 0:
            p2 = left[l * k + w] * n_states + nx
            top = _pd_add(rel, work, top, p2, bot if g == bot else eps, q)
        else:
            for l2 in range(n_left):
                for c in range(k):
                    if left[l2 * k + c] != l:
                        continue
                    p2 = l2 * n_states + nx
                    a = base1 + p2 * k + c
                    top = _pd_add(rel, work, top, p2, c, a)
                    if g == bot:
                        b = base2 + (p2 * k + c) * k + w
                        top = _pd_add(rel, work, top, a, w, b)
                        top = _pd_add(rel, work, top, b, bot, q)
                    else:
                        top = _pd_add(rel, work, top, a, w, q)
    return True


@njit(cache=True)
def pushdown_scan(write, move, nxt, n_symbols, input_len, dfas, budget):
    """First row of ``dfas`` passing :func:`pushdown_closed`, trying at most
    ``budget`` rows.  Returns (row, tried); row = -1 if none."""
    tried = 0
    for i in range(dfas.shape[0]):
        if tried >= budget:
            return -1, tried
        tried += 1
        if pushdown_closed(write, move, nxt, n_symbols, input_len, dfas[i]):
            return i, tried
    return -1, tried
