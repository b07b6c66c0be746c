"""Pure-Python edit-distance kernel; the fallback when the compiled core is absent.

Op codes: 0 match, 1 substitution, 2 deletion, 3 insertion.
"""

MATCH, SUB, DEL, INS = 0, 1, 2, 3


def edit_ops(ref, hyp):
    """Minimal unit-cost edit script from integer sequences ``ref`` to ``hyp``.

    Among minimal-cost scripts the one with the most matches wins, which
    fixes the sub/del/ins counts independently of direction. The path is
    then traced back preferring match > sub > del > ins at every tie.
    Cells hold ``cost * k - matches`` so one integer orders both keys.
    """
    n, m = len(ref), len(hyp)
    k = n + m + 1
    prev = [j * k for j in range(m + 1)]
    table = [prev]
    for i in range(1, n + 1):
        r = ref[i - 1]
        row = [i * k] * (m + 1)
        for j in range(1, m + 1):
            best = prev[j - 1] + (k if r != hyp[j - 1] else -1)
            up = prev[j] + k
            left = row[j - 1] + k
            if up < best:
                best = up
            if left < best:
                best = left
            row[j] = best
        table.append(row)
        prev = row

    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        d = table[i][j]
        if i > 0 and j > 0:
            same = ref[i - 1] == hyp[j - 1]
            if same and d == table[i - 1][j - 1] - 1:
                ops.append(MATCH)
                i -= 1
                j -= 1
                continue
            if not same and d == table[i - 1][j - 1] + k:
                ops.append(SUB)
                i -= 1
                j -= 1
                continue
        if i > 0 and d == table[i - 1][j] + k:
            ops.append(DEL)
            i -= 1
        else:
            ops.append(INS)
            j -= 1
    ops.reverse()
    return ops


def edit_distance(ref, hyp):
    n, m = len(ref), len(hyp)
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        r = ref[i - 1]
        row = [i] * (m + 1)
        for j in range(1, m + 1):
            row[j] = min(prev[j - 1] + (r != hyp[j - 1]), prev[j] + 1, row[j - 1] + 1)
        prev = row
    return prev[m]
