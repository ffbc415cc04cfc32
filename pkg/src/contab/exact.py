"""Exact counting of nonnegative integer matrices with constant margins.

count_exact fills the matrix column by column.  All rows have the same
target sum, so rows are interchangeable up to their remaining deficit, and
the DP state is the sorted multiset of remaining row deficits.  The number
of columns still to fill is implied by mass conservation: the deficits of a
reachable state always sum to (columns remaining) * t, which also gives the
cheap internal consistency assertion.

A transition spends one column: distribute t units over the rows, each row
j receiving x_j with 0 <= x_j <= deficit_j.  Allocations are enumerated
aggregated by deficit value: for each class of mu rows sharing deficit v we
choose a multiset of mu amounts and weight it by the multinomial count of
ways to hand those amounts to labeled rows (a product of binomials).  Rows
whose new deficit could never be filled by the remaining columns are pruned
(new deficit must be <= (columns remaining - 1) * t).

Counts are exact Python ints throughout.  Two budgets bound the computation:
a state cap on memo entries and a work budget on enumerated allocations.
Exceeding either raises ResourceLimitError; a wrong answer is never returned.

count_bruteforce enumerates matrices row by row and exists purely as an
independent oracle for small instances.
"""

from __future__ import annotations

import sys

from .core import InvalidSpecError, ResourceLimitError, TableSpec

DEFAULT_MAX_STATES = 2 ** 28
DEFAULT_MAX_WORK = 10 ** 9

BRUTEFORCE_MAX_CELLS = 12
BRUTEFORCE_MAX_ROWSUM = 20


def count_exact(spec: TableSpec, *, max_states: int | None = None,
                max_work: int | None = None) -> int:
    """Exact number of matrices with the given margins.

    max_states caps stored DP states (default 2**28); max_work caps the
    total number of enumerated column allocations (default 10**9).  Pass
    None for a default, or 0/negative to reject immediately.
    """
    max_states = DEFAULT_MAX_STATES if max_states is None else max_states
    max_work = DEFAULT_MAX_WORK if max_work is None else max_work
    if spec.s == 0:
        return 1
    sp = spec if spec.m <= spec.n else spec.transpose()
    m, s, n, t = sp.m, sp.s, sp.n, sp.t
    if m == 1:
        return 1

    comb_rows = _pascal(m)
    memo: dict[tuple[int, ...], int] = {}
    work = 0

    def count_state(state: tuple[int, ...]) -> int:
        nonlocal work
        cached = memo.get(state)
        if cached is not None:
            return cached
        total = sum(state)
        cols = total // t
        assert total == cols * t, "mass conservation violated"
        if cols == 1:
            memo[state] = 1
            return 1

        # group equal deficits: classes[i] = (value, multiplicity)
        classes = []
        prev = -1
        for v in state:
            if v == prev:
                classes[-1][1] += 1
            else:
                classes.append([v, 1])
                prev = v

        if cols == 2:
            # both remaining columns are determined by the first allocation,
            # so the state counts bounded compositions of t in closed form
            work += 1
            result = _two_column_count(classes, t, m)
            if len(memo) >= max_states:
                raise ResourceLimitError(
                    f"state cap exhausted counting {spec}: "
                    f"{len(memo)} states stored >= {max_states}",
                    kind="states", limit=max_states, used=len(memo))
            memo[state] = result
            return result

        nclasses = len(classes)
        cap_next = (cols - 1) * t
        lo_amounts = [max(0, v - cap_next) for v, _ in classes]
        # how much classes i.. can absorb at most this column
        suffix_cap = [0] * (nclasses + 1)
        for i in range(nclasses - 1, -1, -1):
            v, mu = classes[i]
            suffix_cap[i] = suffix_cap[i + 1] + mu * min(v, t)

        new_parts: list[int] = []

        def alloc_class(ci: int, rem: int, ways: int) -> int:
            nonlocal work
            if ci == nclasses:
                if rem != 0:
                    return 0
                work += 1
                if work > max_work:
                    raise ResourceLimitError(
                        f"work budget exhausted counting {spec}: "
                        f"{work} allocation steps > {max_work} "
                        f"({len(memo)} states stored)",
                        kind="work", limit=max_work, used=work)
                child = tuple(sorted(new_parts, reverse=True))
                return ways * count_state(child)
            if rem > suffix_cap[ci]:
                return 0
            return pick(ci, min(classes[ci][0], rem), classes[ci][1], rem, ways)

        def pick(ci: int, a: int, rows_left: int, rem: int, ways: int) -> int:
            # hand amounts <= a to rows_left remaining rows of class ci
            if rows_left == 0:
                return alloc_class(ci + 1, rem, ways)
            lo = lo_amounts[ci]
            if a < lo:
                return 0
            if rows_left * lo > rem:
                return 0
            if rows_left * a + suffix_cap[ci + 1] < rem:
                return 0
            v = classes[ci][0]
            comb_left = comb_rows[rows_left]
            acc = 0
            new_val = v - a
            for k in range(rows_left + 1):
                used = k * a
                if used > rem:
                    break
                if k:
                    new_parts.extend([new_val] * k)
                sub = pick(ci, a - 1, rows_left - k, rem - used, ways * comb_left[k])
                if sub:
                    acc += sub
                if k:
                    del new_parts[-k:]
            return acc

        result = alloc_class(0, t, 1)
        if len(memo) >= max_states:
            raise ResourceLimitError(
                f"state cap exhausted counting {spec}: "
                f"{len(memo)} states stored >= {max_states}",
                kind="states", limit=max_states, used=len(memo))
        memo[state] = result
        return result

    old_limit = sys.getrecursionlimit()
    needed = n + 2 * m + 500
    if needed > old_limit:
        sys.setrecursionlimit(needed)
    try:
        return count_state((s,) * m)
    finally:
        if needed > old_limit:
            sys.setrecursionlimit(old_limit)


def count_bruteforce(spec: TableSpec) -> int:
    """Independent oracle: enumerate matrices row by row.

    Only for desk-sized instances: m*n <= 12 and s <= 20, otherwise the
    enumeration is rejected outright.
    """
    if spec.m * spec.n > BRUTEFORCE_MAX_CELLS:
        raise InvalidSpecError(
            f"brute force restricted to m*n <= {BRUTEFORCE_MAX_CELLS}, "
            f"got {spec.m}*{spec.n} = {spec.m * spec.n}")
    if spec.s > BRUTEFORCE_MAX_ROWSUM:
        raise InvalidSpecError(
            f"brute force restricted to s <= {BRUTEFORCE_MAX_ROWSUM}, got {spec.s}")
    m, s, n, t = spec.m, spec.s, spec.n, spec.t
    rows = list(_compositions(s, n))

    def place(i: int, colsums: tuple[int, ...]) -> int:
        if i == m:
            return 1 if all(c == t for c in colsums) else 0
        remaining = m - i - 1
        acc = 0
        for row in rows:
            nxt = tuple(c + r for c, r in zip(colsums, row))
            # a column already over target, or too far behind to catch up
            if any(c > t or t - c > remaining * s for c in nxt):
                continue
            acc += place(i + 1, nxt)
        return acc

    return place(0, (0,) * n)


def _two_column_count(classes: list[list[int]], t: int, m: int) -> int:
    """Labeled solutions of sum(x_i) = t with max(0, v_i - t) <= x_i <= min(v_i, t).

    classes holds (deficit value, multiplicity) pairs.  Standard inclusion
    exclusion over per-class bound violations after shifting each x to its
    lower bound; multiplicities keep the subset walk to prod(mu + 1) terms.
    """
    from math import comb

    shifted = t
    caps = []
    for v, mu in classes:
        lo = max(0, v - t)
        hi = min(v, t)
        if hi < lo:
            return 0
        shifted -= mu * lo
        caps.append((hi - lo, mu))
    if shifted < 0:
        return 0

    total = 0

    def walk(ci: int, sign: int, choose: int, rem: int):
        nonlocal total
        if rem < 0:
            return
        if ci == len(caps):
            total += sign * choose * comb(rem + m - 1, m - 1)
            return
        cap, mu = caps[ci]
        step = cap + 1
        for j in range(mu + 1):
            over = j * step
            if over > rem:
                break
            walk(ci + 1, sign if j % 2 == 0 else -sign,
                 choose * comb(mu, j), rem - over)

    walk(0, 1, 1, shifted)
    return total


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _pascal(nmax: int) -> list[list[int]]:
    rows = [[1]]
    for i in range(1, nmax + 1):
        prev = rows[-1]
        rows.append([1] + [prev[j - 1] + prev[j] for j in range(1, i)] + [1])
    return rows
