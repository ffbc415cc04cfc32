"""Sequential importance sampling for contingency-table counts.

The sampler fills the table column by column, top to bottom inside each
column.  The proposal treats rows as independent: if the current column
were struck, row i could spread a leftover budget u over the nl remaining
columns in C(u + nl - 1, nl - 1) ways.  Within a column the joint over
entries (x_1..x_m), sum fixed to the column total, is proportional to the
product of those counts; entries are drawn one at a time from the exact
sequential conditionals

    P(x_i = x) ~ C(r_i - x + nl - 1, nl - 1) * W_below(t_rem - x),

where W_below(v) counts the budget-respecting ways the rows below can
absorb v into this column, each weighted by its own spread count.  W_below
is a short convolution computed by dynamic programming per column.  The
cruder surrogate that replaces W_below by the unbudgeted composition count
C(v + mb - 1, mb - 1) has the same support but catastrophically heavy
weight tails already at a 10 x 10, margin-20 table (effective sample sizes
of ~2 out of 1e5); the exact lookahead keeps the effective sample size
above 98% there.

The support at each step is lo = max(0, t_rem - sum of budgets below) ..
hi = min(r_i, t_rem): within it every value leads to at least one valid
completion, outside it none does, so the proposal never dead-ends and
reaches every valid table.  In the last column the range collapses to
x = r_i by conservation.

Each sample carries the weight 1/q(table); averaging the weights gives an
unbiased estimate of the count.  Everything is accumulated in log space
since the counts of interest reach 1e127.  Sample i is a pure function of
(seed, i): the uniforms come from a counter-based Philox stream generated
as one block up front, and all per-sample arithmetic is independent of
batching, so results do not depend on chunk sizes or threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from .core import InvalidSpecError, LogEstimate, TableSpec, log_binomial

_NEG_INF = float("-inf")
_CHUNK = 20_000


@dataclass(frozen=True)
class McEstimate:
    """Importance-sampling estimate of a table count, kept in log space."""

    log_mean: float
    log_standard_error: float
    sample_count: int
    seed: int
    effective_sample_size: float

    @property
    def mean(self) -> LogEstimate:
        return LogEstimate(self.log_mean)

    @property
    def standard_error(self) -> float:
        return math.exp(self.log_standard_error)

    @property
    def relative_standard_error(self) -> float:
        return math.exp(self.log_standard_error - self.log_mean)


def mc_estimate(spec: TableSpec, samples: int, seed: int = 0) -> McEstimate:
    """Estimate the count from `samples` importance-sampling draws."""
    if not isinstance(samples, int) or samples < 2:
        raise InvalidSpecError(
            f"need at least 2 samples for a standard error, got {samples}")
    logw = _batch_log_weights(spec, samples, seed)
    lse1 = float(logsumexp(logw))
    lse2 = float(logsumexp(2.0 * logw))
    log_n = math.log(samples)
    log_mean = lse1 - log_n
    # sample variance: (sum w^2 - n mean^2) / (n - 1); Cauchy-Schwarz keeps
    # the difference nonnegative up to roundoff
    spread = -math.expm1(min(0.0, 2.0 * lse1 - log_n - lse2))
    if spread <= 0.0:
        log_se = _NEG_INF
    else:
        log_var = lse2 + math.log(spread) - math.log(samples - 1)
        log_se = 0.5 * (log_var - log_n)
    ess = math.exp(min(0.0, 2.0 * lse1 - lse2 - log_n)) * samples
    return McEstimate(log_mean=log_mean, log_standard_error=log_se,
                      sample_count=samples, seed=seed,
                      effective_sample_size=ess)


def sample_table(spec: TableSpec, rng) -> tuple[tuple[tuple[int, ...], ...], float]:
    """Draw one table; returns (matrix as row tuples, log importance weight).

    `rng` is either an integer seed or a numpy Generator.
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.Generator(np.random.Philox(int(rng)))
    logw, tables = _batch_log_weights(spec, 1, rng, want_tables=True)
    matrix = tuple(tuple(int(v) for v in row) for row in tables[0])
    return matrix, float(logw[0])


def enumerate_proposal(spec: TableSpec):
    """All (table, proposal probability) pairs, in exact rational arithmetic.

    Walks every decision path of the sampler with the same conditionals the
    float code uses.  Paths are in bijection with valid tables, the
    probabilities sum to 1, and the weighted average of the weights 1/q
    reproduces the exact count; these are the facts the unbiasedness tests
    assert.  Desk-scale specs only.
    """
    _positive_density(spec)
    m, s, n, t = spec.m, spec.s, spec.n, spec.t
    results: list[tuple[tuple[tuple[int, ...], ...], Fraction]] = []
    column_major: list[list[int]] = [[0] * m for _ in range(n)]

    def absorb_below(budgets: tuple[int, ...], i: int, v: int, nl: int) -> int:
        # ways rows i.. can absorb v into this column, weighted by their
        # later-column spread counts
        if i == len(budgets):
            return 1 if v == 0 else 0
        total = 0
        for x in range(min(budgets[i], v) + 1):
            rest = absorb_below(budgets, i + 1, v - x, nl)
            if rest:
                total += _spread_count(budgets[i] - x, nl) * rest
        return total

    def fill(j: int, i: int, budgets: tuple[int, ...], t_rem: int, q: Fraction):
        if j == n:
            table = tuple(tuple(column_major[jj][ii] for jj in range(n))
                          for ii in range(m))
            results.append((table, q))
            return
        if i == m:
            assert t_rem == 0
            fill(j + 1, 0, budgets, t, q)
            return
        nl = n - 1 - j
        support = []
        for x in range(min(budgets[i], t_rem) + 1):
            w = (_spread_count(budgets[i] - x, nl)
                 * absorb_below(budgets, i + 1, t_rem - x, nl))
            if w:
                support.append((x, w))
        z = sum(w for _x, w in support)
        assert support and z > 0
        for x, w in support:
            column_major[j][i] = x
            new_budgets = budgets[:i] + (budgets[i] - x,) + budgets[i + 1:]
            fill(j, i + 1, new_budgets, t_rem - x, q * Fraction(w, z))
        column_major[j][i] = 0

    fill(0, 0, (s,) * m, t, Fraction(1))
    return results


def _spread_count(v: int, parts: int) -> int:
    """Ways to spread v over `parts` ordered nonnegative cells (1 way if none left)."""
    if parts == 0:
        return 1 if v == 0 else 0
    return math.comb(v + parts - 1, parts - 1)


def _batch_log_weights(spec: TableSpec, samples: int, seed_or_rng,
                       want_tables: bool = False):
    """Vectorized sampler core: log weights for `samples` draws.

    Margins of every sampled table are asserted before returning.
    """
    _positive_density(spec)
    m, s, n, t = spec.m, spec.s, spec.n, spec.t
    if isinstance(seed_or_rng, np.random.Generator):
        rng = seed_or_rng
    else:
        rng = np.random.Generator(np.random.Philox(int(seed_or_rng)))
    uniforms = rng.random((samples, m * n))
    log_row = _log_spread_table(s, n)   # log_row[nl][u], u = budget left
    logw = np.empty(samples, dtype=np.float64)
    tables = np.zeros((samples, m, n), dtype=np.int64) if want_tables else None
    for start in range(0, samples, _CHUNK):
        stop = min(samples, start + _CHUNK)
        chunk_tables = tables[start:stop] if want_tables else None
        logw[start:stop] = _sample_chunk(
            m, s, n, t, log_row, uniforms[start:stop], chunk_tables)
    return (logw, tables) if want_tables else logw


def _sample_chunk(m, s, n, t, log_row, uniforms, tables):
    size = uniforms.shape[0]
    budgets = np.full((size, m), s, dtype=np.int64)
    total_logw = np.zeros(size, dtype=np.float64)
    xs = np.arange(t + 1, dtype=np.int64)[None, :]
    rows_idx = np.arange(size)
    for j in range(n):
        nl = n - 1 - j
        # per-row entry weights at the start of the column: a[i][:, x]
        a_log = np.empty((m, size, t + 1))
        for i in range(m):
            u = budgets[:, i, None] - xs
            a_log[i] = np.where(u >= 0, log_row[nl][np.clip(u, 0, s)], _NEG_INF)
        # lookahead: w_log[i][:, v] = log of the weighted ways rows i.. can
        # absorb v into this column (a log-space convolution, done scaled)
        w_log = np.full((m + 1, size, t + 1), _NEG_INF)
        w_log[m][:, 0] = 0.0
        for i in range(m - 1, 0, -1):
            w_log[i] = _log_convolve(a_log[i], w_log[i + 1])
        t_rem = np.full(size, t, dtype=np.int64)
        for i in range(m):
            v = t_rem[:, None] - xs
            lw = np.where(v >= 0,
                          a_log[i] + w_log[i + 1][rows_idx[:, None],
                                                  np.clip(v, 0, t)],
                          _NEG_INF)
            log_z = logsumexp(lw, axis=1)
            assert np.isfinite(log_z).all(), "proposal support vanished"
            cdf = np.cumsum(np.exp(lw - log_z[:, None]), axis=1)
            idx = (cdf < uniforms[:, j * m + i, None]).sum(axis=1)
            x = np.minimum(idx, np.minimum(budgets[:, i], t_rem))
            total_logw += log_z - lw[rows_idx, x]
            budgets[:, i] -= x
            t_rem -= x
            if tables is not None:
                tables[:, i, j] = x
        assert (t_rem == 0).all(), "column sum not met"
    assert (budgets == 0).all(), "row sum not met"
    return total_logw


def _log_convolve(a_log, b_log):
    """Row-wise log-space convolution of (size, t+1) tables, truncated to t+1."""
    width = a_log.shape[1]
    a_max = a_log.max(axis=1, keepdims=True)
    b_max = b_log.max(axis=1, keepdims=True)
    a = np.exp(a_log - a_max)
    b = np.exp(b_log - b_max)
    out = np.zeros_like(a)
    for shift in range(width):
        out[:, shift:] += a[:, shift:shift + 1] * b[:, :width - shift]
    with np.errstate(divide="ignore"):
        return np.log(out) + a_max + b_max


def _log_spread_table(max_value: int, max_parts: int) -> list[np.ndarray]:
    """tab[p][v] = log(ways to spread v over p ordered nonnegative cells)."""
    tab = []
    for parts in range(max_parts):
        if parts == 0:
            row = np.full(max_value + 1, _NEG_INF)
            row[0] = 0.0
        else:
            row = np.array([log_binomial(v + parts - 1, parts - 1)
                            for v in range(max_value + 1)])
        tab.append(row)
    return tab


def _positive_density(spec: TableSpec) -> None:
    if spec.density == 0:
        raise InvalidSpecError(
            f"importance sampling needs positive margins, got s={spec.s}")
