"""Pairwise and triple absolute-difference averages in O(n^2) time.

For a paired sample ``(x_i, y_i)``, ``i = 1..n``, the bundle holds

* ``u1``  : mean of ``|x_i - x_j|`` over unordered pairs,
* ``u2``  : the same for ``y``,
* ``u12`` : mean of ``|x_i - x_j| * |y_i - y_j|`` over unordered pairs,
* ``u3``  : mean over unordered triples of the symmetrized kernel that
  averages ``|x_a - x_b| * |y_a - y_c|`` over the six orderings of the
  triple,
* ``v1 .. v3`` : the corresponding with-replacement means taken over
  all ordered index tuples, repeats included.

The naive triple mean costs O(n^3); it collapses to pairwise quantities
through the identity::

    sum over distinct ordered (i, j, k) of |x_i - x_j| |y_i - y_k|
        = sum_i a_i * b_i  -  sum_(i,j) |x_i - x_j| |y_i - y_j|

where ``a_i`` and ``b_i`` are the full absolute-difference row sums.
Everything here therefore reduces to two difference matrices, their row
sums, and one elementwise product, which also makes the memory-chunked
path for large ``n`` straightforward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PairedSample
from .errors import SampleTooSmall

__all__ = [
    "UStatBundle",
    "PairwiseTables",
    "compute_ustats",
    "compute_ustats_bruteforce",
    "pairwise_tables",
    "bundle_for_permutation",
]

# Above this sample size the difference matrices are built in row blocks
# to cap peak memory near _BLOCK_ELEMENTS floats per matrix.
_CHUNK_LIMIT = 4096
_BLOCK_ELEMENTS = 8_000_000


@dataclass(frozen=True)
class UStatBundle:
    """All pairwise and triple averages of one sample.

    ``u``-prefixed fields average over distinct index tuples, the
    ``v``-prefixed ones over all tuples with repeats.  The two sets are
    tied by exact identities, e.g. ``n**2 * v1 == n * (n-1) * u1`` and
    ``n**3 * v3 == n*(n-1)*(n-2) * u3 + n*(n-1) * u12``.
    """

    u1: float
    u2: float
    u12: float
    u3: float
    v1: float
    v2: float
    v12: float
    v3: float
    n: int


def _bundle_from_sums(
    n: int, sum_x: float, sum_y: float, pair_prod: float, cross: float
) -> UStatBundle:
    # sum_x, sum_y: full ordered-pair sums (2x the unordered sums);
    # pair_prod: sum over ordered pairs of |dx| * |dy|;
    # cross: sum_i a_i * b_i.
    pairs = n * (n - 1)
    square = float(n) * n
    return UStatBundle(
        u1=sum_x / pairs,
        u2=sum_y / pairs,
        u12=pair_prod / pairs,
        u3=(cross - pair_prod) / (pairs * (n - 2)),
        v1=sum_x / square,
        v2=sum_y / square,
        v12=pair_prod / square,
        v3=cross / (square * n),
        n=n,
    )


def compute_ustats(sample: PairedSample) -> UStatBundle:
    """Compute the full bundle in O(n^2) time.

    Parameters
    ----------
    sample : PairedSample
        At least three observations.

    Raises
    ------
    SampleTooSmall
        If ``sample.n < 3`` (the triple mean needs three distinct
        indices).
    """
    n = sample.n
    if n < 3:
        raise SampleTooSmall(f"need at least 3 observations, got {n}")
    x, y = sample.xs, sample.ys

    if n <= _CHUNK_LIMIT:
        dx = np.abs(x[:, None] - x[None, :])
        dy = np.abs(y[:, None] - y[None, :])
        a = dx.sum(axis=1)
        b = dy.sum(axis=1)
        pair_prod = float((dx * dy).sum())
    else:
        a = np.empty(n)
        b = np.empty(n)
        pair_prod = 0.0
        block = max(1, _BLOCK_ELEMENTS // n)
        for start in range(0, n, block):
            stop = min(start + block, n)
            dxb = np.abs(x[start:stop, None] - x[None, :])
            dyb = np.abs(y[start:stop, None] - y[None, :])
            a[start:stop] = dxb.sum(axis=1)
            b[start:stop] = dyb.sum(axis=1)
            pair_prod += float((dxb * dyb).sum())

    return _bundle_from_sums(
        n, float(a.sum()), float(b.sum()), pair_prod, float(a @ b)
    )


def _symmetrized_triple(xi, xj, xk, yi, yj, yk) -> float:
    # Mean of |x_a - x_b| * |y_a - y_c| over the six orderings (a, b, c).
    return (
        abs(xi - xj) * abs(yi - yk)
        + abs(xi - xk) * abs(yi - yj)
        + abs(xj - xi) * abs(yj - yk)
        + abs(xj - xk) * abs(yj - yi)
        + abs(xk - xi) * abs(yk - yj)
        + abs(xk - xj) * abs(yk - yi)
    ) / 6.0


def compute_ustats_bruteforce(sample: PairedSample) -> UStatBundle:
    """Reference bundle by explicit enumeration of index tuples.

    Every pair, triple, and ordered tuple is summed directly, with no
    shared row-sum shortcuts, so this is an independent oracle for
    :func:`compute_ustats`.  O(n^3) time; intended for n up to about
    200.
    """
    n = sample.n
    if n < 3:
        raise SampleTooSmall(f"need at least 3 observations, got {n}")
    x = sample.xs.tolist()
    y = sample.ys.tolist()

    sum1 = sum2 = sum12 = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dx = abs(x[i] - x[j])
            dy = abs(y[i] - y[j])
            sum1 += dx
            sum2 += dy
            sum12 += dx * dy

    triple = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                triple += _symmetrized_triple(x[i], x[j], x[k], y[i], y[j], y[k])

    v1s = v2s = v12s = 0.0
    for i in range(n):
        for j in range(n):
            dx = abs(x[i] - x[j])
            dy = abs(y[i] - y[j])
            v1s += dx
            v2s += dy
            v12s += dx * dy

    # The symmetrized kernel summed over all ordered tuples equals the
    # raw product kernel summed over all ordered tuples.
    v3s = 0.0
    for i in range(n):
        for j in range(n):
            dx = abs(x[i] - x[j])
            for k in range(n):
                v3s += dx * abs(y[i] - y[k])

    pairs = math.comb(n, 2)
    square = float(n) * n
    return UStatBundle(
        u1=sum1 / pairs,
        u2=sum2 / pairs,
        u12=sum12 / pairs,
        u3=triple / math.comb(n, 3),
        v1=v1s / square,
        v2=v2s / square,
        v12=v12s / square,
        v3=v3s / (square * n),
        n=n,
    )


@dataclass(frozen=True, eq=False)
class PairwiseTables:
    """Precomputed difference tables for permutation resampling.

    Holds both difference matrices and their row sums so each permuted
    bundle costs one index gather plus a few reductions instead of a
    fresh O(n^2) rebuild.  Memory is 2 * n**2 floats; intended for the
    sample sizes where permutation tests are practical (a few thousand).
    """

    dx: np.ndarray
    dy: np.ndarray
    a: np.ndarray
    b: np.ndarray
    sum_x: float
    sum_y: float
    n: int


def pairwise_tables(sample: PairedSample) -> PairwiseTables:
    """Build the reusable tables for :func:`bundle_for_permutation`."""
    n = sample.n
    if n < 3:
        raise SampleTooSmall(f"need at least 3 observations, got {n}")
    x, y = sample.xs, sample.ys
    dx = np.abs(x[:, None] - x[None, :])
    dy = np.abs(y[:, None] - y[None, :])
    a = dx.sum(axis=1)
    b = dy.sum(axis=1)
    return PairwiseTables(
        dx=dx, dy=dy, a=a, b=b, sum_x=float(a.sum()), sum_y=float(b.sum()), n=n
    )


def bundle_for_permutation(
    tables: PairwiseTables, perm: np.ndarray | None = None
) -> UStatBundle:
    """Bundle of ``(xs, ys[perm])`` from precomputed tables.

    ``perm=None`` reproduces the original pairing.  Only the y-side
    entries move: the y-difference matrix is gathered along both axes
    and its row sums are a permutation of the originals, so the x-only
    and y-only means are unchanged.
    """
    if perm is None:
        pair_prod = float((tables.dx * tables.dy).sum())
        b = tables.b
    else:
        dyp = tables.dy[perm][:, perm]
        pair_prod = float((tables.dx * dyp).sum())
        b = tables.b[perm]
    return _bundle_from_sums(
        tables.n, tables.sum_x, tables.sum_y, pair_prod, float(tables.a @ b)
    )
