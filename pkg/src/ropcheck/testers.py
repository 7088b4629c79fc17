"""Black-box read-once testers over counting oracles.

Two algorithms:

* read_once_test: one random base point, then for every 3-subset I of the
  coordinates a (d+1)^3 interpolation grid along I; rejects on a
  non-multilinear or non-read-once trivariate restriction.  One-sided:
  read-once oracles always pass.
* property_test_once / property_test: three base points aligned per
  coordinate give 27-point grids; the wrapper repeats the once-tester
  enough times for the distance parameter.

tau_estimate measures the aligned-triple statistic: the fraction of random
axis triples whose univariate interpolant is not affine.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from typing import Optional, Tuple

from .decomp import trivariate_is_rop
from .errors import (
    ArityMismatch,
    DegreeTooSmall,
    FieldTooSmall,
    InvalidParams,
)
from .mpoly import interpolate_grid
from .rof import Oracle

YES = "YES"
NO = "NO"
NOT_MULTILINEAR = "NOT_MULTILINEAR"
NOT_ROP = "NOT_ROP"


@dataclass(frozen=True)
class TestReport:
    verdict: str
    failing_I: Optional[Tuple[int, ...]]
    failure_kind: Optional[str]
    queries: int
    seed: Optional[int]
    repeats: int

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "failing_I": [t + 1 for t in self.failing_I] if self.failing_I else None,
            "failure_kind": self.failure_kind,
            "queries": self.queries,
            "seed": self.seed,
            "repeats": self.repeats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


@dataclass(frozen=True)
class AlignedTriple:
    base: Tuple[int, ...]
    coordinate: int
    values: Tuple[int, int, int]


@dataclass(frozen=True)
class TauEstimate:
    fraction: float
    stderr: float
    samples: int


def _rng_and_seed(rng) -> Tuple[random.Random, Optional[int]]:
    if isinstance(rng, int):
        return random.Random(rng), rng
    return rng, None


def _subsets(n: int):
    """3-subsets in lex order; below 3 coordinates, one grid over all of them.

    The literal subset family is empty for n < 3, which would accept any
    oracle; testing the full coordinate set instead keeps the multilinearity
    check meaningful there.
    """
    if n >= 3:
        return list(itertools.combinations(range(n), 3))
    return [tuple(range(n))]


def _grid_check(oracle: Oracle, base, I, axes, store):
    """Query the grid over I, interpolate, and classify the restriction."""
    combos = list(itertools.product(*axes))
    pts = []
    for combo in combos:
        pt = list(base)
        for slot, v in zip(I, combo):
            pt[slot] = v
        pts.append(tuple(pt))
    if store is None:
        vals = oracle.query_many(pts)
    else:
        missing = [pt for pt in pts if pt not in store]
        if missing:
            for pt, v in zip(missing, oracle.query_many(missing)):
                store[pt] = v
        vals = [store[pt] for pt in pts]
    Q = interpolate_grid(oracle.ctx, axes, dict(zip(combos, vals)))
    if not Q.is_multilinear():
        return NOT_MULTILINEAR
    if not trivariate_is_rop(Q):
        return NOT_ROP
    return None


def read_once_test(oracle: Oracle, n: int, d: int, epsilon: float = 0.25,
                   rng=0, cache: bool = True) -> TestReport:
    """One-sided black-box read-once test for degree-at-most-d oracles.

    Soundness degrades with the field size; callers wanting the 1-epsilon
    rejection guarantee need p >= max(1.5 n^4, d) / epsilon (see
    recommended_field_size).  Queries: C(n,3) * (d+1)^3 with caching off.
    """
    if n != oracle.arity:
        raise ArityMismatch(f"n={n} but the oracle has arity {oracle.arity}")
    if d < 1:
        raise DegreeTooSmall(f"degree bound must be >= 1, got {d}")
    p = oracle.ctx.p
    if p < d + 1:
        raise FieldTooSmall(f"interpolation on {d + 1} nodes needs p >= {d + 1}")
    if not 0 < epsilon < 1:
        raise InvalidParams(f"epsilon must be in (0, 1), got {epsilon}")
    rng, seed = _rng_and_seed(rng)
    start = oracle.query_count
    base = [rng.randrange(p) for _ in range(n)]
    axis = list(range(d + 1))
    store: Optional[dict] = {} if cache else None
    for I in _subsets(n):
        kind = _grid_check(oracle, base, I, [axis] * len(I), store)
        if kind is not None:
            return TestReport(NO, I, kind, oracle.query_count - start, seed, 1)
    return TestReport(YES, None, None, oracle.query_count - start, seed, 1)


def recommended_field_size(n: int, d: int, epsilon: float) -> float:
    """Field-size threshold for the read_once_test soundness guarantee."""
    return max(1.5 * n**4, d) / epsilon


def _draw_distinct_triples(ctx, n, rng):
    """Three points of F^n, coordinatewise pairwise distinct, by rejection."""
    p = ctx.p
    a, b, c = [], [], []
    for _ in range(n):
        x = rng.randrange(p)
        y = rng.randrange(p)
        while y == x:
            y = rng.randrange(p)
        z = rng.randrange(p)
        while z == x or z == y:
            z = rng.randrange(p)
        a.append(x)
        b.append(y)
        c.append(z)
    return a, b, c


def property_test_once(oracle: Oracle, n: int, rng=0) -> TestReport:
    """One round of the 27-point property test."""
    if n != oracle.arity:
        raise ArityMismatch(f"n={n} but the oracle has arity {oracle.arity}")
    p = oracle.ctx.p
    if p < 3:
        raise FieldTooSmall("aligned triples need p >= 3")
    rng, seed = _rng_and_seed(rng)
    start = oracle.query_count
    a, b, c = _draw_distinct_triples(oracle.ctx, n, rng)
    for I in _subsets(n):
        axes = [[a[i], b[i], c[i]] for i in I]
        kind = _grid_check(oracle, a, I, axes, None)
        if kind is not None:
            return TestReport(NO, I, kind, oracle.query_count - start, seed, 1)
    return TestReport(YES, None, None, oracle.query_count - start, seed, 1)


def property_test(oracle: Oracle, n: int, delta: float, rng=0,
                  K: int = 3) -> TestReport:
    """Repeat property_test_once ceil(K / (delta + n^-4)) times.

    NO as soon as any round rejects; the repeat count R is recorded in the
    report either way.
    """
    if not 0 < delta <= 1:
        raise InvalidParams(f"delta must be in (0, 1], got {delta}")
    if K < 1:
        raise InvalidParams(f"K must be >= 1, got {K}")
    rng, seed = _rng_and_seed(rng)
    R = math.ceil(K / (delta + float(n) ** -4))
    start = oracle.query_count
    for _ in range(R):
        rep = property_test_once(oracle, n, rng)
        if rep.verdict == NO:
            return TestReport(NO, rep.failing_I, rep.failure_kind,
                              oracle.query_count - start, seed, R)
    return TestReport(YES, None, None, oracle.query_count - start, seed, R)


def draw_aligned_triple(ctx, n: int, rng, coordinate: Optional[int] = None) -> AlignedTriple:
    """Random base point, random (or forced) coordinate, 3 distinct axis values."""
    p = ctx.p
    if p < 3:
        raise FieldTooSmall("aligned triples need p >= 3")
    base = tuple(rng.randrange(p) for _ in range(n))
    i = rng.randrange(n) if coordinate is None else coordinate
    if not 0 <= i < n:
        raise ArityMismatch(f"coordinate {i} outside arity {n}")
    x = rng.randrange(p)
    y = rng.randrange(p)
    while y == x:
        y = rng.randrange(p)
    z = rng.randrange(p)
    while z == x or z == y:
        z = rng.randrange(p)
    return AlignedTriple(base, i, (x, y, z))


def tau_estimate(oracle: Oracle, n: int, samples: int, rng=0,
                 coordinate: Optional[int] = None) -> TauEstimate:
    """Fraction of random aligned triples whose axis interpolant is not affine.

    The quadratic Newton coefficient (the second divided difference) of the
    three queried values is nonzero exactly when the interpolant has degree
    2, so the per-sample test is exact.
    """
    if n != oracle.arity:
        raise ArityMismatch(f"n={n} but the oracle has arity {oracle.arity}")
    if samples < 1:
        raise InvalidParams(f"need at least one sample, got {samples}")
    ctx = oracle.ctx
    p = ctx.p
    if p < 3:
        raise FieldTooSmall("aligned triples need p >= 3")
    rng, _ = _rng_and_seed(rng)
    hits = 0
    for _ in range(samples):
        trip = draw_aligned_triple(ctx, n, rng, coordinate)
        x0, x1, x2 = trip.values
        pts = []
        for v in trip.values:
            pt = list(trip.base)
            pt[trip.coordinate] = v
            pts.append(tuple(pt))
        f0, f1, f2 = oracle.query_many(pts)
        d01 = (f1 - f0) * ctx.inv_raw(x1 - x0) % p
        d12 = (f2 - f1) * ctx.inv_raw(x2 - x1) % p
        if (d12 - d01) * ctx.inv_raw(x2 - x0) % p:
            hits += 1
    frac = hits / samples
    stderr = math.sqrt(frac * (1.0 - frac) / samples)
    return TauEstimate(frac, stderr, samples)
