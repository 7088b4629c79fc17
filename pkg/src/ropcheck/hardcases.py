"""Hard instance families and locality experiments.

The polynomial family prod(x_i - 1) + prod(x_i) is never read-once for
n >= 3, yet over GF(2) every assignment makes all trivariate restrictions
read-once, so local tests cannot distinguish it.  The Boolean pair
(AND of all) OR (AND of all negations), and its monotone variant, play the
same role for {AND, OR} formulas: read-many, but every single-variable
restriction is read-once.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Optional, Tuple

from .charax import is_locally_rop
from .errors import InvalidParams, TooFewVariables, TooManyVariables
from .ff import Felt, FieldCtx
from .mpoly import MPoly

EXHAUSTIVE_LIMIT = 2_000_000
SWEEP_CSV_HEADER = "p,n,samples,good_fraction,stderr"


def q_n(n: int, ctx: FieldCtx) -> MPoly:
    """prod_{i<=n} (x_i - 1) + prod_{i<=n} x_i, fully expanded."""
    if n < 1:
        raise InvalidParams(f"need n >= 1, got {n}")
    shifted = MPoly.constant(ctx, n, 1)
    straight = MPoly.constant(ctx, n, 1)
    for i in range(n):
        shifted = shifted * MPoly.affine(ctx, n, i, 1, -1)
        straight = straight * MPoly.variable(ctx, n, i)
    return shifted + straight


def size_wrt(a, values) -> int:
    """Count of coordinates of a lying in the value set."""
    pool = set()
    ctx = None
    for v in values:
        if isinstance(v, Felt):
            ctx = v.ctx
    for v in a:
        if isinstance(v, Felt):
            ctx = v.ctx
    norm = (lambda v: ctx.coerce(v)) if ctx is not None else (lambda v: v)
    for v in values:
        pool.add(norm(v))
    return sum(1 for v in a if norm(v) in pool)


@dataclass(frozen=True)
class SweepRow:
    p: int
    n: int
    samples: int
    good_fraction: float
    stderr: float

    def to_csv_row(self) -> str:
        return (f"{self.p},{self.n},{self.samples},"
                f"{self.good_fraction:.6f},{self.stderr:.6f}")


def local_rop_fraction(P: MPoly, samples: int, rng) -> SweepRow:
    """Fraction of assignments at which every trivariate restriction is
    read-once; exhaustive when the whole domain fits the desk-scale limit,
    Monte-Carlo with a binomial standard error otherwise.
    """
    n = P.arity
    if n < 4:
        raise TooFewVariables(f"locality sweeps need arity >= 4, got {n}")
    p = P.ctx.p
    if p ** n <= EXHAUSTIVE_LIMIT:
        total = p ** n
        good = 0
        for a in itertools.product(range(p), repeat=n):
            if is_locally_rop(P, a)[0]:
                good += 1
        return SweepRow(p, n, total, good / total, 0.0)
    if samples < 1:
        raise InvalidParams(f"need at least one sample, got {samples}")
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    good = 0
    for _ in range(samples):
        a = tuple(rng.randrange(p) for _ in range(n))
        if is_locally_rop(P, a)[0]:
            good += 1
    frac = good / samples
    stderr = math.sqrt(frac * (1.0 - frac) / samples)
    return SweepRow(p, n, samples, frac, stderr)


# ---- Boolean counterparts ----

@dataclass(frozen=True)
class BoolFn:
    """Truth table over n bits; index bit i carries the value of x_i."""
    n: int
    table: Tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != 1 << self.n:
            raise InvalidParams(
                f"table length {len(self.table)} != 2**{self.n}")
        if any(v not in (0, 1) for v in self.table):
            raise InvalidParams("table entries must be 0/1")

    def evaluate(self, bits) -> int:
        if len(bits) != self.n:
            raise InvalidParams(f"need {self.n} bits, got {len(bits)}")
        idx = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise InvalidParams(f"bit {i} is {b!r}, not 0/1")
            idx |= b << i
        return self.table[idx]

    def restrict(self, i: int, bit: int) -> "BoolFn":
        """Fix x_i := bit; remaining variables close ranks (slot i removed)."""
        if not 0 <= i < self.n:
            raise InvalidParams(f"variable {i} outside arity {self.n}")
        if bit not in (0, 1):
            raise InvalidParams(f"bit must be 0/1, got {bit!r}")
        m = self.n - 1
        low = (1 << i) - 1
        out = []
        for idx in range(1 << m):
            full = (idx & low) | (bit << i) | ((idx & ~low) << 1)
            out.append(self.table[full])
        return BoolFn(m, tuple(out))

    def depends_on(self, i: int) -> bool:
        step = 1 << i
        return any(self.table[idx] != self.table[idx | step]
                   for idx in range(1 << self.n) if not idx & step)

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.depends_on(i))


def boolean_f(n: int) -> BoolFn:
    """1 exactly on the all-ones and all-zeros inputs."""
    if n < 2:
        raise InvalidParams(f"need n >= 2, got {n}")
    full = (1 << n) - 1
    return BoolFn(n, tuple(1 if idx in (0, full) else 0 for idx in range(1 << n)))


def boolean_g(n: int) -> BoolFn:
    """(y AND (x_1 OR ... OR x_n)) OR (x_1 AND ... AND x_n); y is the last slot."""
    if n < 2:
        raise InvalidParams(f"need n >= 2, got {n}")
    full = (1 << n) - 1
    out = []
    for idx in range(1 << (n + 1)):
        xs = idx & full
        y = idx >> n & 1
        out.append(1 if (y and xs) or xs == full else 0)
    return BoolFn(n + 1, tuple(out))


def _project(table: Tuple[int, ...], m: int) -> Tuple[Tuple[int, ...], int]:
    """Drop dead variables; returns (table2, m2) over the live ones."""
    live = []
    for i in range(m):
        step = 1 << i
        if any(table[idx] != table[idx | step]
               for idx in range(1 << m) if not idx & step):
            live.append(i)
    m2 = len(live)
    out = []
    for idx2 in range(1 << m2):
        idx = 0
        for t, i in enumerate(live):
            if idx2 >> t & 1:
                idx |= 1 << i
        out.append(table[idx])
    return tuple(out), m2


def _split_tables(table, m, mask, op):
    """Candidate factors of table = g OP h across the bipartition (mask, rest).

    AND factors are recovered by OR-projection onto each side, OR factors by
    AND-projection; returns (g, h, reconstruction matches) with g on the
    mask side.
    """
    s_bits = [i for i in range(m) if mask >> i & 1]
    t_bits = [i for i in range(m) if not mask >> i & 1]
    ns, nt = len(s_bits), len(t_bits)
    agg = max if op == "and" else min
    g = [None] * (1 << ns)
    h = [None] * (1 << nt)
    for idx in range(1 << m):
        ia = 0
        for t, i in enumerate(s_bits):
            if idx >> i & 1:
                ia |= 1 << t
        ib = 0
        for t, i in enumerate(t_bits):
            if idx >> i & 1:
                ib |= 1 << t
        v = table[idx]
        g[ia] = v if g[ia] is None else agg(g[ia], v)
        h[ib] = v if h[ib] is None else agg(h[ib], v)
    for idx in range(1 << m):
        ia = 0
        for t, i in enumerate(s_bits):
            if idx >> i & 1:
                ia |= 1 << t
        ib = 0
        for t, i in enumerate(t_bits):
            if idx >> i & 1:
                ib |= 1 << t
        combined = (g[ia] & h[ib]) if op == "and" else (g[ia] | h[ib])
        if combined != table[idx]:
            return None
    return tuple(g), tuple(h)


def boolean_is_read_once(f: BoolFn) -> bool:
    """Is f a formula over {AND, OR} with distinct (possibly negated) leaves?

    Recursive bipartition search: constants and single live variables are
    read-once; otherwise f must factor as g AND h or g OR h across some
    bipartition of its live variables with both factors read-once.
    """
    if f.n > 10:
        raise TooManyVariables(f"truth-table search is limited to 10 variables")
    memo: dict = {}

    def rec(table: Tuple[int, ...], m: int) -> bool:
        table, m = _project(table, m)
        if m <= 1:
            return True
        key = table
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = False
        for mask in range(1, 1 << m, 2):       # var 0 stays on the g side
            if mask == (1 << m) - 1:
                continue
            for op in ("and", "or"):
                split = _split_tables(table, m, mask, op)
                if split is None:
                    continue
                g, h = split
                if rec(g, bin(mask).count("1")) and rec(h, m - bin(mask).count("1")):
                    out = True
                    break
            if out:
                break
        memo[key] = out
        return out

    return rec(f.table, f.n)
