"""Decomposition structure of multilinear polynomials.

The central objects:

* the pair commutator D(P) = P * dd_ij(P) - d_i(P) * d_j(P), whose being a
  constant multiple of the mixed second partial dd_ij(P) characterizes
  splitting P as h*g + c with x_i and x_j on opposite sides;
* the decomposition witness W(P): a polynomial in two copies of the
  variables (x-block slots 0..n-1, y-block slots n..2n-1) that vanishes
  identically exactly when dd_ij(P) is zero or P splits for some constant.
  A shared index set J glues y_k := x_k for k in J;
* the gate graph: edge (i, j) iff dd_ij(P) != 0; connected components are
  exactly the additive pieces of P;
* exact splitting routines and a brute-force read-once decider used as the
  ground truth in tests.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import (
    IndexOverlap,
    InvalidParams,
    NotDecomposable,
    NotMultilinear,
    NotSeparableAlongCut,
    SameVariable,
    TooManyVariables,
    VariableNotPresent,
)
from .ff import Felt
from .mpoly import MPoly

_SCAN_CAP = 1 << 16


def _require_multilinear(P: MPoly):
    if not P.is_multilinear():
        raise NotMultilinear(f"operation needs a multilinear polynomial, got {P!r}")


def commutator(P: MPoly, i: int, j: int) -> MPoly:
    """P * dd_ij(P) - d_i(P) * d_j(P); the pair commutator of slots i and j."""
    if i == j:
        raise SameVariable(f"need two distinct variables, got {i} twice")
    _require_multilinear(P)
    return P * P.partial2(i, j) - P.partial(i) * P.partial(j)


def find_nonzero_point(P: MPoly, rng: random.Random | None = None) -> Tuple[int, ...]:
    """A full-arity point where P is nonzero.

    Deterministic scan first: the {0,1} grid over the support always contains
    such a point for a nonzero multilinear polynomial, and the 3-value grid
    covers low-degree non-multilinear inputs; a seeded random fallback guards
    the capped scans.  Raises on the zero polynomial.
    """
    if P.is_zero():
        raise InvalidParams("the zero polynomial has no nonzero point")
    base = [0] * P.arity
    vs = sorted(P.variables())
    if not vs:
        return tuple(base)
    p = P.ctx.p
    for radix in (2, 3):
        m = min(p, radix)
        if m ** len(vs) > _SCAN_CAP:
            break
        for combo in itertools.product(range(m), repeat=len(vs)):
            for v, x in zip(vs, combo):
                base[v] = x
            if P.eval_raw(base):
                return tuple(base)
        if m >= p:
            break
    rng = rng if rng is not None else random.Random(0)
    for _ in range(4096):
        for v in vs:
            base[v] = rng.randrange(p)
        if P.eval_raw(base):
            return tuple(base)
    raise InvalidParams("could not locate a nonzero point")


@dataclass(frozen=True)
class DecompResult:
    """Outcome of a split test: P = h*g + c with i, j on opposite sides.

    degenerate marks the case dd_ij(P) == 0, where no such split exists and
    no constant is defined.
    """
    decomposable: bool
    c: Optional[Felt]
    degenerate: bool


def decompose(P: MPoly, i: int, j: int, rng: random.Random | None = None) -> DecompResult:
    """Exact split test for the pair (i, j).

    P is decomposable iff D(P) = c * dd_ij(P) for the unique candidate
    c = D(w) / dd_ij(P)(w) at any point w where the second partial is
    nonzero; the identity is then verified symbolically.
    """
    if i == j:
        raise SameVariable(f"need two distinct variables, got {i} twice")
    _require_multilinear(P)
    pv = P.variables()
    for t in (i, j):
        if t not in pv:
            raise VariableNotPresent(f"x{t + 1} does not occur in the polynomial")
    S = P.partial2(i, j)
    if S.is_zero():
        return DecompResult(False, None, True)
    D = commutator(P, i, j)
    w = find_nonzero_point(S, rng)
    ctx = P.ctx
    c = D.eval_raw(w) * ctx.inv_raw(S.eval_raw(w)) % ctx.p
    if (D - S.scale(c)).is_zero():
        return DecompResult(True, Felt(c, ctx), False)
    return DecompResult(False, None, False)


# ---- decomposition witness ----

@dataclass(frozen=True)
class WitnessPoly:
    """Materialized witness: value lives on 2n slots (x-block then y-block)."""
    i: int
    j: int
    shared: FrozenSet[int]
    value: MPoly


def decomp_witness(P: MPoly, i: int, j: int,
                   shared: FrozenSet[int] | Sequence[int] = frozenset()) -> WitnessPoly:
    """Build W(P) = D(x) * S(y) - S(x) * D(y) with y_k := x_k for k in shared.

    D is the pair commutator and S the mixed second partial; the result has
    arity 2n and individual degree at most 3 (at most 2 on unshared slots).
    """
    shared = frozenset(shared)
    if i in shared or j in shared:
        raise IndexOverlap(f"shared set {sorted(shared)} overlaps the pair ({i}, {j})")
    _require_multilinear(P)
    n = P.arity
    for k in shared:
        if not 0 <= k < n:
            raise IndexOverlap(f"shared index {k} outside arity {n}")
    D = commutator(P, i, j)
    S = P.partial2(i, j)
    x_map = {v: v for v in range(n)}
    y_map = {v: (v if v in shared else v + n) for v in range(n)}
    Dx = D.embed(2 * n, x_map)
    Sx = S.embed(2 * n, x_map)
    Dy = D.embed(2 * n, y_map)
    Sy = S.embed(2 * n, y_map)
    return WitnessPoly(i, j, shared, Dx * Sy - Sx * Dy)


def witness_is_zero(P: MPoly, i: int, j: int,
                    shared: FrozenSet[int] | Sequence[int] = frozenset(),
                    mode: str = "exact", rng: random.Random | None = None,
                    reps: int = 40) -> bool:
    """Decide W(P) == 0 for the pair (i, j) and a shared index set.

    exact mode: with no shared indices this reduces to 'dd_ij(P) == 0 or the
    pair decomposes'.  A nonempty shared set J is eliminated by restricting
    each J slot to 4 grid values (enough since shared slots have degree at
    most 3 in W) and recursing; fields smaller than 5 fall back to
    materializing the witness.

    fast mode: evaluates W at `reps` random points; one-sided (False answers
    are proofs, True answers can err with probability <= (deg/|V|)**reps).
    """
    shared = frozenset(shared)
    if i == j:
        raise SameVariable(f"need two distinct variables, got {i} twice")
    if i in shared or j in shared:
        raise IndexOverlap(f"shared set {sorted(shared)} overlaps the pair ({i}, {j})")
    _require_multilinear(P)
    n = P.arity
    for k in shared:
        if not 0 <= k < n:
            raise IndexOverlap(f"shared index {k} outside arity {n}")

    if mode == "fast":
        return _witness_sz(P, i, j, shared, rng, reps)
    if mode != "exact":
        raise InvalidParams(f"mode must be 'exact' or 'fast', got {mode!r}")

    S = P.partial2(i, j)
    if S.is_zero():
        return True
    if not shared:
        return decompose(P, i, j).decomposable
    if P.ctx.p >= 5:
        order = sorted(shared)
        point = [0] * n
        for combo in itertools.product(range(4), repeat=len(order)):
            for k, x in zip(order, combo):
                point[k] = x
            Q = P.restrict_many(order, point)
            SQ = Q.partial2(i, j)
            if SQ.is_zero():
                continue
            if not decompose(Q, i, j).decomposable:
                return False
        return True
    return decomp_witness(P, i, j, shared).value.is_zero()


def _witness_sz(P: MPoly, i: int, j: int, shared: FrozenSet[int],
                rng: random.Random | None, reps: int) -> bool:
    if reps < 1:
        raise InvalidParams(f"need at least one repetition, got {reps}")
    rng = rng if rng is not None else random.Random(0)
    ctx = P.ctx
    p = ctx.p
    n = P.arity
    D = commutator(P, i, j)
    S = P.partial2(i, j)
    if S.is_zero():
        return True
    for _ in range(reps):
        x = [rng.randrange(p) for _ in range(n)]
        y = [rng.randrange(p) for _ in range(n)]
        for k in shared:
            y[k] = x[k]
        v = (D.eval_raw(x) * S.eval_raw(y) - S.eval_raw(x) * D.eval_raw(y)) % p
        if v:
            return False
    return True


# ---- gate graph ----

class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass(frozen=True)
class GateGraph:
    """Variables of P with an edge wherever a mixed second partial is nonzero."""
    vertices: FrozenSet[int]
    edges: FrozenSet[Tuple[int, int]]  # each edge stored as (min, max)

    def neighbors(self, v: int) -> FrozenSet[int]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return frozenset(out)

    def components(self) -> List[FrozenSet[int]]:
        """Connected components, sorted by their smallest vertex."""
        uf = _UnionFind(self.vertices)
        for a, b in self.edges:
            uf.union(a, b)
        groups: Dict[int, set] = {}
        for v in self.vertices:
            groups.setdefault(uf.find(v), set()).add(v)
        return sorted((frozenset(g) for g in groups.values()), key=min)

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def without_vertex(self, v: int) -> "GateGraph":
        return GateGraph(self.vertices - {v},
                         frozenset(e for e in self.edges if v not in e))


def gate_graph(P: MPoly) -> GateGraph:
    _require_multilinear(P)
    vs = sorted(P.variables())
    edges = set()
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            if not P.partial2(vs[a], vs[b]).is_zero():
                edges.add((vs[a], vs[b]))
    return GateGraph(frozenset(vs), frozenset(edges))


def is_additively_separable(P: MPoly) -> bool:
    """True iff P = P1 + P2 on disjoint nonempty variable sets."""
    _require_multilinear(P)
    if len(P.variables()) < 2:
        return False
    return not gate_graph(P).is_connected()


def additive_split(P: MPoly, part) -> Tuple[MPoly, MPoly]:
    """Split P = P1 + P2 along the cut (part, rest); P1 keeps the constant.

    part must be a nonempty proper subset of the support; the reconstruction
    is verified and NotSeparableAlongCut raised when the cut crosses a term.
    """
    _require_multilinear(P)
    vs = P.variables()
    side = frozenset(part)
    if not side or not side.issubset(vs) or side == vs:
        raise InvalidParams(
            f"cut {sorted(side)} is not a nonempty proper subset of {sorted(vs)}")
    zeros = [0] * P.arity
    P1 = P.restrict_many(vs - side, zeros)
    P2 = P.restrict_many(side, zeros) - MPoly.constant(P.ctx, P.arity, P.eval_raw(zeros))
    if P1 + P2 != P:
        raise NotSeparableAlongCut(f"terms cross the cut {sorted(side)}")
    return P1, P2


def multiplicative_split(P: MPoly, i: int, j: int,
                         rng: random.Random | None = None) -> Tuple[MPoly, MPoly, Felt]:
    """Exact factors: P = h * g + c with x_i in h only and x_j in g only.

    g collects exactly the irreducible factor of P - c containing x_j
    together with nothing else; h is the product of the remaining factors,
    normalized so its leading (graded-lex) coefficient is 1.  The
    reconstruction h * g + c == P is verified before returning.
    """
    res = decompose(P, i, j, rng)
    if not res.decomposable:
        raise NotDecomposable(f"pair ({i}, {j}) does not split this polynomial")
    ctx = P.ctx
    c = res.c.value
    Pp = P - MPoly.constant(ctx, P.arity, c)
    # variables tied to j: k stays with j iff the pair (k, j) does not split
    # P - c with constant 0, i.e. its commutator is nonzero
    right = {j}
    for k in sorted(Pp.variables()):
        if k != j and not commutator(Pp, k, j).is_zero():
            right.add(k)
    left = sorted(Pp.variables() - right)
    w = find_nonzero_point(Pp, rng)
    s = Pp.eval_raw(w)
    h_raw = Pp.restrict_many(sorted(right), w)   # h * g(w)
    g_raw = Pp.restrict_many(left, w)            # h(w) * g
    lc = h_raw.leading_coefficient()
    h = h_raw.scale(ctx.inv_raw(lc))
    g = g_raw.scale(lc * ctx.inv_raw(s) % ctx.p)
    if h * g + MPoly.constant(ctx, P.arity, c) != P:
        raise NotDecomposable(
            f"pair ({i}, {j}) admits no variable-disjoint factorization")
    return h, g, Felt(c, ctx)


def restriction_vote_decompose(P: MPoly, i: int, j: int, k: int,
                               values) -> DecompResult:
    """Lift splits of three restrictions P|x_k=a to a split of P.

    If all three restrictions split for the pair (i, j) with one common
    constant c, then P itself splits with that c (verified symbolically
    before returning).  Any failed or degenerate restriction, or mismatched
    constants, yields a not-decomposable-by-vote result; that direction is
    one-sided.
    """
    if i == j:
        raise SameVariable(f"need two distinct variables, got {i} twice")
    if k in (i, j):
        raise IndexOverlap(f"vote coordinate {k} overlaps the pair ({i}, {j})")
    _require_multilinear(P)
    ctx = P.ctx
    vals = [ctx.coerce(v) for v in values]
    if len(vals) != 3:
        raise InvalidParams(f"need exactly 3 restriction values, got {len(vals)}")
    if len(set(vals)) != 3:
        raise InvalidParams(f"restriction values must be distinct mod {ctx.p}")
    cs = []
    for a in vals:
        Q = P.restrict(k, a)
        try:
            r = decompose(Q, i, j)
        except VariableNotPresent:
            return DecompResult(False, None, False)
        if not r.decomposable:
            return DecompResult(False, None, False)
        cs.append(r.c.value)
    if cs[0] != cs[1] or cs[0] != cs[2]:
        return DecompResult(False, None, False)
    c = cs[0]
    S = P.partial2(i, j)
    if S.is_zero() or not (commutator(P, i, j) - S.scale(c)).is_zero():
        return DecompResult(False, None, False)
    return DecompResult(True, Felt(c, ctx), False)


# ---- read-once deciders ----

def trivariate_is_rop(P: MPoly) -> bool:
    """Exact read-once test for polynomials with at most 3 live variables.

    With one or two live variables every multilinear polynomial is
    read-once.  With three, P is read-once iff at least two of the three
    pair witnesses vanish identically.
    """
    _require_multilinear(P)
    vs = sorted(P.variables())
    if len(vs) > 3:
        raise TooManyVariables(f"{len(vs)} live variables, trivariate test needs <= 3")
    if len(vs) <= 2:
        return True
    zeros = 0
    for a, b in itertools.combinations(vs, 2):
        if witness_is_zero(P, a, b):
            zeros += 1
    return zeros >= 2


def _canonical_key(P: MPoly, live: Sequence[int]):
    rank = {v: t for t, v in enumerate(live)}
    items = []
    for mono, c in P.terms.items():
        items.append((tuple((rank[v], e) for v, e in mono), c))
    items.sort()
    return (P.ctx.p, tuple(items))


def brute_force_is_rop(P: MPoly, *, max_vars: int = 12,
                       memo: Dict | None = None) -> bool:
    """Ground-truth read-once decider by recursive exact splitting.

    Constants and single variables are read-once.  A disconnected gate graph
    splits P additively; otherwise every variable pair is tried for a
    multiplicative split and P is read-once iff some split yields two
    read-once factors.  Results are memoized on the polynomial rewritten
    over its live variables, so structurally equal subproblems are shared.
    """
    _require_multilinear(P)
    if len(P.variables()) > max_vars:
        raise TooManyVariables(
            f"{len(P.variables())} live variables exceeds the guard {max_vars}")
    if memo is None:
        memo = {}

    def rec(Q: MPoly) -> bool:
        live = sorted(Q.variables())
        if len(live) <= 1:
            return True
        key = _canonical_key(Q, live)
        hit = memo.get(key)
        if hit is not None:
            return hit
        comps = gate_graph(Q).components()
        if len(comps) > 1:
            Q1, Q2 = additive_split(Q, comps[0])
            out = rec(Q1) and rec(Q2)
        else:
            out = False
            for a, b in itertools.combinations(live, 2):
                r = decompose(Q, a, b)
                if r.decomposable:
                    h, g, _ = multiplicative_split(Q, a, b)
                    if rec(h) and rec(g):
                        out = True
                        break
        memo[key] = out
        return out

    return rec(P)
