"""Sparse multivariate polynomials over GF(p), with exact arithmetic.

Representation: a polynomial carries a fixed arity n (variable slots 0..n-1)
and a dict mapping monomials to nonzero coefficient residues.  A monomial is
a tuple of (variable, exponent) pairs, sorted by variable, every exponent
positive; the empty tuple is the constant monomial.  The representation is
canonical, so equality of polynomials is equality of dicts.

Restriction keeps the arity: substituting into slot i just removes i from the
support, it never renumbers the remaining variables.

Serialization is one term per '+', coefficients as decimal residues,
variables printed 1-based (slot 0 is x1), terms ordered by graded
lexicographic order, highest first.
"""

from __future__ import annotations

import random
from typing import Dict, FrozenSet, Iterable, Mapping, Sequence, Tuple

try:
    import numpy as _np
except ImportError:  # numpy only accelerates; every path has a pure fallback
    _np = None

from .errors import (
    ArityMismatch,
    DuplicateNode,
    EmptySampleSet,
    FieldMismatch,
    IncompleteGrid,
    InvalidParams,
    NotMultilinearInVar,
    NotPrime,
    OutOfRange,
    ParseError,
    SameVariable,
)
from .ff import Felt, FieldCtx

Mono = Tuple[Tuple[int, int], ...]

# numpy int64 products stay exact while p**2 * grid_axis < 2**63
_NUMPY_P_LIMIT = 2**30


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        v1, e1 = m1[i]
        v2, e2 = m2[j]
        if v1 == v2:
            out.append((v1, e1 + e2))
            i += 1
            j += 1
        elif v1 < v2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


class MPoly:
    """Immutable sparse polynomial over a prime field."""

    __slots__ = ("ctx", "arity", "terms")

    def __init__(self, ctx: FieldCtx, arity: int, terms: Mapping[Mono, int] | None = None,
                 *, _canonical: bool = False):
        if arity < 0:
            raise OutOfRange(f"arity must be nonnegative, got {arity}")
        self.ctx = ctx
        self.arity = arity
        if terms is None:
            self.terms: Dict[Mono, int] = {}
        elif _canonical:
            self.terms = dict(terms)
        else:
            p = ctx.p
            clean: Dict[Mono, int] = {}
            for mono, coeff in terms.items():
                if isinstance(mono, dict):
                    mono = tuple(sorted(mono.items()))
                else:
                    mono = tuple(sorted(mono))
                for v, e in mono:
                    if not 0 <= v < arity:
                        raise ArityMismatch(f"variable {v} outside arity {arity}")
                    if e <= 0:
                        raise OutOfRange(f"exponent {e} must be positive")
                c = ctx.coerce(coeff)
                if c:
                    c0 = clean.get(mono)
                    if c0 is None:
                        clean[mono] = c
                    else:
                        c = (c0 + c) % p
                        if c:
                            clean[mono] = c
                        else:
                            del clean[mono]
            self.terms = clean

    # ---- constructors ----

    @classmethod
    def zero(cls, ctx: FieldCtx, arity: int) -> "MPoly":
        return cls(ctx, arity, None)

    @classmethod
    def constant(cls, ctx: FieldCtx, arity: int, c) -> "MPoly":
        c = ctx.coerce(c)
        return cls(ctx, arity, {(): c} if c else None, _canonical=True)

    @classmethod
    def variable(cls, ctx: FieldCtx, arity: int, i: int) -> "MPoly":
        if not 0 <= i < arity:
            raise ArityMismatch(f"variable {i} outside arity {arity}")
        return cls(ctx, arity, {((i, 1),): 1}, _canonical=True)

    @classmethod
    def affine(cls, ctx: FieldCtx, arity: int, i: int, alpha, beta) -> "MPoly":
        """alpha * x_i + beta."""
        if not 0 <= i < arity:
            raise ArityMismatch(f"variable {i} outside arity {arity}")
        a, b = ctx.coerce(alpha), ctx.coerce(beta)
        terms: Dict[Mono, int] = {}
        if a:
            terms[((i, 1),)] = a
        if b:
            terms[()] = b
        return cls(ctx, arity, terms, _canonical=True)

    # ---- structure queries ----

    def variables(self) -> FrozenSet[int]:
        """Slots the polynomial actually depends on."""
        out = set()
        for mono in self.terms:
            for v, _ in mono:
                out.add(v)
        return frozenset(out)

    def individual_degree(self, i: int) -> int:
        self._check_slot(i)
        best = 0
        for mono in self.terms:
            for v, e in mono:
                if v == i and e > best:
                    best = e
        return best

    def total_degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def is_multilinear(self) -> bool:
        for mono in self.terms:
            for _, e in mono:
                if e != 1:
                    return False
        return True

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> int:
        return self.terms.get((), 0)

    def _check_slot(self, i: int):
        if not 0 <= i < self.arity:
            raise ArityMismatch(f"variable {i} outside arity {self.arity}")

    # ---- evaluation ----

    def _coerce_point(self, assignment) -> Tuple[int, ...]:
        if len(assignment) != self.arity:
            raise ArityMismatch(
                f"assignment length {len(assignment)} != arity {self.arity}")
        ctx = self.ctx
        return tuple(ctx.coerce(v) for v in assignment)

    def eval_raw(self, vals: Sequence[int]) -> int:
        """Evaluate at a tuple of raw residues (no validation)."""
        p = self.ctx.p
        acc = 0
        for mono, c in self.terms.items():
            t = c
            for v, e in mono:
                x = vals[v]
                t = t * x % p if e == 1 else t * pow(x, e, p) % p
            acc += t
        return acc % p

    def evaluate(self, assignment) -> Felt:
        """Evaluate at an assignment (sequence of int or Felt, full arity)."""
        return Felt(self.eval_raw(self._coerce_point(assignment)), self.ctx)

    def eval_batch(self, points: Sequence[Sequence[int]]) -> list[int]:
        """Evaluate at many raw-residue points at once."""
        if not points:
            return []
        if _np is not None and self.ctx.p < _NUMPY_P_LIMIT and len(points) >= 8:
            return self._eval_batch_np(points)
        return [self.eval_raw(pt) for pt in points]

    def _eval_batch_np(self, points) -> list[int]:
        p = self.ctx.p
        arr = _np.asarray(points, dtype=_np.int64) % p
        acc = _np.zeros(arr.shape[0], dtype=_np.int64)
        pow_cache: Dict[Tuple[int, int], object] = {}
        for mono, c in self.terms.items():
            t = _np.full(arr.shape[0], c, dtype=_np.int64)
            for v, e in mono:
                key = (v, e)
                col = pow_cache.get(key)
                if col is None:
                    col = arr[:, v]
                    for _ in range(e - 1):
                        col = col * arr[:, v] % p
                    pow_cache[key] = col
                t = t * col % p
            acc = (acc + t) % p
        return acc.tolist()

    # ---- restriction and derivatives ----

    def restrict(self, i: int, value) -> "MPoly":
        """Substitute value into slot i; arity is preserved."""
        self._check_slot(i)
        a = self.ctx.coerce(value)
        p = self.ctx.p
        out: Dict[Mono, int] = {}
        for mono, c in self.terms.items():
            for k, (v, e) in enumerate(mono):
                if v == i:
                    c = c * pow(a, e, p) % p
                    mono = mono[:k] + mono[k + 1:]
                    break
                if v > i:
                    break
            if c:
                c0 = out.get(mono)
                if c0 is None:
                    out[mono] = c
                else:
                    c = (c0 + c) % p
                    if c:
                        out[mono] = c
                    else:
                        del out[mono]
        return MPoly(self.ctx, self.arity, out, _canonical=True)

    def restrict_many(self, indices: Iterable[int], assignment) -> "MPoly":
        """Substitute assignment[i] into every slot i in indices.

        The assignment must be full-arity; slots outside indices are ignored.
        """
        idx = sorted(set(indices))
        for i in idx:
            self._check_slot(i)
        if len(assignment) != self.arity:
            raise ArityMismatch(
                f"assignment length {len(assignment)} != arity {self.arity}")
        ctx = self.ctx
        p = ctx.p
        vals = {i: ctx.coerce(assignment[i]) for i in idx}
        out: Dict[Mono, int] = {}
        for mono, c in self.terms.items():
            kept = []
            for v, e in mono:
                a = vals.get(v)
                if a is None:
                    kept.append((v, e))
                else:
                    c = c * pow(a, e, p) % p
                    if not c:
                        break
            if c:
                mono = tuple(kept)
                c0 = out.get(mono)
                if c0 is None:
                    out[mono] = c
                else:
                    c = (c0 + c) % p
                    if c:
                        out[mono] = c
                    else:
                        del out[mono]
        return MPoly(self.ctx, self.arity, out, _canonical=True)

    def partial(self, i: int) -> "MPoly":
        """Discrete partial in slot i: P|x_i=1 - P|x_i=0, requires deg_i <= 1.

        For a multilinear slot this equals the formal derivative.
        """
        self._check_slot(i)
        out: Dict[Mono, int] = {}
        for mono, c in self.terms.items():
            for k, (v, e) in enumerate(mono):
                if v == i:
                    if e != 1:
                        raise NotMultilinearInVar(
                            f"degree {e} in variable {i}; partial needs degree <= 1")
                    out[mono[:k] + mono[k + 1:]] = c
                    break
                if v > i:
                    break
        return MPoly(self.ctx, self.arity, out, _canonical=True)

    def partial2(self, i: int, j: int) -> "MPoly":
        """Mixed second partial, i != j."""
        if i == j:
            raise SameVariable(f"need two distinct variables, got {i} twice")
        return self.partial(i).partial(j)

    # ---- ring operations ----

    def _check_compat(self, other: "MPoly"):
        if self.ctx.p != other.ctx.p:
            raise FieldMismatch(f"GF({self.ctx.p}) vs GF({other.ctx.p})")
        if self.arity != other.arity:
            raise ArityMismatch(f"arity {self.arity} vs {other.arity}")

    def __add__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check_compat(other)
        p = self.ctx.p
        out = dict(self.terms)
        for mono, c in other.terms.items():
            c0 = out.get(mono)
            if c0 is None:
                out[mono] = c
            else:
                c = (c0 + c) % p
                if c:
                    out[mono] = c
                else:
                    del out[mono]
        return MPoly(self.ctx, self.arity, out, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check_compat(other)
        p = self.ctx.p
        out = dict(self.terms)
        for mono, c in other.terms.items():
            c0 = out.get(mono)
            if c0 is None:
                out[mono] = p - c
            else:
                c = (c0 - c) % p
                if c:
                    out[mono] = c
                else:
                    del out[mono]
        return MPoly(self.ctx, self.arity, out, _canonical=True)

    def __neg__(self):
        p = self.ctx.p
        return MPoly(self.ctx, self.arity,
                     {m: p - c for m, c in self.terms.items()}, _canonical=True)

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check_compat(other)
        p = self.ctx.p
        out: Dict[Mono, int] = {}
        items2 = list(other.terms.items())
        for m1, c1 in self.terms.items():
            for m2, c2 in items2:
                m = _mono_mul(m1, m2)
                c = c1 * c2 % p
                c0 = out.get(m)
                if c0 is None:
                    out[m] = c
                else:
                    c = (c0 + c) % p
                    if c:
                        out[m] = c
                    else:
                        del out[m]
        return MPoly(self.ctx, self.arity, out, _canonical=True)

    def scale(self, c) -> "MPoly":
        c = self.ctx.coerce(c)
        if c == 0:
            return MPoly.zero(self.ctx, self.arity)
        p = self.ctx.p
        return MPoly(self.ctx, self.arity,
                     {m: v * c % p for m, v in self.terms.items()}, _canonical=True)

    def embed(self, new_arity: int, var_map: Mapping[int, int]) -> "MPoly":
        """Rename slots through var_map into a polynomial of new_arity.

        Distinct old slots may map to one new slot; exponents then add.
        """
        out: Dict[Mono, int] = {}
        p = self.ctx.p
        for mono, c in self.terms.items():
            acc: Dict[int, int] = {}
            for v, e in mono:
                w = var_map[v]
                if not 0 <= w < new_arity:
                    raise ArityMismatch(f"target slot {w} outside arity {new_arity}")
                acc[w] = acc.get(w, 0) + e
            m = tuple(sorted(acc.items()))
            c0 = out.get(m)
            if c0 is None:
                out[m] = c
            else:
                c = (c0 + c) % p
                if c:
                    out[m] = c
                else:
                    del out[m]
        return MPoly(self.ctx, new_arity, out, _canonical=True)

    # ---- ordering, comparison, serialization ----

    def _grlex_key(self, mono: Mono):
        dense = [0] * self.arity
        for v, e in mono:
            dense[v] = e
        return (_mono_degree(mono), tuple(dense))

    def leading_coefficient(self) -> int:
        """Coefficient of the graded-lex largest monomial (0 for the zero poly)."""
        if not self.terms:
            return 0
        lead = max(self.terms, key=self._grlex_key)
        return self.terms[lead]

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return (self.ctx.p == other.ctx.p and self.arity == other.arity
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ctx.p, self.arity, tuple(sorted(self.terms.items()))))

    def serialize_terms(self) -> str:
        """Canonical term list: graded lex, highest first, x1-based names."""
        if not self.terms:
            return "0"
        monos = sorted(self.terms, key=self._grlex_key, reverse=True)
        parts = []
        for mono in monos:
            c = self.terms[mono]
            factors = []
            if c != 1 or not mono:
                factors.append(str(c))
            for v, e in mono:
                factors.append(f"x{v + 1}" if e == 1 else f"x{v + 1}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def to_text(self) -> str:
        """Full file form: header line then the canonical term list."""
        return f"field p={self.ctx.p} n={self.arity}\n{self.serialize_terms()}\n"

    def __repr__(self):
        return f"MPoly(GF({self.ctx.p}), n={self.arity}, {self.serialize_terms()})"

    # ---- randomized identity test ----

    def sz_test(self, sample_set, r: int, rng: random.Random) -> bool:
        """One-sided probabilistic zero test: True means 'zero at all r points'.

        Each round draws every coordinate independently and uniformly from
        sample_set; any nonzero evaluation proves the polynomial nonzero, so a
        False answer is always correct.  The per-round error of a True answer
        is at most total_degree / len(sample_set).
        """
        vals = [self.ctx.coerce(v) for v in sample_set]
        if not vals:
            raise EmptySampleSet("sample set must be nonempty")
        if len(set(vals)) != len(vals):
            raise DuplicateNode("sample set entries must be distinct")
        if r < 1:
            raise InvalidParams(f"need at least one round, got r={r}")
        for _ in range(r):
            pt = [vals[rng.randrange(len(vals))] for _ in range(self.arity)]
            if self.eval_raw(pt):
                return False
        return True


# ---- module-level aliases for the core operations ----

def evaluate(P: MPoly, assignment) -> Felt:
    return P.evaluate(assignment)


def restrict(P: MPoly, i: int, value) -> MPoly:
    return P.restrict(i, value)


def restrict_many(P: MPoly, indices, assignment) -> MPoly:
    return P.restrict_many(indices, assignment)


def partial(P: MPoly, i: int) -> MPoly:
    return P.partial(i)


def partial2(P: MPoly, i: int, j: int) -> MPoly:
    return P.partial2(i, j)


def variables(P: MPoly) -> FrozenSet[int]:
    return P.variables()


def is_zero(P: MPoly) -> bool:
    return P.is_zero()


def sz_test(P: MPoly, sample_set, r: int, rng: random.Random) -> bool:
    return P.sz_test(sample_set, r, rng)


# ---- parsing ----

def _parse_term(ctx: FieldCtx, arity: int, term: str) -> Tuple[Mono, int]:
    factors = term.split("*")
    coeff = 1
    exps: Dict[int, int] = {}
    for f in factors:
        f = f.strip()
        if not f:
            raise ParseError(f"empty factor in term {term!r}")
        if f[0] in "xX":
            body = f[1:]
            e = 1
            if "^" in body:
                body, _, etxt = body.partition("^")
                try:
                    e = int(etxt)
                except ValueError:
                    raise ParseError(f"bad exponent in {f!r}") from None
                if e <= 0:
                    raise ParseError(f"exponent must be positive in {f!r}")
            try:
                v = int(body)
            except ValueError:
                raise ParseError(f"bad variable name {f!r}") from None
            if not 1 <= v <= arity:
                raise ParseError(f"variable {f!r} outside x1..x{arity}")
            exps[v - 1] = exps.get(v - 1, 0) + e
        else:
            try:
                coeff = coeff * int(f) % ctx.p
            except ValueError:
                raise ParseError(f"bad coefficient {f!r}") from None
    return tuple(sorted(exps.items())), coeff


def parse_terms(ctx: FieldCtx, arity: int, expr: str) -> MPoly:
    """Parse a '+'/'-'-separated term list into a polynomial."""
    text = "".join(expr.split())
    if not text:
        raise ParseError("empty polynomial body")
    # split on signs, keeping them
    chunks = []
    sign = 1
    cur = []
    for ch in text:
        if ch in "+-":
            if cur:
                chunks.append((sign, "".join(cur)))
                cur = []
                sign = 1 if ch == "+" else -1
            else:
                sign = sign if ch == "+" else -sign
        else:
            cur.append(ch)
    if not cur:
        raise ParseError(f"trailing operator in {expr!r}")
    chunks.append((sign, "".join(cur)))
    acc: Dict[Mono, int] = {}
    p = ctx.p
    for sign, chunk in chunks:
        mono, c = _parse_term(ctx, arity, chunk)
        c = c * sign % p
        c0 = acc.get(mono)
        if c0 is None:
            if c:
                acc[mono] = c
        else:
            c = (c0 + c) % p
            if c:
                acc[mono] = c
            else:
                del acc[mono]
    return MPoly(ctx, arity, acc, _canonical=True)


def parse_header(line: str) -> Tuple[int, int]:
    """Parse 'field p=<p> n=<n>'; returns (p, n)."""
    toks = line.split()
    if len(toks) != 3 or toks[0] != "field":
        raise ParseError(f"bad header {line!r}; expected 'field p=<p> n=<n>'")
    vals = {}
    for tok in toks[1:]:
        key, eq, num = tok.partition("=")
        if eq != "=" or key not in ("p", "n") or key in vals:
            raise ParseError(f"bad header field {tok!r}")
        try:
            vals[key] = int(num)
        except ValueError:
            raise ParseError(f"bad header value {tok!r}") from None
    if set(vals) != {"p", "n"}:
        raise ParseError(f"header must set both p and n: {line!r}")
    if vals["n"] < 0:
        raise ParseError(f"arity must be nonnegative: {line!r}")
    return vals["p"], vals["n"]


def parse_poly_file(text: str) -> MPoly:
    """Parse the on-disk polynomial format: header line, then the terms."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("empty polynomial file")
    p, n = parse_header(lines[0])
    try:
        ctx = FieldCtx(p)
    except (OutOfRange, NotPrime) as exc:
        raise ParseError(f"bad modulus in header: {exc}") from exc
    if n < 0:
        raise ParseError(f"bad arity in header: {n}")
    body = " ".join(lines[1:])
    if not body.strip():
        raise ParseError("missing polynomial body")
    if body.strip() == "0":
        return MPoly.zero(ctx, n)
    return parse_terms(ctx, n, body)


# ---- interpolation ----

def _basis_matrix(ctx: FieldCtx, xs: Sequence[int]) -> list[list[int]]:
    """M with M[t][k] = coefficient of X^t in the Lagrange basis poly L_k.

    Then for values f(xs[k]), coefficient t of the interpolant is
    sum_k M[t][k] * f(xs[k]).
    """
    p = ctx.p
    m = len(xs)
    M = [[0] * m for _ in range(m)]
    for k in range(m):
        num = [1]
        for j in range(m):
            if j == k:
                continue
            xj = xs[j]
            nxt = [0] * (len(num) + 1)
            for t, c in enumerate(num):
                nxt[t] = (nxt[t] - c * xj) % p
                nxt[t + 1] = (nxt[t + 1] + c) % p
            num = nxt
        denom = 1
        for j in range(m):
            if j != k:
                denom = denom * (xs[k] - xs[j]) % p
        dinv = ctx.inv_raw(denom)
        for t in range(m):
            M[t][k] = num[t] * dinv % p
    return M


def interpolate_grid(ctx: FieldCtx, axes: Sequence[Sequence[int]],
                     samples: Mapping[tuple, int]) -> MPoly:
    """Interpolate a polynomial of arity len(axes) from a full product grid.

    axes[t] lists the distinct node values for slot t; samples maps each
    grid point (one coordinate per axis, raw residues or Felt) to a value.
    """
    if not 1 <= len(axes) <= 3:
        raise InvalidParams(f"grid interpolation supports 1..3 axes, got {len(axes)}")
    p = ctx.p
    ax = []
    for pts in axes:
        vals = [ctx.coerce(v) for v in pts]
        if not vals:
            raise EmptySampleSet("each axis needs at least one node")
        if len(set(vals)) != len(vals):
            raise DuplicateNode(f"axis nodes must be distinct: {pts}")
        ax.append(vals)

    def lookup(point):
        v = samples.get(point)
        if v is None:
            raise IncompleteGrid(f"missing sample at {point}")
        return ctx.coerce(v)

    dims = [len(a) for a in ax]
    k = len(ax)
    if k == 1:
        tensor = [lookup((u,)) for u in ax[0]]
    elif k == 2:
        tensor = [[lookup((u, v)) for v in ax[1]] for u in ax[0]]
    else:
        tensor = [[[lookup((u, v, w)) for w in ax[2]] for v in ax[1]] for u in ax[0]]

    mats = [_basis_matrix(ctx, a) for a in ax]
    use_np = (_np is not None and p < _NUMPY_P_LIMIT
              and max(dims) * (p - 1) * (p - 1) < 2**62)
    if use_np:
        C = _np.asarray(tensor, dtype=_np.int64)
        for axis in range(k):
            M = _np.asarray(mats[axis], dtype=_np.int64)
            C = _np.tensordot(M, C, axes=([1], [axis])) % p
        # each tensordot moves the transformed axis to the front, so after k
        # steps the axes are reversed
        C = _np.transpose(C)
        coeff_at = lambda idx: int(C[idx])
    else:
        C = tensor
        for axis in range(k):
            C = _apply_axis_py(mats[axis], C, axis, k, p)

        def coeff_at(idx):
            v = C
            for t in idx:
                v = v[t]
            return v

    terms: Dict[Mono, int] = {}
    for idx in _ndindex(dims):
        c = coeff_at(idx)
        if c:
            mono = tuple((t, e) for t, e in enumerate(idx) if e)
            terms[mono] = c
    return MPoly(ctx, k, terms, _canonical=True)


def _ndindex(dims):
    out = [()]
    for d in dims:
        out = [idx + (t,) for idx in out for t in range(d)]
    return out


def _apply_axis_py(M, tensor, axis, k, p):
    m = len(M)
    if k == 1:
        return [sum(M[t][u] * tensor[u] for u in range(len(tensor))) % p
                for t in range(m)]
    if k == 2:
        if axis == 0:
            rows = len(tensor)
            return [[sum(M[t][u] * tensor[u][v] for u in range(rows)) % p
                     for v in range(len(tensor[0]))] for t in range(m)]
        cols = len(tensor[0])
        return [[sum(M[t][v] * tensor[u][v] for v in range(cols)) % p
                 for t in range(m)] for u in range(len(tensor))]
    d0, d1, d2 = len(tensor), len(tensor[0]), len(tensor[0][0])
    if axis == 0:
        return [[[sum(M[t][u] * tensor[u][v][w] for u in range(d0)) % p
                  for w in range(d2)] for v in range(d1)] for t in range(m)]
    if axis == 1:
        return [[[sum(M[t][v] * tensor[u][v][w] for v in range(d1)) % p
                  for w in range(d2)] for t in range(m)] for u in range(d0)]
    return [[[sum(M[t][w] * tensor[u][v][w] for w in range(d2)) % p
              for t in range(m)] for v in range(d1)] for u in range(d0)]


def interpolate_trivariate(ctx: FieldCtx, samples: Mapping[tuple, int],
                           axes: Sequence[Sequence[int]]) -> MPoly:
    """Tensor-product Lagrange interpolation on a full 3-axis grid.

    Returns the unique arity-3 polynomial with per-axis degree below the
    axis size that matches every sample.
    """
    if len(axes) != 3:
        raise InvalidParams(f"need exactly 3 axes, got {len(axes)}")
    return interpolate_grid(ctx, axes, samples)


def random_multilinear(ctx: FieldCtx, n: int, rng: random.Random,
                       *, max_vars: int = 16) -> MPoly:
    """Multilinear polynomial with all 2**n coefficients uniform in GF(p)."""
    if n < 0 or n > max_vars:
        raise OutOfRange(f"arity {n} outside [0, {max_vars}]")
    terms: Dict[Mono, int] = {}
    for mask in range(1 << n):
        c = rng.randrange(ctx.p)
        if c:
            terms[tuple((v, 1) for v in range(n) if mask >> v & 1)] = c
    return MPoly(ctx, n, terms, _canonical=True)
