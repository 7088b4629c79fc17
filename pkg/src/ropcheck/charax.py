"""Global read-once characterization through certified assignments.

A multilinear P is read-once exactly when, at any assignment where every
nonzero certificate multiplicand survives, all C(n,3) trivariate
restrictions are read-once.  The certificate multiplicands are: the n first
partials, the n(n-1)/2 mixed second partials, and per pair (i,j) one
decomposition-witness term per shared index set (singleton sets for the
local certificate, sets of size n-3 for the full one).

characterize samples assignments, certifies one good, then reduces the
global question to trivariate restrictions.  When no good assignment is
found it answers INDETERMINATE, never a wrong verdict (exact mode).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

from .decomp import commutator, trivariate_is_rop, witness_is_zero
from .errors import ArityMismatch, FieldTooSmall, NotMultilinear, TooManyVariables
from .mpoly import MPoly

ROP = "ROP"
READ_MANY = "READ_MANY"
INDETERMINATE = "INDETERMINATE"

FIRST_PARTIAL = "first_partial"
SECOND_PARTIAL = "second_partial"
WITNESS = "witness"

_EXACT_TAG_GUARD = 10


@dataclass(frozen=True)
class Multiplicand:
    """One factor of the goodness certificate, tagged if identically zero."""
    kind: str
    index: Tuple[int, ...]              # (t,) or (i, j)
    shared: Optional[FrozenSet[int]]    # witness terms only
    identically_zero: bool

    def describe(self) -> str:
        names = ",".join(f"x{t + 1}" for t in self.index)
        if self.kind == FIRST_PARTIAL:
            return f"first partial in {names}"
        if self.kind == SECOND_PARTIAL:
            return f"second partial in ({names})"
        glue = "{" + ",".join(f"x{k + 1}" for k in sorted(self.shared)) + "}"
        return f"witness for ({names}) glued on {glue}"


@dataclass(frozen=True)
class GoodnessReport:
    good: bool
    violations: List[Tuple[Multiplicand, str]]
    skipped_zero: int


def _require_multilinear(P: MPoly):
    if not P.is_multilinear():
        raise NotMultilinear("certification needs a multilinear polynomial")


def certificate_multiplicands(P: MPoly, local: bool = False,
                              zero_mode: str = "exact",
                              rng: random.Random | None = None,
                              reps: int = 40) -> List[Multiplicand]:
    """Enumerate every certificate multiplicand with exact zero tags.

    local=True glues one shared index per witness term; local=False glues
    all but one of the remaining indices (the full certificate).  Exact zero
    tagging is guarded to arity <= 10; pass zero_mode='fast' beyond that.
    """
    _require_multilinear(P)
    n = P.arity
    if zero_mode == "exact" and n > _EXACT_TAG_GUARD:
        raise TooManyVariables(
            f"exact witness tags are limited to arity {_EXACT_TAG_GUARD}; "
            "use zero_mode='fast'")
    out: List[Multiplicand] = []
    for t in range(n):
        out.append(Multiplicand(FIRST_PARTIAL, (t,), None, P.partial(t).is_zero()))
    for i, j in itertools.combinations(range(n), 2):
        out.append(Multiplicand(SECOND_PARTIAL, (i, j), None,
                                P.partial2(i, j).is_zero()))
    for i, j in itertools.combinations(range(n), 2):
        rest = [k for k in range(n) if k not in (i, j)]
        # the unglued witness vanishing forces every glued one to vanish
        base_zero = witness_is_zero(P, i, j, frozenset(), zero_mode, rng, reps)
        for m in rest:
            if local:
                shared = frozenset((m,))
            else:
                shared = frozenset(k for k in rest if k != m)
            zero = base_zero or witness_is_zero(P, i, j, shared, zero_mode, rng, reps)
            out.append(Multiplicand(WITNESS, (i, j), shared, zero))
    return out


class GoodnessChecker:
    """Reusable certifier: precomputes partials, witnesses, and zero tags once."""

    def __init__(self, P: MPoly, local: bool = False, zero_mode: str = "exact",
                 rng: random.Random | None = None, reps: int = 40):
        _require_multilinear(P)
        if P.ctx.p < 3:
            raise FieldTooSmall("goodness certification needs p >= 3")
        self.P = P
        self.local = local
        self.multiplicands = certificate_multiplicands(P, local, zero_mode, rng, reps)
        self._first = {t: P.partial(t) for t in range(P.arity)}
        self._second = {}
        self._comm = {}
        for m in self.multiplicands:
            if m.kind == SECOND_PARTIAL and not m.identically_zero:
                i, j = m.index
                self._second[(i, j)] = P.partial2(i, j)
            elif m.kind == WITNESS and not m.identically_zero:
                i, j = m.index
                if (i, j) not in self._comm:
                    self._comm[(i, j)] = commutator(P, i, j)
                    self._second.setdefault((i, j), P.partial2(i, j))

    def check(self, assignment) -> GoodnessReport:
        P = self.P
        if len(assignment) != P.arity:
            raise ArityMismatch(
                f"assignment length {len(assignment)} != arity {P.arity}")
        a = tuple(P.ctx.coerce(v) for v in assignment)
        violations = []
        skipped = 0
        for m in self.multiplicands:
            if m.identically_zero:
                skipped += 1
                continue
            if m.kind == FIRST_PARTIAL:
                if self._first[m.index[0]].eval_raw(a) == 0:
                    violations.append((m, "evaluates to 0 at the assignment"))
            elif m.kind == SECOND_PARTIAL:
                if self._second[m.index].eval_raw(a) == 0:
                    violations.append((m, "evaluates to 0 at the assignment"))
            else:
                i, j = m.index
                D = self._comm[(i, j)]
                S = self._second[(i, j)]
                shared = sorted(m.shared)
                T = (S.restrict_many(shared, a).scale(D.eval_raw(a))
                     - D.restrict_many(shared, a).scale(S.eval_raw(a)))
                if T.is_zero():
                    violations.append(
                        (m, "vanishes identically in the free variables"))
        return GoodnessReport(not violations, violations, skipped)


def is_good_assignment(P: MPoly, a, local: bool = False,
                       zero_mode: str = "exact",
                       rng: random.Random | None = None,
                       reps: int = 40) -> GoodnessReport:
    """Certify one assignment; build a GoodnessChecker for repeated use."""
    return GoodnessChecker(P, local, zero_mode, rng, reps).check(a)


def is_locally_rop(P: MPoly, a) -> Tuple[bool, Optional[Tuple[int, int, int]]]:
    """All C(n,3) trivariate restrictions at a read-once?

    Subsets are scanned in lexicographic order and the first failing one is
    returned as the witness.  Fewer than 3 variables: trivially read-once.
    """
    _require_multilinear(P)
    n = P.arity
    if n < 3:
        return True, None
    for I in itertools.combinations(range(n), 3):
        rest = [k for k in range(n) if k not in I]
        if not trivariate_is_rop(P.restrict_many(rest, a)):
            return False, I
    return True, None


@dataclass(frozen=True)
class CharacterizeReport:
    verdict: str
    assignment: Optional[Tuple[int, ...]]
    witness_I: Optional[Tuple[int, ...]]
    attempts: int
    goodness: Optional[GoodnessReport]
    seed: Optional[int]
    note: str = ""

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "assignment": list(self.assignment) if self.assignment is not None else None,
            "witness_I": [t + 1 for t in self.witness_I] if self.witness_I else None,
            "attempts": self.attempts,
            "seed": self.seed,
            "skipped_zero": self.goodness.skipped_zero if self.goodness else None,
            "violations": [m.describe() for m, _ in self.goodness.violations]
            if self.goodness else [],
            "note": self.note,
        }


def characterize(P: MPoly, rng, max_retries: int = 16,
                 mode: str = "exact") -> CharacterizeReport:
    """Decide read-once-ness through a certified random assignment.

    Draws up to max_retries assignments; at the first certified-good one the
    verdict is exactly the local trivariate check.  Exhausted retries (or an
    arity beyond the exact-tag guard in exact mode) yield INDETERMINATE.
    Arity below 3 is answered ROP directly: every multilinear polynomial in
    at most two variables is read-once.
    """
    _require_multilinear(P)
    seed = rng if isinstance(rng, int) else None
    rng = random.Random(rng) if isinstance(rng, int) else rng
    n = P.arity
    if n < 3:
        return CharacterizeReport(ROP, None, None, 0, None, seed,
                                  "small arity answered directly")
    if mode == "exact" and n > _EXACT_TAG_GUARD:
        return CharacterizeReport(
            INDETERMINATE, None, None, 0, None, seed,
            f"exact zero tags need arity <= {_EXACT_TAG_GUARD}")
    checker = GoodnessChecker(P, local=False, zero_mode=mode, rng=rng)
    p = P.ctx.p
    last = None
    for attempt in range(1, max_retries + 1):
        a = tuple(rng.randrange(p) for _ in range(n))
        last = checker.check(a)
        if last.good:
            ok, witness = is_locally_rop(P, a)
            verdict = ROP if ok else READ_MANY
            return CharacterizeReport(verdict, a, witness, attempt, last, seed)
    return CharacterizeReport(INDETERMINATE, None, None, max_retries, last, seed,
                              "no certified assignment within the retry budget")
