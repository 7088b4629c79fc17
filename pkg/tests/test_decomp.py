"""Structure layer: commutators, split tests, witnesses, gate graphs."""

import itertools
import random

import pytest

from ropcheck.decomp import (
    GateGraph,
    additive_split,
    brute_force_is_rop,
    commutator,
    decomp_witness,
    decompose,
    find_nonzero_point,
    gate_graph,
    is_additively_separable,
    multiplicative_split,
    restriction_vote_decompose,
    trivariate_is_rop,
    witness_is_zero,
)
from ropcheck.errors import (
    IndexOverlap,
    InvalidParams,
    NotDecomposable,
    NotMultilinear,
    NotSeparableAlongCut,
    SameVariable,
    TooManyVariables,
    VariableNotPresent,
)
from ropcheck.ff import FieldCtx
from ropcheck.hardcases import q_n
from ropcheck.mpoly import MPoly, parse_terms, random_multilinear
from ropcheck.rof import random_rof

GF101 = FieldCtx(101)
GF5 = FieldCtx(5)
GF2 = FieldCtx(2)

E2 = parse_terms(GF101, 3, "x1*x2 + x2*x3 + x1*x3")


def test_commutator_known_values():
    P = parse_terms(GF101, 3, "x1*x2 + x3")
    assert commutator(P, 0, 1) == parse_terms(GF101, 3, "x3")
    assert commutator(E2, 0, 1) == parse_terms(GF101, 3, "100*x3^2")
    assert commutator(P, 0, 1) == commutator(P, 1, 0)


def test_commutator_errors():
    P = parse_terms(GF101, 2, "x1*x2")
    with pytest.raises(SameVariable):
        commutator(P, 1, 1)
    with pytest.raises(NotMultilinear):
        commutator(parse_terms(GF101, 2, "x1^2*x2"), 0, 1)


def test_find_nonzero_point():
    P = parse_terms(GF5, 2, "x1^2 + 4*x1")
    w = find_nonzero_point(P)
    assert P.eval_raw(w) != 0
    assert find_nonzero_point(parse_terms(GF2, 2, "x1*x2")) == (1, 1)
    with pytest.raises(InvalidParams):
        find_nonzero_point(MPoly.zero(GF5, 2))


def test_decompose_with_constant():
    P = parse_terms(GF101, 2, "x1*x2 + 5")
    r = decompose(P, 0, 1)
    assert r.decomposable and not r.degenerate and int(r.c) == 5

    # (x1+2)(x2+3) + 7
    Q = parse_terms(GF101, 2, "x1*x2 + 3*x1 + 2*x2 + 13")
    r = decompose(Q, 0, 1)
    assert r.decomposable and int(r.c) == 7


def test_decompose_negative_and_degenerate():
    r = decompose(parse_terms(GF101, 3, "x1*x2 + x3"), 0, 1)
    assert not r.decomposable and not r.degenerate and r.c is None
    r = decompose(parse_terms(GF101, 2, "x1 + x2"), 0, 1)
    assert not r.decomposable and r.degenerate


def test_decompose_errors():
    P = parse_terms(GF101, 3, "x1*x2 + x3")
    with pytest.raises(SameVariable):
        decompose(P, 2, 2)
    with pytest.raises(VariableNotPresent):
        decompose(parse_terms(GF101, 3, "x1*x2"), 0, 2)


def test_decompose_matches_brute_force_enumeration():
    # Oracle: over GF(5) with 2 live variables, try every constant c and
    # check whether P - c factors with x1, x2 apart, by scanning products
    # of affine pairs; compare against the algebraic test.
    rng = random.Random(101)
    for _ in range(120):
        P = random_multilinear(GF5, 2, rng)
        if P.partial2(0, 1).is_zero():
            continue
        found = False
        for c in range(5):
            p1 = P - MPoly.constant(GF5, 2, c)
            for a1, b1, a2, b2 in itertools.product(range(5), repeat=4):
                if a1 == 0 or a2 == 0:
                    continue
                h = MPoly.affine(GF5, 2, 0, a1, b1)
                g = MPoly.affine(GF5, 2, 1, a2, b2)
                if h * g == p1:
                    found = True
                    break
            if found:
                break
        assert decompose(P, 0, 1).decomposable == found


def test_witness_value_known():
    W = decomp_witness(E2, 0, 1)
    assert W.value.arity == 6
    expected = parse_terms(GF101, 6, "x6^2 + 100*x3^2")
    assert W.value == expected


def test_witness_shared_glues_slots():
    W = decomp_witness(E2, 0, 1, shared={2})
    assert W.value.is_zero()
    with pytest.raises(IndexOverlap):
        decomp_witness(E2, 0, 1, shared={0})
    with pytest.raises(IndexOverlap):
        decomp_witness(E2, 0, 1, shared={5})


def test_witness_restriction_identity():
    # Restricting a coordinate before building the witness equals gluing
    # that coordinate and restricting the shared slot afterwards.
    rng = random.Random(19)
    for _ in range(40):
        P = random_multilinear(GF101, 4, rng)
        i, j, k = random.Random(rng.random()).sample(range(4), 3)
        alpha = rng.randrange(101)
        left = decomp_witness(P.restrict(k, alpha), i, j).value
        right = decomp_witness(P, i, j, shared={k}).value.restrict(k, alpha)
        assert left == right


def test_witness_is_zero_matches_materialized():
    rng = random.Random(67)
    for _ in range(60):
        n = rng.randint(2, 5)
        P = random_multilinear(GF101, n, rng)
        pool = [t for t in range(n)]
        i, j = random.Random(rng.random()).sample(pool, 2)
        rest = [t for t in pool if t not in (i, j)]
        shared = frozenset(random.Random(rng.random()).sample(rest, min(len(rest), rng.randint(0, 2))))
        want = decomp_witness(P, i, j, shared).value.is_zero()
        assert witness_is_zero(P, i, j, shared) == want
        assert witness_is_zero(P, i, j, shared, mode="fast", rng=random.Random(5)) == want


def test_witness_is_zero_small_field_path():
    rng = random.Random(3)
    for _ in range(40):
        P = random_multilinear(GF2, 4, rng)
        if not P.variables() >= {0, 1}:
            continue
        shared = frozenset({2})
        want = decomp_witness(P, 0, 1, shared).value.is_zero()
        assert witness_is_zero(P, 0, 1, shared) == want


def test_witness_examples():
    # x1*x2 + x3 admits no split h*g + c for the pair (0, 1): the witness
    # materializes to x3 - y3.
    P = parse_terms(GF101, 3, "x1*x2 + x3")
    assert not witness_is_zero(P, 0, 1)
    assert witness_is_zero(parse_terms(GF101, 3, "x1*x2 + 5"), 0, 1)
    assert not witness_is_zero(E2, 0, 1)
    assert witness_is_zero(E2, 0, 1, shared={2})


def test_gate_graph_structure():
    P = parse_terms(GF101, 3, "x1*x2 + x2*x3")
    G = gate_graph(P)
    assert G.vertices == frozenset({0, 1, 2})
    assert G.edges == frozenset({(0, 1), (1, 2)})
    assert G.neighbors(1) == frozenset({0, 2})
    assert G.is_connected()
    H = G.without_vertex(1)
    assert H.vertices == frozenset({0, 2})
    assert H.edges == frozenset()
    assert [sorted(c) for c in H.components()] == [[0], [2]]


def test_gate_graph_ignores_dead_variables():
    P = parse_terms(GF101, 4, "x1*x2 + 7")
    G = gate_graph(P)
    assert G.vertices == frozenset({0, 1})
    assert G.edges == frozenset({(0, 1)})


def test_additive_separability():
    assert is_additively_separable(parse_terms(GF101, 3, "x1*x2 + x3"))
    assert not is_additively_separable(parse_terms(GF101, 3, "x1*x2 + x2*x3"))
    assert not is_additively_separable(parse_terms(GF101, 2, "x1*x2"))


def test_additive_split_values():
    P = parse_terms(GF101, 3, "x1*x2 + x3 + 5")
    P1, P2 = additive_split(P, {0, 1})
    assert P1 == parse_terms(GF101, 3, "x1*x2 + 5")
    assert P2 == parse_terms(GF101, 3, "x3")
    assert P1 + P2 == P
    with pytest.raises(NotSeparableAlongCut):
        additive_split(parse_terms(GF101, 3, "x1*x2 + x2*x3"), {0})
    with pytest.raises(InvalidParams):
        additive_split(P, set())


def test_multiplicative_split_two_factors():
    # (x1 + 2*x2) * (x3 + 1) + 4
    P = parse_terms(GF101, 4, "x1*x3 + x1 + 2*x2*x3 + 2*x2 + 4")
    h, g, c = multiplicative_split(P, 0, 2)
    assert int(c) == 4
    assert h.variables() == frozenset({0, 1})
    assert g.variables() == frozenset({2})
    assert h.leading_coefficient() == 1
    assert h * g + MPoly.constant(GF101, 4, int(c)) == P


def test_multiplicative_split_groups_j_factor():
    P = parse_terms(GF101, 3, "x1*x2*x3")
    h, g, c = multiplicative_split(P, 0, 1)
    assert int(c) == 0
    assert h.variables() == frozenset({0, 2})
    assert g.variables() == frozenset({1})
    assert h * g == P


def test_multiplicative_split_not_decomposable():
    with pytest.raises(NotDecomposable):
        multiplicative_split(parse_terms(GF101, 3, "x1*x2 + x3"), 0, 1)


def test_multiplicative_split_random_round_trip():
    rng = random.Random(43)
    for _ in range(60):
        nh = rng.randint(1, 3)
        ng = rng.randint(1, 3)
        n = nh + ng
        h = random_rof(GF101, n, rng.randrange(1 << 30), vars_used=nh)
        # Re-draw until the two factor variable sets are disjoint and full.
        hv = h.variables()
        gv = frozenset(range(n)) - hv
        if len(hv) != nh:
            continue
        g_formula = random_rof(GF101, n, rng.randrange(1 << 30), vars_used=ng)
        if g_formula.variables() != gv:
            continue
        c = rng.randrange(101)
        P = h.expand() * g_formula.expand() + MPoly.constant(GF101, n, c)
        if not P.is_multilinear():
            continue
        i = min(hv)
        j = min(gv)
        if P.partial2(i, j).is_zero():
            continue
        hh, gg, cc = multiplicative_split(P, i, j)
        assert int(cc) == c
        assert hh * gg + MPoly.constant(GF101, n, c) == P
        # The split follows irreducible factors, so when the constructed
        # g side factors further its spare factors may land in h; what is
        # guaranteed is a partition with i and j apart.
        assert i in hh.variables() and j in gg.variables()
        assert hh.variables().isdisjoint(gg.variables())
        assert hh.variables() | gg.variables() == frozenset(range(n))


def test_restriction_vote_positive():
    # (x1 + x4)(x2 + x3) + 3, voting over x3 restrictions.
    P = parse_terms(GF101, 4, "x1*x2 + x1*x3 + x4*x2 + x4*x3 + 3")
    r = restriction_vote_decompose(P, 0, 1, 2, (0, 1, 2))
    assert r.decomposable and int(r.c) == 3


def test_restriction_vote_negative():
    P = parse_terms(GF101, 3, "x1*x2 + x3")
    r = restriction_vote_decompose(P, 0, 1, 2, (0, 1, 2))
    assert not r.decomposable
    with pytest.raises(IndexOverlap):
        restriction_vote_decompose(P, 0, 1, 0, (0, 1, 2))
    with pytest.raises(InvalidParams):
        restriction_vote_decompose(P, 0, 1, 2, (0, 1, 102))


def test_trivariate_examples():
    assert trivariate_is_rop(parse_terms(GF101, 3, "x1*x2 + x3"))
    assert trivariate_is_rop(parse_terms(GF101, 3, "x1*x2 + x1 + 5"))
    assert not trivariate_is_rop(E2)
    assert not trivariate_is_rop(q_n(3, GF101))
    with pytest.raises(TooManyVariables):
        trivariate_is_rop(random_multilinear(GF101, 4, random.Random(1)))


def test_trivariate_matches_brute_force_random():
    rng = random.Random(83)
    agree = 0
    for _ in range(300):
        P = random_multilinear(GF5, 3, rng)
        assert trivariate_is_rop(P) == brute_force_is_rop(P)
        agree += 1
    assert agree == 300


def test_brute_force_known_cases():
    assert not brute_force_is_rop(q_n(3, GF101))
    assert not brute_force_is_rop(q_n(4, GF101))
    assert brute_force_is_rop(parse_terms(GF101, 4, "x1*x2 + x3*x4"))
    assert brute_force_is_rop(MPoly.constant(GF101, 2, 9))
    assert brute_force_is_rop(parse_terms(GF101, 1, "3*x1 + 2"))
    E2_padded = E2.embed(5, {0: 0, 1: 2, 2: 4})
    assert not brute_force_is_rop(E2_padded)
    with pytest.raises(TooManyVariables):
        brute_force_is_rop(random_multilinear(GF2, 13, random.Random(2)), max_vars=12)


def test_brute_force_accepts_rof_expansions():
    rng = random.Random(11)
    for _ in range(40):
        F = random_rof(GF101, rng.randint(1, 6), rng)
        assert brute_force_is_rop(F.expand())


def test_gate_graph_dataclass_behavior():
    G = GateGraph(frozenset({0, 1}), frozenset({(0, 1)}))
    assert G == gate_graph(parse_terms(GF101, 2, "x1*x2"))
