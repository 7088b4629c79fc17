import random

import pytest

from ropcheck.ff import FieldCtx
from ropcheck.mpoly import parse_terms


@pytest.fixture(scope="session")
def gf2():
    return FieldCtx(2)


@pytest.fixture(scope="session")
def gf5():
    return FieldCtx(5)


@pytest.fixture(scope="session")
def gf101():
    return FieldCtx(101)


@pytest.fixture(scope="session")
def gf1009():
    return FieldCtx(1009)


def poly(ctx, arity, expr):
    """Shorthand for building a polynomial from its term text."""
    return parse_terms(ctx, arity, expr)


def seeded(seed):
    return random.Random(seed)
