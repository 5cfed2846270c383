import random

import pytest

from padic_mahler.padic_core import PrimeContext


def residual(a, b):
    return (a - b).valuation


def coeff_residual(xs, ys, count=None):
    pairs = list(zip(xs, ys))[:count]
    return min(residual(x, y) for x, y in pairs)


@pytest.fixture(params=[2, 3, 5], ids=lambda p: f"p{p}")
def ctx(request):
    return PrimeContext(request.param, 20)


@pytest.fixture
def rng():
    return random.Random(12345)
