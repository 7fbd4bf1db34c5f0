import math

import pytest

from apx.poly import APPolynomial, make_test_corpus


@pytest.fixture(scope="session")
def corpus():
    return make_test_corpus(0)


@pytest.fixture(scope="session")
def cos_poly():
    return APPolynomial((1.0,), (0.5,), 1.0, label="cos")


@pytest.fixture(scope="session")
def sin_poly():
    return APPolynomial((1.0,), (-0.5j,), 1.0, label="sin")


@pytest.fixture(scope="session")
def two_tone():
    return APPolynomial((1.0, math.sqrt(2.0)), (0.5, 0.5), 0.4,
                        label="two-tone-unit")
