import numpy as np
import pytest

from radonfourier import complex_field, padic_field, real_field


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def fr():
    return real_field()


@pytest.fixture
def fc():
    return complex_field()


@pytest.fixture
def f2():
    return padic_field(2)


@pytest.fixture
def f3():
    return padic_field(3)
