import numpy as np
import pytest

from unshred import build_template_bank


@pytest.fixture(scope="session")
def bank():
    return build_template_bank()


def random_binary(rng, height, width, p=0.3):
    return (rng.random((height, width)) < p).astype(np.uint8)
