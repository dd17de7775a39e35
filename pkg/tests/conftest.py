import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402


@pytest.fixture(scope="session")
def prime_oracle_1e5():
    return oracles.primes_upto(10**5)


@pytest.fixture(scope="session")
def squarefree_oracle_1e5():
    return oracles.squarefree_upto(10**5)
