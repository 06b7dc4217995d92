"""Generated-program differential suite.

Forty seeded programs, disjoint from the seeds the acceptance run uses,
pushed through the full oracle comparison in differential.py.
"""

import pytest

from differential import verify_seed


@pytest.mark.parametrize("seed", range(1000, 1040))
def test_engine_matches_oracles(seed):
    verify_seed(seed)
