import pytest

from mrentropy import CountSample, OutcomeModel

# Independent oracle (scipy dblquad on the simplex + brentq, no package code)
ORACLE_BETA = 14.116636470852988
ORACLE_ZETA = 1874.1171823493817
ORACLE_MEANS = (0.2942384324565334, 0.11152313508693212, 0.5942384324565341)
ORACLE_LAMBDA = 1.90629894571481
ORACLE_SEQUENTIAL_MOMENT = 1.8941292592118604
# zeta' for f=(1,2,3), m=(11,2,7)
ORACLE_ZETA_AT = {
    -5: 5.866479135575827e-14,
    1: 2.2623732916948053e-09,
    5: 5.181767248414688e-06,
    10: 0.18394066496755146,
}
# density of the simultaneous posterior at (0.2942, 0.1115, 0.5943)
ORACLE_DENSITY = 31.351864649700815


@pytest.fixture
def paper_model():
    return OutcomeModel((1.0, 2.0, 3.0))


@pytest.fixture
def paper_counts():
    return CountSample((11, 2, 7))
