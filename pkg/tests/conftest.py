from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from qbw import construct, scheme

settings.register_profile("qbw", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qbw")


@pytest.fixture(scope="session")
def cons1_q3():
    return construct.cons1(3)


@pytest.fixture(scope="session")
def gdd1_instance():
    return construct.default_gdd1()[0]


@pytest.fixture(scope="session")
def gdd2_instance():
    return construct.default_gdd2()[0]


@pytest.fixture(scope="session")
def srg_scheme(cons1_q3):
    S = scheme.build_srg_scheme(cons1_q3[0])
    assert scheme.verify_scheme(S).passed
    return S


@pytest.fixture(scope="session")
def gdd1_scheme(gdd1_instance):
    S = scheme.build_gdd_scheme_case1(gdd1_instance, 16, 2)
    assert scheme.verify_scheme(S).passed
    return S


@pytest.fixture(scope="session")
def gdd2_scheme(gdd2_instance):
    S = scheme.build_gdd_scheme_case2(gdd2_instance, 10, 4)
    assert scheme.verify_scheme(S).passed
    return S
