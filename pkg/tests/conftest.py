import pytest

from helpers import number_domain, plan1_sequence


@pytest.fixture(scope="session")
def number_dom():
    return number_domain()


@pytest.fixture(scope="session")
def plan1(number_dom):
    return plan1_sequence(number_dom)
