import pytest

from wdvvsym.fixtures_io import PACKAGED_FIXTURES, load_generators
from wdvvsym.lie import structure_constants


@pytest.fixture(scope="session")
def fixdir():
    return PACKAGED_FIXTURES


@pytest.fixture(scope="session")
def basis(fixdir):
    return load_generators(fixdir)


@pytest.fixture(scope="session")
def algebra(basis):
    return structure_constants(basis)


@pytest.fixture(scope="session")
def full_report():
    """One full verification run shared by the acceptance assertions."""
    from wdvvsym.suites import run_suites

    return run_suites(["pde", "lax", "wdvv", "algebra", "reductions", "tables", "numeric"])
