import pytest

import qsvmf as q


@pytest.fixture(scope="session")
def wdbc():
    return q.load_wdbc()
