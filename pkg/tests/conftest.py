import os
import tempfile

# utils.config reads the results root at import time
os.environ.setdefault("THZFEC_RESULTS_ROOT", tempfile.mkdtemp(prefix="thzfec_test_"))
os.environ.setdefault("THZFEC_MC_WORKERS", "2")

import pytest


@pytest.fixture(scope="session")
def prefect_harness():
    from prefect.testing.utilities import prefect_test_harness

    with prefect_test_harness():
        yield
