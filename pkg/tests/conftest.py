import os

import pytest

from rkstab.tableau import BUILTIN_SCHEME_IDS, builtin_scheme

#: Worker processes for the sweep-heavy tests; candidates are independent
#: simulations so this only affects wall time, never results.
SWEEP_WORKERS = min(2, os.cpu_count() or 1)


@pytest.fixture(params=BUILTIN_SCHEME_IDS)
def any_builtin(request):
    return builtin_scheme(request.param)
