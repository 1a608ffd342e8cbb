import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from trussopt import DesignVector, default_problem


@pytest.fixture(scope="session")
def problem():
    return default_problem()


def design_from_reference(ref) -> DesignVector:
    return DesignVector(
        coords=np.array(ref["coords"], dtype=float),
        areas=np.array(ref["areas"], dtype=float),
    )
