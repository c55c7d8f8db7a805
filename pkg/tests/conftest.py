from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

src_path = Path(__file__).parent.parent / "src"
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from qubit_sr.generator import ArrayConfig, CouplingSpec  # noqa: E402
from qubit_sr.opalg import DensityMatrix  # noqa: E402

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def bell() -> DensityMatrix:
    return DensityMatrix.from_ket([1, 0, 0, 1])


@pytest.fixture
def zz_pair() -> ArrayConfig:
    """Two-qubit ZZ pair at r = 1, |s| = 1.5 (the reference point of the closed form)."""
    return ArrayConfig.homogeneous(2, 1.0, 1.0, coupling=CouplingSpec.zz(-1.5))
