import numpy as np
import pytest

import repscape as rs
from repscape.dataset import Region, VariableSpec


@pytest.fixture
def tiny_dataset():
    """Four regions, two variables, hand-pickable values."""
    regions = [
        Region("a", 10.0, 20.0),
        Region("b", -5.0, 30.0),
        Region("c", 0.0, -120.0),
        Region("d", 45.0, 60.0),
    ]
    variables = [VariableSpec("x"), VariableSpec("y")]
    values = np.array([[0.0, 1.0], [1.0, 3.0], [2.0, 5.0], [3.0, 7.0]])
    return rs.Dataset(regions, variables, values)


@pytest.fixture
def bimodal_dataset():
    """Two well-separated clusters on a correlated axis, 400 regions."""
    mix = rs.dataset.clustered_mixture(
        weights=[0.6, 0.4], positions=[0.0, 8.0], widths=[0.4, 0.4], n_variables=3
    )
    return rs.generate_synthetic(mix, 400, seed=3)


@pytest.fixture
def bimodal_analysis(bimodal_dataset):
    return rs.prepare_analysis(bimodal_dataset)
