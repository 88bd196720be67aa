import numpy as np
import pytest

from currentlab import Chain, build_complex


@pytest.fixture
def square_host():
    """[0,1]^2 split into two triangles along the main diagonal."""
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    return build_complex(pts, [(0, 1, 2), (0, 2, 3)])


@pytest.fixture
def square_chain(square_host):
    return Chain(square_host, 2, np.array([1.0, 1.0]), integer=True)
