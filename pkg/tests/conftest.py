import numpy as np
import pytest

from nnsimplify import fixtures
from nnsimplify.network import NodeId, to_document

IDENTITY_NNET = """\
// identity network
2,1,1,1,
1,1,1,
0,
-1.0,
1.0,
0.0,0.0,
1.0,1.0,
1.0,
0.0,
1.0,
0.0,
"""


@pytest.fixture
def identity_text():
    return IDENTITY_NNET


@pytest.fixture
def gated():
    return fixtures.gated_pair_network()


@pytest.fixture
def cancelling():
    return fixtures.cancelling_network()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def acas_doc():
    net = fixtures.acas_shaped_network(np.random.default_rng(11))
    return to_document(net, header_comments=["// ACAS Xu shaped test network"])


V4 = NodeId(2, 0)
