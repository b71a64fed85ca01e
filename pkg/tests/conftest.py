import pytest

from grrapkit import bat, grrap, network

BRIDGE_TEXT = """\
# 4-node bridge: two node-disjoint paths plus the crossing arc 2-3
nodes 4
source 1
sink 4
mode undirected
arc 1 1 2
arc 2 1 3
arc 3 2 3
arc 4 2 4
arc 5 3 4
"""


@pytest.fixture(scope="session")
def bridge_net():
    return network.parse_network(BRIDGE_TEXT)


@pytest.fixture(scope="session")
def bridge_cvs(bridge_net):
    return bat.enumerate_connected(bridge_net)


@pytest.fixture(scope="session")
def bridge_inst(bridge_net):
    return grrap.synthesize_instance(bridge_net)
