import pytest

from scanfreeze import ScanConfig, Stitch, insert_scan
from scanfreeze.atpg import generate_patterns
from scanfreeze.data import load_s27, load_s27_scan
from scanfreeze.scan import Chain, ChainMap

GOLDEN_CHAIN = ["reg_d_out_2_", "reg_d_out_1_", "reg_d_out_0_"]


@pytest.fixture()
def s27():
    return load_s27()


@pytest.fixture()
def golden():
    """The bundled scan-inserted s27 (single chain, QB stitch)."""
    return load_s27_scan()


@pytest.fixture()
def golden_cmap():
    return ChainMap(Stitch.QB, [Chain("chain1", list(GOLDEN_CHAIN))])


@pytest.fixture(scope="session")
def golden_session():
    return load_s27_scan()


@pytest.fixture(scope="session")
def golden_cmap_session():
    return ChainMap(Stitch.QB, [Chain("chain1", list(GOLDEN_CHAIN))])


@pytest.fixture(scope="session")
def atpg_patterns(golden_session, golden_cmap_session):
    """Seed-0 generated pattern set for the golden netlist, with report."""
    return generate_patterns(golden_session, golden_cmap_session,
                             seed=0, random_budget=32)


@pytest.fixture()
def s27_scanned_q(s27):
    """BENCH s27 scan-inserted with plain Q stitching, chain G7->G6->G5."""
    return insert_scan(s27, ScanConfig(n_chains=1, stitch=Stitch.Q,
                                       order=["G7", "G6", "G5"]))
