import pytest

from dsmlab import InductionConfig, run, smallest_mt_fixture

from hypothesis import settings

settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def mt():
    """Smallest preperiodic-critical fixture: (m, ell) = (2, 1)."""
    return smallest_mt_fixture()


@pytest.fixture(scope="session")
def induction_cfg(mt):
    return InductionConfig(a0=mt, epsilon=2 ** -8, b=1 - 1e-3, r_delta=3)


@pytest.fixture(scope="session")
def induction_report(induction_cfg):
    return run(induction_cfg)


@pytest.fixture(scope="session")
def deep_induction_report(mt):
    """Multi-generation run: extended horizon exercises step-phase returns."""
    cfg = InductionConfig(a0=mt, epsilon=2 ** -8, b=1 - 1e-3, r_delta=3,
                          n_hat_override=13)
    return run(cfg)
