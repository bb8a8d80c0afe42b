import pytest

from isopulse import IntegratorConfig, catalog, dynamics


@pytest.fixture(scope="session")
def fast_cfg():
    # loose enough for sub-second module tests, tight enough for 1e-6 checks
    return IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)


@pytest.fixture(scope="session")
def prob(fast_cfg):
    def _prob(klass, row, alpha, beta, picture="detuning", truncation=None,
              cfg=fast_cfg):
        model = catalog.model_from_alpha_beta(klass, row, alpha, beta,
                                              truncation=truncation)
        return dynamics.transition_probability(model, picture, cfg)
    return _prob
