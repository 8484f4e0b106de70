import pytest

from enkf_lab.experiments import TwinExperimentConfig, sweep_ensemble_sizes


@pytest.fixture(scope="session")
def default_sweep():
    """Full default ensemble-size sweep (3 sizes x 20 seeds), shared by the
    experiment invariants and the acceptance suite."""
    return sweep_ensemble_sizes(TwinExperimentConfig())
