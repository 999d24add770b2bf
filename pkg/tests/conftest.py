import numpy as np
import pytest

from polyconsensus.core.schemas import ModelConfig
from polyconsensus.dynamics import FormationModel, PolynomialTerm, field_from_terms
from polyconsensus.pattern import from_edge_list
from polyconsensus import pipeline


def single_integrator_model(N: int = 2) -> FormationModel:
    """x_i' = -sum_j P_ij x_j on a path; nonzero eigenvalue 2 for N = 2."""
    coupling = [PolynomialTerm(1, -1.0, (1,))]
    edges = [(i, i + 1, 1.0) for i in range(1, N)]
    return FormationModel.build(
        field_from_terms(1, [], 1),
        field_from_terms(1, coupling, 1),
        from_edge_list(N, edges),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def single_integrator():
    return single_integrator_model()


@pytest.fixture
def single_integrator_config() -> ModelConfig:
    return ModelConfig.model_validate({
        "name": "single-integrator",
        "n": 1,
        "N": 2,
        "coupling_terms": [{"row": 1, "coeff": -1.0, "powers": [1]}],
        "pattern": {"edges": [[1, 2, 1.0]]},
        "method": {"l": 1, "epsilon": 0.1},
    })


@pytest.fixture
def disconnected_config() -> ModelConfig:
    return ModelConfig.model_validate({
        "n": 1,
        "N": 4,
        "coupling_terms": [{"row": 1, "coeff": -1.0, "powers": [1]}],
        "pattern": {"edges": [[1, 2, 1.0], [3, 4, 1.0]]},
    })


@pytest.fixture
def solved(single_integrator):
    return pipeline.certify(single_integrator, method="theorem1", l=1, epsilon=0.1)


def linear_vdp_config(N: int = 10, c: float = 15.0, mu: float = 0.5) -> ModelConfig:
    """Van der Pol ring without the nonlinear damping: y' = -x + mu y - c r."""
    return ModelConfig.model_validate({
        "name": "vdp-linear",
        "n": 2,
        "N": N,
        "variables": ["x", "y"],
        "agent_terms": [
            {"row": 1, "coeff": 1.0, "powers": [0, 1]},
            {"row": 2, "coeff": -1.0, "powers": [1, 0]},
            {"row": 2, "coeff": mu, "powers": [0, 1]},
        ],
        "coupling_terms": [
            {"row": 2, "coeff": -1.0, "powers": [1, 0]},
            {"row": 2, "coeff": -1.0, "powers": [0, 1]},
        ],
        "c": c,
        "pattern": {"cycle": N},
        "parameters": {"mu": mu},
        "method": {"method": "theorem2", "l": 1, "epsilon": 1.0},
    })


@pytest.fixture
def linear_vdp():
    return pipeline.build_model(linear_vdp_config())


@pytest.fixture
def linear_vdp_certified(linear_vdp):
    return pipeline.certify(linear_vdp, method="theorem2", l=1, epsilon=1.0)
