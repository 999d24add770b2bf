import pytest
from fastapi.testclient import TestClient

from polyconsensus import __version__
from polyconsensus.main import app


@pytest.fixture
def client():
    return TestClient(app)


@pytest.fixture
def config_payload(single_integrator_config):
    return single_integrator_config.model_dump(mode="json", exclude_none=True)


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["version"] == __version__


def test_example_lookup(client):
    response = client.get("/api/examples/vdp")
    assert response.status_code == 200
    body = response.json()
    assert body["N"] == 10
    assert body["pattern"] == {"cycle": 10, "weight": 1.0}


def test_classical_example(client):
    assert client.get("/api/examples/vdp", params={"classical": True}).json()["name"] == "vdp-classical"


def test_unknown_example(client):
    assert client.get("/api/examples/duffing").status_code == 404


def test_lorenz_has_no_classical_variant(client):
    response = client.get("/api/examples/lorenz", params={"classical": True})
    assert response.status_code == 400
    assert response.json()["detail"]["kind"] == "input"


def test_schema(client):
    schema = client.get("/api/schema").json()
    assert set(schema["required"]) >= {"n", "N", "pattern"}


def test_certify_then_verify(client, config_payload):
    response = client.post("/api/certify", json={"config": config_payload})
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "certified"
    assert body["report"]["verdict"] == "pass"

    response = client.post("/api/verify", json={"config": config_payload, "certificate": body["certificate"]})
    assert response.status_code == 200
    assert response.json()["report"]["verdict"] == "pass"
    assert response.json()["hash_mismatch"] is False


def test_certify_disconnected(client, disconnected_config):
    payload = {"config": disconnected_config.model_dump(mode="json", exclude_none=True)}
    response = client.post("/api/certify", json=payload)
    assert response.status_code == 400
    detail = response.json()["detail"]
    assert detail["kind"] == "assumption1"
    assert detail["violations"][0]["kind"] == "zero-multiplicity"


def test_certify_rejects_bad_config(client):
    response = client.post("/api/certify", json={"config": {"n": 0, "N": 2, "pattern": {"cycle": 2}}})
    assert response.status_code == 422


def test_simulate(client, config_payload):
    response = client.post(
        "/api/simulate",
        json={"config": config_payload, "dt": 0.01, "t_final": 1.0, "seed": 4, "stride": 10},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["columns"] == ["t", "x_1_1", "x_2_1", "disagreement"]
    # 101 samples, every 10th kept
    assert len(body["rows"]) == 11
    assert body["metadata"]["final_disagreement"] < body["metadata"]["initial_disagreement"]
