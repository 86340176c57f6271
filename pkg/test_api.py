"""
Tests for the HTTP service.
"""

import numpy as np
import pytest
from fastapi.testclient import TestClient

import api
from analytic import DilogParams, phi_zero
from check_report import CheckReport, check_entry


@pytest.fixture
def client():
    return TestClient(api.app)


def test_root_and_health(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "/phi" in response.json()["endpoints"]
    health = client.get("/health").json()
    assert health["status"] == "healthy"


def test_cluster_mutate(client):
    payload = {"seed": {"B": [[0, 1], [-1, 0]], "x": ["x1", "x2"]}, "ks": [1]}
    response = client.post("/cluster/mutate", json=payload)
    assert response.status_code == 200
    seed = response.json()["seed"]
    assert seed["B"] == [[0, -1], [1, 0]]
    assert seed["x"][1] == "x2"


def test_cluster_mutate_bad_seed(client):
    payload = {"seed": {"B": [[0, 1], [1, 0]]}, "ks": [1]}
    assert client.post("/cluster/mutate", json=payload).status_code == 400
    payload = {"seed": {"B": [[0, 1], [-1, 0]]}, "ks": [3]}
    assert client.post("/cluster/mutate", json=payload).status_code == 400


def test_braid_eval_and_verify(client):
    response = client.post("/braid/eval", json={"n": 2, "word": "s1 s1^-1"})
    assert response.status_code == 200
    assert response.json()["seed"]["y"] == [f"y{k}" for k in range(1, 8)]
    assert client.post("/braid/eval", json={"n": 2, "word": "s5"}).status_code == 400
    assert client.post("/braid/eval", json={"n": 2, "word": "s1", "mode": "z"}).status_code == 422

    report = client.get("/braid/verify", params={"n": 3, "mode": "x"}).json()
    assert report["status"] == "PASS"
    assert client.get("/braid/verify", params={"mode": "q"}).status_code == 400


def test_rk_matrix(client):
    data = client.get("/rk/2").json()
    assert data["dim"] == 4
    assert np.asarray(data["entries"]).shape == (4, 4, 2)
    assert client.get("/rk/0").status_code == 400
    assert client.get("/rk/2", params={"mode": "float"}).status_code == 400


def test_phi_value(client):
    response = client.post("/phi", json={"z": 0, "b": "0.7+0.2i"})
    assert response.status_code == 200
    re, im = response.json()["value"]
    assert complex(re, im) == pytest.approx(phi_zero(DilogParams(0.7 + 0.2j)), rel=1e-9)
    assert client.post("/phi", json={"z": 0, "b": 1}).status_code == 400
    assert client.post("/phi", json={"z": 0, "b": [0.6, 0.8], "mode": "fast"}).status_code == 422


def test_phi_pole_is_unprocessable(client):
    p = DilogParams(0.6 + 0.8j)
    pole = -p.c_b
    response = client.post("/phi", json={"z": [pole.real, pole.imag], "b": [0.6, 0.8]})
    assert response.status_code == 422


def test_volume(client):
    real = [0.5, 1.5, 2.0, 0.3, 0.7, 1.1, 0.9]
    response = client.post("/volume", json={"y": real})
    assert response.status_code == 200
    assert response.json()["value"] == pytest.approx(0.0, abs=1e-12)
    assert client.post("/volume", json={"y": [1.0, 2.0]}).status_code == 400


def test_checks_endpoint_uses_suite(client, monkeypatch):
    seen = {}

    def fake_suite(level, seed, jobs):
        seen.update(level=level, seed=seed, jobs=jobs)
        return CheckReport([check_entry("stub.ok", "stub", True)], title="stub")

    monkeypatch.setattr(api, "run_check_suite", fake_suite)
    response = client.post("/checks", json={"level": "full", "seed": 3, "jobs": 2})
    assert response.status_code == 200
    assert response.json()["status"] == "PASS"
    assert seen == {"level": "full", "seed": 3, "jobs": 2}
    assert client.post("/checks", json={"level": "huge"}).status_code == 422
