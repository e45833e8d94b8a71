"""Tests for the HTTP service endpoints."""

import asyncio
import json

import httpx
import pytest

from aaakeylab.service import create_app


class InProcessClient:
    """Synchronous facade over the async ASGI transport."""

    def __init__(self, app):
        self._app = app

    def request(self, method, path, **kwargs):
        async def go():
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://lab"
            ) as client:
                return await client.request(method, path, **kwargs)

        return asyncio.run(go())

    def get(self, path, **kwargs):
        return self.request("GET", path, **kwargs)

    def post(self, path, **kwargs):
        return self.request("POST", path, **kwargs)


@pytest.fixture()
def client():
    return InProcessClient(create_app())


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert "version" in body


def test_scenario_run_roundtrip(client):
    payload = {
        "scenario": {
            "name": "svc",
            "intercept": {"mode": "per_bit", "mu": 0.5},
            "j": 4,
            "outputs": ["closed_form", "capacity"],
        }
    }
    resp = client.post("/scenario/run", json=payload)
    assert resp.status_code == 200
    body = resp.json()
    assert body["name"] == "svc"
    assert set(body["files"]) == {"svc.csv", "svc.json"}
    assert body["summary"]["closed_form"] == 0.9375
    summary = json.loads(body["files"]["svc.json"])
    assert summary["capacity"] == 2.0


def test_scenario_run_rejects_unknown_field(client):
    payload = {
        "scenario": {"name": "bad", "intercept": {"mu": 0.5}, "j": 2, "nope": 1}
    }
    resp = client.post("/scenario/run", json=payload)
    assert resp.status_code == 422


def test_scenario_run_rejects_inconsistent_model(client):
    payload = {
        "scenario": {
            "name": "bad",
            "source": {"kind": "markov", "alphas": [0.5]},
            "intercept": {"mu": 0.4},
            "j": 2,
            "outputs": ["mc"],
        }
    }
    resp = client.post("/scenario/run", json=payload)
    assert resp.status_code == 422
    assert "independent" in str(resp.json()["detail"])


def test_scenario_run_enumeration_limit_maps_to_422(client):
    payload = {
        "scenario": {
            "name": "deep",
            "intercept": {"mu": 0.5},
            "j": 14,
            "outputs": ["oracle"],
        }
    }
    resp = client.post("/scenario/run", json=payload)
    assert resp.status_code == 422
    assert "budget" in resp.json()["detail"]


def test_verify_endpoint_small_seed(client):
    resp = client.post("/verify", json={"seed": 0})
    assert resp.status_code == 200
    body = resp.json()
    assert body["passed"] is True
    names = [c["name"] for c in body["checks"]]
    assert "perbit-oracle-vs-closed-form" in names
    assert "markov-pair-oracle-vs-closed-forms" in names
    assert "verify.json" in body["files"]
    stored = json.loads(body["files"]["verify.json"])
    assert stored["passed"] is True


def test_sweep_endpoint(client):
    resp = client.post("/sweep/markov", json={"alpha_step": 0.5, "mu": 0.2})
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["rows"] == 3
    assert "markov_sweep.csv" in body["files"]


def test_sweep_endpoint_validation(client):
    resp = client.post("/sweep/markov", json={"alpha_step": 0.0})
    assert resp.status_code == 422


def test_extractor_endpoint(client):
    resp = client.post(
        "/extractor/demo", json={"n": 16, "mu": [0.5], "draws": 200, "seed": 5}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["draws"] == 200
    assert "extractor_demo.csv" in body["files"]


def test_extractor_endpoint_validation(client):
    resp = client.post("/extractor/demo", json={"n": 16, "mu": [1.5]})
    assert resp.status_code == 422
