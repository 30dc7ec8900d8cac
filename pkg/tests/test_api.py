"""
SolAut API Tests
The HTTP endpoints return the same report documents as the command line.
"""

import pytest


@pytest.mark.asyncio
async def test_health(client):
    """GET /api/health should return 200 with status healthy."""
    response = await client.get("/api/health")
    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "healthy"
    assert data["version"]


@pytest.mark.asyncio
async def test_classify(client):
    """POST /api/classify returns the classify report."""
    response = await client.post("/api/classify", json={"matrix": "2,1;1,1"})
    assert response.status_code == 200
    data = response.json()
    assert data["command"] == "classify"
    assert data["result"]["primitive_root"]["M0"] == "(1,1;1,0)"


@pytest.mark.asyncio
async def test_classify_parse_error(client):
    """A malformed matrix is a 422 carrying the parse-error exit code."""
    response = await client.post("/api/classify", json={"matrix": "1,2,3"})
    assert response.status_code == 422
    data = response.json()
    assert data["error"] == "ParseError"
    assert data["exit_code"] == 2


@pytest.mark.asyncio
async def test_classify_not_unimodular(client):
    response = await client.post("/api/classify", json={"matrix": "1,0;0,2"})
    assert response.status_code == 400
    assert response.json()["error"] == "NotUnimodular"


@pytest.mark.asyncio
async def test_out_torus_bundle(client):
    """Out(E) for theta = (2,1;1,1) has order 8."""
    response = await client.post("/api/out", json={"kind": "torus-bundle", "matrix": "2,1;1,1"})
    assert response.status_code == 200
    data = response.json()
    assert data["result"]["order"] == "8"
    assert data["result"]["case"]["out"] == "III(a)"


@pytest.mark.asyncio
async def test_out_sapphire_det_minus_one(client):
    response = await client.post("/api/out", json={"kind": "sapphire", "matrix": "1,2;1,1"})
    assert response.status_code == 400
    data = response.json()
    assert data["error"] == "DetMinusOne"
    assert data["exit_code"] == 5


@pytest.mark.asyncio
async def test_unknown_kind_rejected(client):
    """kind is validated by the request model."""
    response = await client.post("/api/aut", json={"kind": "klein", "matrix": "2,1;1,1"})
    assert response.status_code == 422


@pytest.mark.asyncio
async def test_aut_sapphire(client):
    response = await client.post("/api/aut", json={"kind": "sapphire", "matrix": "2,1;1,1"})
    assert response.status_code == 200
    data = response.json()
    assert data["result"]["case"] == "I"
    assert set(data["result"]["automorphisms"]) == {"alpha", "beta", "rho", "omega", "zeta"}


@pytest.mark.asyncio
async def test_homeo(client):
    response = await client.post("/api/homeo", json={"A": "2,1;1,1", "B": "1,-1;-1,2"})
    assert response.status_code == 200
    assert response.json()["result"]["homeomorphic"] is True
