"""
SolAut Test Configuration
Fresh settings per test and an async httpx client against the API app.
"""

import os

import pytest
import pytest_asyncio
from httpx import AsyncClient, ASGITransport

from app.config import reset_settings
from app.intmat import Mat2


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Drop cached settings so env tweaks in one test never leak into the next."""
    for name in [k for k in os.environ if k.startswith("SOLAUT_")]:
        monkeypatch.delenv(name, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def golden():
    """theta = (2,1;1,1), the square of the golden matrix (1,1;1,0)."""
    return Mat2(2, 1, 1, 1)


@pytest_asyncio.fixture
async def client():
    """Async client for the FastAPI app with rate limiting disabled."""
    from app.main import app

    # Disable rate limiting for tests
    app.state.limiter.enabled = False

    transport = ASGITransport(app=app)
    async with AsyncClient(transport=transport, base_url="http://test") as c:
        yield c

    # Re-enable after test
    app.state.limiter.enabled = True
