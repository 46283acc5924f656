"""Client for the polepi service.

The CLI talks to the HTTP API through this class. Without a server URL
the app is instantiated in-process and requests travel over an ASGI
transport, so every command works standalone while exercising exactly
the same endpoints a remote deployment serves.
"""

from __future__ import annotations

import asyncio
from typing import Any, Optional

import httpx

from polepi.errors import ConfigError, PolepiError, UndefinedMetricError


class ServiceError(PolepiError):
    """Server-side failure that maps onto no more specific category."""


def _error_from_payload(status: int, payload: Any) -> Exception:
    if isinstance(payload, dict):
        category = payload.get("category")
        detail = payload.get("detail", "")
        if isinstance(detail, list):  # FastAPI request-validation errors
            parts = []
            for err in detail:
                loc = ".".join(str(p) for p in err.get("loc", []) if p != "body")
                parts.append(f"{loc}: {err.get('msg', '')}")
            return ConfigError("invalid request: " + "; ".join(parts))
        if category == "config":
            return ConfigError(detail)
        if category == "metric":
            return UndefinedMetricError(detail)
        if category == "io":
            return OSError(detail)
        if detail:
            return ServiceError(f"HTTP {status}: {detail}")
    return ServiceError(f"HTTP {status}: {payload}")


class ServiceClient:
    def __init__(self, server: Optional[str] = None):
        self._server = server
        self._app = None
        if server is None:
            from polepi.service import create_app

            self._app = create_app()

    def _request(self, method: str, path: str, json_body=None) -> Any:
        if self._server is not None:
            with httpx.Client(base_url=self._server, timeout=None) as client:
                resp = client.request(method, path, json=json_body)
        else:
            resp = asyncio.run(self._asgi_request(method, path, json_body))
        if resp.status_code >= 400:
            try:
                payload = resp.json()
            except ValueError:
                payload = resp.text
            raise _error_from_payload(resp.status_code, payload)
        return resp.json()

    async def _asgi_request(self, method: str, path: str, json_body):
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://polepi.internal", timeout=None
        ) as client:
            return await client.request(method, path, json=json_body)

    def health(self) -> dict:
        return self._request("GET", "/health")

    def defaults(self) -> dict:
        return self._request("GET", "/defaults")

    def run(self, overrides: dict) -> dict:
        return self._request("POST", "/runs", {"overrides": overrides})

    def submit_campaign(self, request: dict) -> dict:
        return self._request("POST", "/campaigns", request)

    def job(self, job_id: str) -> dict:
        return self._request("GET", f"/jobs/{job_id}")

    def analyze(self, tables: dict[str, str]) -> dict:
        return self._request("POST", "/analyze", {"tables": tables})

    def export_graph(self, spec: dict) -> dict:
        return self._request("POST", "/graph/export", {"spec": spec})
