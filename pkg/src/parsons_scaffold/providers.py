"""Text-generation providers and the persistent response cache.

Requests are fully deterministic (temperature pinned to 0) so a content
hash of (template_id, rendered_prompt) is a stable cache key across
restarts. The null provider always fails, which forces every consumer
through its deterministic fallback; the replay provider serves canned
fixture texts for tests.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class ProviderRequest:
    template_id: str
    rendered_prompt: str
    max_tokens: int = 768
    temperature: float = 0.0


@dataclass(frozen=True)
class ProviderResponse:
    text: str
    provider_name: str
    cached: bool = False


class ProviderFailure(Exception):
    """The provider could not produce text; callers fall back."""


class NullProvider:
    name = "null"

    def complete(self, request: ProviderRequest) -> ProviderResponse:
        raise ProviderFailure("null provider never answers")


class ReplayProvider:
    """Serves fixture texts keyed by template_id; missing keys fail."""

    name = "replay"

    def __init__(self, fixtures: dict[str, str] | None = None):
        self.fixtures = dict(fixtures or {})
        self.calls: list[ProviderRequest] = []

    def complete(self, request: ProviderRequest) -> ProviderResponse:
        self.calls.append(request)
        if request.template_id not in self.fixtures:
            raise ProviderFailure(f"no fixture for {request.template_id!r}")
        return ProviderResponse(
            text=self.fixtures[request.template_id], provider_name=self.name
        )


class HttpProvider:
    """Chat-completion-style JSON endpoint, configured via environment."""

    name = "http"

    def __init__(
        self,
        url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        timeout_s: float = 30.0,
    ):
        self.url = url or os.environ.get("PROVIDER_URL", "")
        self.api_key = api_key or os.environ.get("PROVIDER_KEY", "")
        self.model = model or os.environ.get("MODEL_NAME", "")
        self.timeout_s = timeout_s
        if not self.url:
            raise ValueError("HttpProvider needs PROVIDER_URL")

    def complete(self, request: ProviderRequest) -> ProviderResponse:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.rendered_prompt}],
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
        }
        try:
            resp = requests.post(
                self.url, json=body, headers=headers, timeout=self.timeout_s
            )
            resp.raise_for_status()
            payload = resp.json()
            text = payload["choices"][0]["message"]["content"]
        except Exception as exc:
            raise ProviderFailure(f"provider call failed: {exc}") from exc
        return ProviderResponse(text=text, provider_name=self.name)


def cache_key(template_id: str, rendered_prompt: str) -> str:
    digest = hashlib.sha256()
    digest.update(template_id.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(rendered_prompt.encode("utf-8"))
    return digest.hexdigest()


class ResponseCache:
    """JSON-file-backed cache; safe under concurrent use in one process.

    Values are deterministic per key, so last-writer-wins on the file is
    acceptable. A corrupt file is treated as empty.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._entries: dict[str, str] = {}
        if self.path and self.path.exists():
            try:
                self._entries = json.loads(self.path.read_text())
                if not isinstance(self._entries, dict):
                    self._entries = {}
            except (json.JSONDecodeError, OSError):
                self._entries = {}

    def lookup(self, key: str) -> str | None:
        with self._lock:
            return self._entries.get(key)

    def store(self, key: str, text: str) -> None:
        with self._lock:
            self._entries[key] = text
            if self.path:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                tmp = self.path.with_suffix(".tmp")
                tmp.write_text(json.dumps(self._entries, sort_keys=True))
                tmp.replace(self.path)


class CachingProvider:
    """Wraps any provider with the persistent response cache."""

    def __init__(self, inner, cache: ResponseCache):
        self.inner = inner
        self.cache = cache
        self.name = inner.name

    def complete(self, request: ProviderRequest) -> ProviderResponse:
        key = cache_key(request.template_id, request.rendered_prompt)
        hit = self.cache.lookup(key)
        if hit is not None:
            return ProviderResponse(text=hit, provider_name=self.name, cached=True)
        response = self.inner.complete(request)
        self.cache.store(key, response.text)
        return response


def make_provider(kind: str, cache_path: str | Path | None = None, fixtures=None):
    """Factory used by config: kind in {null, replay, http}."""
    if kind == "null":
        inner = NullProvider()
    elif kind == "replay":
        inner = ReplayProvider(fixtures)
    elif kind == "http":
        inner = HttpProvider()
    else:
        raise ValueError(f"unknown provider kind {kind!r}")
    return CachingProvider(inner, ResponseCache(cache_path))
