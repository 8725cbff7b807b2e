"""HTTP access with retry, rate limiting and a record/replay layer.

Every live request can be recorded to a cassette directory (one JSON file
per request, keyed by a hash of method, URL and parameters) and replayed
later without network access.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from ..errors import NetworkError

log = logging.getLogger(__name__)

DEFAULT_USER_AGENT = "bioevent/0.1 (research toolkit; https://www.wikidata.org/wiki/Wikidata:Data_access)"
RETRY_STATUS = {429, 500, 502, 503, 504}


@dataclass
class Response:
    status: int
    text: str
    headers: dict = field(default_factory=dict)

    def json(self):
        return json.loads(self.text)


def request_key(method: str, url: str, params: dict | None = None) -> str:
    payload = json.dumps({"method": method.upper(), "url": url, "params": params or {}}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def atomic_write(path, data: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class RateLimiter:
    """At most ``rate`` calls per second across threads."""

    def __init__(self, rate: float | None):
        self.interval = 1.0 / rate if rate else 0.0
        self._next = 0.0
        self._lock = threading.Lock()

    def wait(self):
        if not self.interval:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next - now
            self._next = max(now, self._next) + self.interval
        if delay > 0:
            time.sleep(delay)


class Transport:
    calls = 0

    def get(self, url, params=None, headers=None) -> Response:
        raise NotImplementedError


class HttpTransport(Transport):
    def __init__(self, timeout=60.0, retries=4, backoff=2.0, rate=None, user_agent=None, session=None):
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.limiter = RateLimiter(rate)
        self.session = session or requests.Session()
        self.session.headers["User-Agent"] = user_agent or os.environ.get("BIOEVENT_USER_AGENT", DEFAULT_USER_AGENT)
        self.calls = 0

    @classmethod
    def from_env(cls):
        env = os.environ
        return cls(timeout=float(env.get("BIOEVENT_HTTP_TIMEOUT", 60)),
                   retries=int(env.get("BIOEVENT_HTTP_RETRIES", 4)),
                   rate=float(env["BIOEVENT_RATE_LIMIT"]) if env.get("BIOEVENT_RATE_LIMIT") else None)

    def get(self, url, params=None, headers=None) -> Response:
        last = None
        for attempt in range(self.retries + 1):
            self.limiter.wait()
            self.calls += 1
            try:
                r = self.session.get(url, params=params, headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last = f"{type(exc).__name__}: {exc}"
            else:
                if r.status_code not in RETRY_STATUS:
                    return Response(r.status_code, r.text, dict(r.headers))
                last = f"HTTP {r.status_code}"
                retry_after = r.headers.get("Retry-After")
                if retry_after and retry_after.isdigit():
                    time.sleep(min(float(retry_after), 300))
                    continue
            if attempt < self.retries:
                delay = self.backoff * 2 ** attempt
                log.warning("request failed (%s); retry %d in %.1fs", last, attempt + 1, delay)
                time.sleep(delay)
        raise NetworkError(f"giving up on {url} after {self.retries + 1} attempts: {last}")


class RecordingTransport(Transport):
    """Pass requests through and store each response in ``cassette_dir``."""

    def __init__(self, inner: Transport, cassette_dir):
        self.inner = inner
        self.dir = Path(cassette_dir)
        self.calls = 0

    def get(self, url, params=None, headers=None) -> Response:
        self.calls += 1
        resp = self.inner.get(url, params, headers)
        rec = {"request": {"method": "GET", "url": url, "params": params or {}},
               "response": {"status": resp.status, "text": resp.text}}
        atomic_write(self.dir / f"{request_key('GET', url, params)}.json", json.dumps(rec, indent=1, sort_keys=True))
        return resp


class ReplayTransport(Transport):
    """Serve recorded responses; an unrecorded request is a NetworkError."""

    def __init__(self, cassette_dir):
        self.dir = Path(cassette_dir)
        self.calls = 0

    def get(self, url, params=None, headers=None) -> Response:
        self.calls += 1
        path = self.dir / f"{request_key('GET', url, params)}.json"
        if not path.exists():
            raise NetworkError(f"no recorded response for GET {url} {params or ''}")
        rec = json.loads(path.read_text("utf-8"))["response"]
        return Response(rec["status"], rec["text"])
