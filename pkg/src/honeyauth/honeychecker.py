"""The separated genuine-position store and check service.

This component knows one thing per user: which slot ordinal is genuine.
It lives in its own store (and, in the default deployment, its own
process reachable over a local HTTP endpoint with a shared-secret
header) so that compromising the accounts database reveals nothing
about positions. The API surface is deliberately tiny: set, check,
delete. Every failed check emits exactly one alarm to a pluggable sink.
"""

from __future__ import annotations

import hmac
import json
import logging
import threading
from dataclasses import asdict, dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Protocol

import httpx

from .errors import (
    HoneycheckerUnavailableError,
    UnknownUserError,
    ValidationError,
)
from .storage import JsonFileStore, utc_now_iso

__all__ = [
    "AlarmSignal",
    "InMemoryAlarmSink",
    "LoggingAlarmSink",
    "WebhookAlarmSink",
    "Honeychecker",
    "CheckerClient",
    "HttpCheckerClient",
    "CheckerServer",
]

logger = logging.getLogger("honeyauth.honeychecker")

AUTH_HEADER = "x-checker-token"


@dataclass(frozen=True)
class AlarmSignal:
    """Raised when a submitted slot ordinal differs from the stored one."""

    username: str
    observed_slot: int
    raised_at: str


AlarmSink = Callable[[AlarmSignal], None]


class InMemoryAlarmSink:
    """Collects signals in a list; used by tests and demos."""

    def __init__(self) -> None:
        self.signals: list[AlarmSignal] = []
        self._lock = threading.Lock()

    def __call__(self, signal: AlarmSignal) -> None:
        with self._lock:
            self.signals.append(signal)


class LoggingAlarmSink:
    """Writes one warning line per alarm; the default sink."""

    def __call__(self, signal: AlarmSignal) -> None:
        logger.warning(
            "decoy slot submitted user=%s observed_slot=%d at=%s",
            signal.username,
            signal.observed_slot,
            signal.raised_at,
        )


class WebhookAlarmSink:
    """POSTs each alarm as JSON to a webhook URL; delivery is best-effort."""

    def __init__(self, url: str, timeout: float = 3.0) -> None:
        self._url = url
        self._timeout = timeout

    def __call__(self, signal: AlarmSignal) -> None:
        try:
            httpx.post(self._url, json=asdict(signal), timeout=self._timeout)
        except httpx.HTTPError:
            logger.warning("alarm webhook delivery failed url=%s", self._url)


class Honeychecker:
    """Core set/check/delete logic over its own single-file store.

    The store persists only (username, sweet_index, updated_at). Updates
    are linearized by the store lock; check never mutates the record.
    """

    def __init__(
        self,
        store: JsonFileStore,
        max_slots: int = 3,
        alarm_sink: AlarmSink | None = None,
    ) -> None:
        self._store = store
        self._max_slots = max_slots
        self._alarm_sink: AlarmSink = alarm_sink or LoggingAlarmSink()

    def set_index(self, username: str, index: int) -> None:
        if not username:
            raise ValidationError("username must be nonempty")
        if not 1 <= index <= self._max_slots:
            raise ValidationError(f"index {index} out of range 1..{self._max_slots}")

        def mutate(data: dict) -> None:
            data.setdefault("users", {})[username] = {
                "sweet_index": index,
                "updated_at": utc_now_iso(),
            }

        self._store.update(mutate)

    def check(self, username: str, observed_slot: int) -> bool:
        record = self._store.read(lambda d: d.get("users", {}).get(username))
        if record is None:
            raise UnknownUserError(f"no position stored for {username!r}")
        match = record["sweet_index"] == observed_slot
        if not match:
            self._alarm_sink(
                AlarmSignal(
                    username=username,
                    observed_slot=observed_slot,
                    raised_at=utc_now_iso(),
                )
            )
        return match

    def delete_index(self, username: str) -> None:
        self._store.update(lambda d: d.get("users", {}).pop(username, None))

    def knows(self, username: str) -> bool:
        return self._store.read(lambda d: username in d.get("users", {}))


class CheckerClient(Protocol):
    """What the login side is allowed to ask the checker."""

    def set_index(self, username: str, index: int) -> None: ...

    def check(self, username: str, observed_slot: int) -> bool: ...

    def delete_index(self, username: str) -> None: ...


class HttpCheckerClient:
    """Talks to a checker process over its wire API.

    Requests multiplex over one pooled httpx client; connection failures
    surface as HoneycheckerUnavailableError so logins degrade loudly
    instead of guessing.
    """

    def __init__(self, base_url: str, shared_secret: str, timeout: float = 5.0) -> None:
        self._client = httpx.Client(
            base_url=base_url,
            headers={AUTH_HEADER: shared_secret},
            timeout=timeout,
            limits=httpx.Limits(max_connections=8),
        )

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise HoneycheckerUnavailableError(f"checker unreachable: {exc}") from exc
        if response.status_code == 404:
            raise UnknownUserError(response.json().get("message", "unknown user"))
        if response.status_code == 422:
            raise ValidationError(response.json().get("message", "invalid request"))
        if response.status_code != 200:
            raise HoneycheckerUnavailableError(
                f"checker returned {response.status_code}: {response.text[:200]}"
            )
        return response.json()

    def set_index(self, username: str, index: int) -> None:
        self._post("/set", {"username": username, "index": index})

    def check(self, username: str, observed_slot: int) -> bool:
        return bool(self._post("/check", {"username": username, "observed_slot": observed_slot})["match"])

    def delete_index(self, username: str) -> None:
        self._post("/delete", {"username": username})

    def health(self) -> bool:
        try:
            return self._client.get("/health").status_code == 200
        except httpx.HTTPError:
            return False

    def close(self) -> None:
        self._client.close()


class _CheckerRequestHandler(BaseHTTPRequestHandler):
    server_version = "honeychecker/0.1"
    checker: Honeychecker
    shared_secret: str

    def log_message(self, fmt: str, *args) -> None:  # route through logging
        logger.debug("%s %s", self.address_string(), fmt % args)

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _authorized(self) -> bool:
        supplied = self.headers.get(AUTH_HEADER, "")
        return hmac.compare_digest(supplied, self.shared_secret)

    def do_GET(self) -> None:
        if self.path == "/health":
            self._send(200, {"status": "ok"})
        else:
            self._send(404, {"code": "not_found", "message": "unknown path"})

    def do_POST(self) -> None:
        if not self._authorized():
            self._send(401, {"code": "unauthorized", "message": "bad shared secret"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length) or b"{}")
            if not isinstance(payload, dict):
                raise ValueError("payload must be an object")
        except (ValueError, json.JSONDecodeError):
            self._send(400, {"code": "bad_request", "message": "invalid JSON body"})
            return
        try:
            if self.path == "/set":
                self.checker.set_index(str(payload["username"]), int(payload["index"]))
                self._send(200, {"ok": True})
            elif self.path == "/check":
                match = self.checker.check(
                    str(payload["username"]), int(payload["observed_slot"])
                )
                self._send(200, {"match": match})
            elif self.path == "/delete":
                self.checker.delete_index(str(payload["username"]))
                self._send(200, {"ok": True})
            else:
                self._send(404, {"code": "not_found", "message": "unknown path"})
        except KeyError as exc:
            self._send(422, {"code": "validation_error", "message": f"missing field {exc}"})
        except (TypeError, ValueError):
            self._send(422, {"code": "validation_error", "message": "malformed field"})
        except ValidationError as exc:
            self._send(422, {"code": "validation_error", "message": str(exc)})
        except UnknownUserError as exc:
            self._send(404, {"code": "unknown_user", "message": str(exc)})


class CheckerServer:
    """Threaded HTTP wrapper around a Honeychecker instance."""

    def __init__(
        self, checker: Honeychecker, host: str = "127.0.0.1", port: int = 0, shared_secret: str = ""
    ) -> None:
        if not shared_secret:
            raise ValidationError("checker server requires a shared secret")
        handler = type(
            "BoundCheckerHandler",
            (_CheckerRequestHandler,),
            {"checker": checker, "shared_secret": shared_secret},
        )
        self._httpd = ThreadingHTTPServer((host, port), handler)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._httpd.server_address[:2]

    @property
    def url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def start_background(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def shutdown(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
