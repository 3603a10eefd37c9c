import random
import socket
import sys
import threading
import time
from pathlib import Path

import pytest
import uvicorn

sys.path.insert(0, str(Path(__file__).parent))

from honeyauth.accounts import AccountPolicy, AccountService, RegistrationForm
from honeyauth.honeychecker import Honeychecker, InMemoryAlarmSink
from honeyauth.sms import MockSmsGateway
from honeyauth.storage import JsonFileStore


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class UvicornThread:
    """Run a FastAPI app on a real socket in a background thread."""

    def __init__(self, app, port: int | None = None) -> None:
        self.port = port or free_port()
        self.url = f"http://127.0.0.1:{self.port}"
        self._server = uvicorn.Server(
            uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="warning")
        )
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def __enter__(self) -> "UvicornThread":
        self._thread.start()
        deadline = time.time() + 15
        while not self._server.started:
            if time.time() > deadline:
                raise RuntimeError("uvicorn did not start in time")
            time.sleep(0.02)
        return self

    def __exit__(self, *exc) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10)


class FakeClock:
    """Frozen, manually advanced clock."""

    def __init__(self, now: float = 1_700_000_000.0) -> None:
        self.now = now

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


@pytest.fixture()
def clock():
    return FakeClock()


@pytest.fixture()
def alarm_sink():
    return InMemoryAlarmSink()


@pytest.fixture()
def service_parts(tmp_path, clock, alarm_sink):
    """An AccountService wired to an in-process checker and mock SMS."""
    accounts_store = JsonFileStore(tmp_path / "accounts.json")
    checker_store = JsonFileStore(tmp_path / "checker.json")
    checker = Honeychecker(checker_store, max_slots=3, alarm_sink=alarm_sink)
    gateway = MockSmsGateway()
    service = AccountService(
        accounts_store,
        checker,
        policy=AccountPolicy(),
        sms_gateway=gateway,
        admin_token="admin-token-for-tests",
        clock=clock,
        rng=random.Random(424242),
    )
    return {
        "service": service,
        "checker": checker,
        "gateway": gateway,
        "accounts_store": accounts_store,
        "checker_store": checker_store,
        "clock": clock,
        "alarm_sink": alarm_sink,
    }


ALICE = RegistrationForm(
    username="alice",
    password="correct horse battery",
    firstname="Alice",
    lastname="Argyropoulou",
    phone="+306912345678",
)
