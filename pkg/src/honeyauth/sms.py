"""SMS gateway contract and the stand-in gateways shipped with it.

Real carrier integration is out of scope; the login flow only needs a
pluggable ``send`` with an inspectable default. The message body lists
the N delivered codes newline-separated in slot order, ordinals first,
so the memorized position is meaningful on a dumb phone too.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .errors import HoneyauthError

__all__ = [
    "SmsMessage",
    "SmsDeliveryError",
    "SmsGateway",
    "MockSmsGateway",
    "ConsoleSmsGateway",
    "FailingSmsGateway",
    "format_codes_body",
]


class SmsDeliveryError(HoneyauthError):
    """The gateway could not deliver the message."""


@dataclass(frozen=True)
class SmsMessage:
    to: str
    body: str


def format_codes_body(codes: list[str]) -> str:
    """One "ordinal: code" line per slot, in slot order."""
    return "\n".join(f"{i}: {code}" for i, code in enumerate(codes, start=1))


class SmsGateway(Protocol):
    def send(self, message: SmsMessage) -> None: ...


class MockSmsGateway:
    """Keeps messages in memory and, optionally, appends them to a JSONL
    file so other processes can inspect the outbox."""

    def __init__(self, outbox_path: str | Path | None = None) -> None:
        self.outbox: list[SmsMessage] = []
        self._path = Path(outbox_path) if outbox_path else None
        self._lock = threading.Lock()

    def send(self, message: SmsMessage) -> None:
        with self._lock:
            self.outbox.append(message)
            if self._path is not None:
                self._path.parent.mkdir(parents=True, exist_ok=True)
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps({"to": message.to, "body": message.body}) + "\n")


class ConsoleSmsGateway:
    """Prints messages to stdout; handy for interactive demos."""

    def send(self, message: SmsMessage) -> None:
        print(f"--- SMS to {message.to} ---\n{message.body}\n---")


class FailingSmsGateway:
    """Always fails; used to exercise the delivery-failure path."""

    def send(self, message: SmsMessage) -> None:
        raise SmsDeliveryError("carrier unavailable")
