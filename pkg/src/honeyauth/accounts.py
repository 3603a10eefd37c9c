"""Registration and the two-step login state machine.

The accounts store holds credentials, profiles, counters, and the OTP
secrets; it never holds the genuine slot position. At login the service
learns which slots a submitted code matches and asks the separated
checker whether any matched slot is the genuine one -- it never fetches
the position itself.

Lock policy: a decoy hit locks instantly and records a breach event;
three consecutive wrong passwords lock; three garbage OTP submissions
(matching no slot) lock. Counters reset on success and on admin unlock.
"""

from __future__ import annotations

import hmac
import json
import logging
import random
import re
import secrets
import threading
import time
from dataclasses import dataclass
from typing import Callable, NoReturn

from .errors import (
    AccountLockedError,
    AuthenticationError,
    AuthorizationError,
    DuplicateUserError,
    IntegrityError,
    OtpRejectedError,
    SessionError,
    UnknownUserError,
    ValidationError,
)
from .honeychecker import CheckerClient
from .honeytokens import SweetBundle, codes_for_delivery, generate_bundle, matching_slots
from .otp import SweetSecret, TotpParams, base32_decode, base32_encode, is_well_formed_code
from .passwords import PasswordPolicy, hash_password, verify_password
from .provisioning import ProvisioningBundle, build_provisioning_bundle
from .sms import SmsGateway, SmsMessage, format_codes_body
from .storage import JsonFileStore, utc_now_iso

__all__ = [
    "RegistrationForm",
    "LoginSession",
    "BreachEvent",
    "AccountPolicy",
    "AccountService",
]

audit_log = logging.getLogger("honeyauth.audit")

_USERNAME_RE = re.compile(r"^[A-Za-z0-9._@+-]{1,64}$")
_PHONE_RE = re.compile(r"^\+?[0-9][0-9 \-]{5,18}[0-9]$")


@dataclass(frozen=True)
class RegistrationForm:
    username: str
    password: str
    firstname: str
    lastname: str
    phone: str


@dataclass(frozen=True)
class LoginSession:
    session_id: str
    username: str
    state: str
    issued_at: float
    expires_at: float


@dataclass(frozen=True)
class BreachEvent:
    username: str
    submitted_code: str
    matched_slot: int
    at: str


@dataclass(frozen=True)
class AccountPolicy:
    slots: int = 3
    issuer: str = "HoneyAuth"
    session_ttl_seconds: float = 90.0
    max_password_failures: int = 3
    max_otp_failures: int = 3
    totp_params: TotpParams = TotpParams()
    length_schedule: tuple[int, ...] | None = None


def _audit(event: str, username: str, **fields) -> None:
    record = {"ts": utc_now_iso(), "event": event, "user": username, **fields}
    audit_log.info(json.dumps(record, sort_keys=True))


class AccountService:
    """Per-username linearized operations over the accounts store."""

    def __init__(
        self,
        store: JsonFileStore,
        checker: CheckerClient,
        *,
        policy: AccountPolicy | None = None,
        password_policy: PasswordPolicy | None = None,
        sms_gateway: SmsGateway | None = None,
        admin_token: str | None = None,
        clock: Callable[[], float] = time.time,
        rng: random.Random | None = None,
    ) -> None:
        self._store = store
        self._checker = checker
        self.policy = policy or AccountPolicy()
        self._password_policy = password_policy or PasswordPolicy()
        self._sms = sms_gateway
        self._admin_token = admin_token
        self._clock = clock
        self._rng = rng
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        # Same-cost comparison target for unknown usernames.
        self._timing_equalizer = hash_password("honeyauth-timing-equalizer")
        self._store.update(
            lambda d: (
                d.setdefault("users", {}),
                d.setdefault("sessions", {}),
                d.setdefault("breach_events", {}),
            )
        )

    def _user_lock(self, username: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(username, threading.Lock())

    @property
    def checker(self) -> CheckerClient:
        return self._checker

    # -- registration ------------------------------------------------------

    def register(self, form: RegistrationForm, position: int) -> ProvisioningBundle:
        if not _USERNAME_RE.match(form.username):
            raise ValidationError("username must be 1-64 characters of [A-Za-z0-9._@+-]")
        if not 1 <= position <= self.policy.slots:
            raise ValidationError(f"position must be within 1..{self.policy.slots}")
        if not form.firstname.strip() or not form.lastname.strip():
            raise ValidationError("firstname and lastname are required")
        if not _PHONE_RE.match(form.phone):
            raise ValidationError("phone must be digits with optional leading +")
        self._password_policy.check(form.password)

        with self._user_lock(form.username):
            if self._store.read(lambda d: form.username in d["users"]):
                raise DuplicateUserError(f"username {form.username!r} is taken")

            schedule = list(self.policy.length_schedule) if self.policy.length_schedule else None
            bundle = generate_bundle(
                form.username, n=self.policy.slots, length_schedule=schedule, rng=self._rng
            )
            # The position goes to the checker first and is never persisted
            # here; if the checker is down, registration fails atomically.
            self._checker.set_index(form.username, position)

            record = {
                "password_hash": hash_password(form.password),
                "firstname": form.firstname,
                "lastname": form.lastname,
                "phone": form.phone,
                "status": {"state": "active"},
                "failed_password_count": 0,
                "otp_failure_count": 0,
                "bundle": {"slots": [{"id": s.id, "secret": base32_encode(s.raw)} for s in bundle.slots]},
                "created_at": utc_now_iso(),
            }
            try:
                self._store.update(lambda d: d["users"].__setitem__(form.username, record))
            except Exception:
                self._checker.delete_index(form.username)
                raise

        _audit("register", form.username)
        return build_provisioning_bundle(
            bundle, issuer=self.policy.issuer, params=self.policy.totp_params
        )

    # -- login step 1: password -------------------------------------------

    def login_password(self, username: str, password: str) -> LoginSession:
        with self._user_lock(username):
            user = self._store.read(lambda d: d["users"].get(username))
            if user is None:
                # Burn comparable work so unknown users are not cheap to probe.
                verify_password(password, self._timing_equalizer)
                _audit("login_password", username, outcome="failed")
                raise AuthenticationError("invalid username or password")
            if user["status"]["state"] == "locked":
                _audit("login_password", username, outcome="locked_refused")
                raise AccountLockedError(
                    "account is locked", breach=user["status"].get("reason") == "breach"
                )

            if not verify_password(password, user["password_hash"]):
                failures = user["failed_password_count"] + 1

                def record_failure(d: dict) -> None:
                    u = d["users"][username]
                    u["failed_password_count"] = failures
                    if failures >= self.policy.max_password_failures:
                        u["status"] = {
                            "state": "locked",
                            "reason": "password_failures",
                            "at": utc_now_iso(),
                        }

                self._store.update(record_failure)
                if failures >= self.policy.max_password_failures:
                    _audit("account_locked", username, reason="password_failures")
                _audit("login_password", username, outcome="failed")
                raise AuthenticationError("invalid username or password")

            session = LoginSession(
                session_id=secrets.token_urlsafe(32),
                username=username,
                state="awaiting_otp",
                issued_at=self._clock(),
                expires_at=self._clock() + self.policy.session_ttl_seconds,
            )

            def commit_success(d: dict) -> None:
                u = d["users"][username]
                u["failed_password_count"] = 0
                d["sessions"][session.session_id] = {
                    "username": username,
                    "state": session.state,
                    "issued_at": session.issued_at,
                    "expires_at": session.expires_at,
                }

            self._store.update(commit_success)
            bundle = self._load_bundle(username, user)

        _audit("login_password", username, outcome="ok")
        self._deliver_codes(username, user["phone"], bundle)
        return session

    def _load_bundle(self, username: str, user: dict) -> SweetBundle:
        slots = tuple(
            SweetSecret(raw=base32_decode(s["secret"]), id=s["id"])
            for s in user["bundle"]["slots"]
        )
        return SweetBundle(username=username, slots=slots)

    def _deliver_codes(self, username: str, phone: str, bundle: SweetBundle) -> None:
        if self._sms is None:
            return
        codes = codes_for_delivery(bundle, int(self._clock()), self.policy.totp_params)
        message = SmsMessage(to=phone, body=format_codes_body(codes))
        try:
            self._sms.send(message)
        except Exception:
            # The authenticator app is the primary channel; a dead SMS
            # gateway must not block login.
            _audit("sms_failed", username)
            return
        _audit("sms_sent", username)

    # -- login step 2: OTP -------------------------------------------------

    def login_otp(self, session_id: str, candidate: str) -> str:
        params = self.policy.totp_params
        if not is_well_formed_code(candidate, params):
            raise ValidationError(f"code must be {params.digits} decimal digits")

        session = self._consume_session(session_id)
        username = session["username"]

        with self._user_lock(username):
            user = self._store.read(lambda d: d["users"].get(username))
            if user is None:
                raise SessionError("session refers to a deleted account")
            if user["status"]["state"] == "locked":
                _audit("login_otp", username, outcome="locked_refused")
                raise AccountLockedError(
                    "account is locked", breach=user["status"].get("reason") == "breach"
                )

            bundle = self._load_bundle(username, user)
            now = int(self._clock())
            matched = matching_slots(bundle, candidate, now, params)

            if not matched:
                return self._handle_no_match(username, user)

            # Ask the checker about every matched slot, lowest first; any
            # confirmation means the genuine slot matched (genuine wins
            # over a simultaneous decoy collision).
            try:
                genuine = any(self._checker.check(username, slot) for slot in matched)
            except UnknownUserError as exc:
                raise IntegrityError(
                    f"checker has no position for {username!r}; stores out of sync"
                ) from exc

            if genuine:
                def reset(d: dict) -> None:
                    u = d["users"][username]
                    u["failed_password_count"] = 0
                    u["otp_failure_count"] = 0

                self._store.update(reset)
                _audit("login_otp", username, outcome="genuine")
                return secrets.token_urlsafe(32)

            return self._handle_decoy(username, candidate, matched[0])

    def _consume_session(self, session_id: str) -> dict:
        def pop(d: dict) -> dict | None:
            return d["sessions"].pop(session_id, None)

        session = self._store.update(pop)
        if session is None:
            raise SessionError("unknown or already used session")
        if self._clock() > session["expires_at"]:
            raise SessionError("session expired")
        return session

    def _handle_no_match(self, username: str, user: dict) -> NoReturn:
        failures = user["otp_failure_count"] + 1
        locked = failures >= self.policy.max_otp_failures

        def record(d: dict) -> None:
            u = d["users"][username]
            u["otp_failure_count"] = failures
            if locked:
                u["status"] = {"state": "locked", "reason": "otp_failures", "at": utc_now_iso()}

        self._store.update(record)
        _audit("login_otp", username, outcome="no_match")
        if locked:
            _audit("account_locked", username, reason="otp_failures")
        raise OtpRejectedError(
            "code did not match",
            attempts_remaining=max(0, self.policy.max_otp_failures - failures),
        )

    def _handle_decoy(self, username: str, candidate: str, slot: int) -> NoReturn:
        event = BreachEvent(
            username=username,
            submitted_code=candidate,
            matched_slot=slot,
            at=utc_now_iso(),
        )

        def record(d: dict) -> None:
            u = d["users"][username]
            u["status"] = {"state": "locked", "reason": "breach", "at": event.at}
            d["breach_events"].setdefault(username, []).append(
                {"submitted_code": event.submitted_code, "matched_slot": event.matched_slot, "at": event.at}
            )

        self._store.update(record)
        _audit("login_otp", username, outcome="decoy")
        _audit("breach_detected", username, matched_slot=slot)
        raise AccountLockedError(
            "a breach attempt was detected; the account has been locked", breach=True
        )

    # -- administration ------------------------------------------------------

    def unlock(self, admin_credential: str, username: str) -> None:
        if self._admin_token is None or not hmac.compare_digest(
            admin_credential.encode("utf-8"), self._admin_token.encode("utf-8")
        ):
            raise AuthorizationError("invalid admin credential")

        with self._user_lock(username):
            if not self._store.read(lambda d: username in d["users"]):
                raise UnknownUserError(f"no account named {username!r}")

            def reset(d: dict) -> None:
                u = d["users"][username]
                u["status"] = {"state": "active"}
                u["failed_password_count"] = 0
                u["otp_failure_count"] = 0

            self._store.update(reset)
        _audit("unlock", username)

    # -- introspection -------------------------------------------------------

    def status(self, username: str) -> dict:
        user = self._store.read(lambda d: d["users"].get(username))
        if user is None:
            raise UnknownUserError(f"no account named {username!r}")
        return dict(user["status"])

    def breach_events(self, username: str) -> list[BreachEvent]:
        rows = self._store.read(lambda d: list(d["breach_events"].get(username, [])))
        return [BreachEvent(username=username, **row) for row in rows]

    def user_bundle(self, username: str) -> SweetBundle:
        user = self._store.read(lambda d: d["users"].get(username))
        if user is None:
            raise UnknownUserError(f"no account named {username!r}")
        return self._load_bundle(username, user)

    def session_count(self) -> int:
        return self._store.read(lambda d: len(d["sessions"]))
