"""HTTP facade: registration, two-step login, admin unlock, health.

Error responses share one schema ({code, message, ...}); wrong-password
and unknown-user are byte-identical so the API cannot be used to
enumerate usernames. Login endpoints are rate limited per client IP.
"""

from __future__ import annotations

import base64
import collections
import threading
import time
from typing import Callable

from fastapi import FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import errors
from .accounts import AccountPolicy, AccountService, RegistrationForm
from .config import AppConfig
from .honeychecker import Honeychecker, HttpCheckerClient, LoggingAlarmSink
from .passwords import PasswordPolicy
from .qr import qr_to_png_bytes, qr_to_svg
from .sms import ConsoleSmsGateway, MockSmsGateway
from .storage import JsonFileStore

__all__ = ["create_app", "RateLimiter"]


class RateLimiter:
    """Sliding one-second window per key; request N+1 within the window
    is rejected when N = limit."""

    def __init__(self, per_second: int, clock: Callable[[], float] = time.monotonic) -> None:
        self._limit = per_second
        self._clock = clock
        self._hits: dict[str, collections.deque[float]] = {}
        self._lock = threading.Lock()

    def allow(self, key: str) -> bool:
        now = self._clock()
        with self._lock:
            window = self._hits.setdefault(key, collections.deque())
            while window and now - window[0] >= 1.0:
                window.popleft()
            if len(window) >= self._limit:
                return False
            window.append(now)
            return True


class RegisterRequest(BaseModel):
    username: str
    password: str
    firstname: str
    lastname: str
    phone: str
    position: int


class LoginRequest(BaseModel):
    username: str
    password: str


class OtpRequest(BaseModel):
    session_id: str
    code: str = Field(pattern=r"^[0-9]+$")


class UnlockRequest(BaseModel):
    username: str


def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message, **extra})


def _build_service(config: AppConfig, clock: Callable[[], float]) -> tuple[AccountService, object]:
    store = JsonFileStore(config.accounts_store)
    if config.checker.mode == "inprocess":
        checker = Honeychecker(
            JsonFileStore(config.checker.store),
            max_slots=config.auth.slots,
            alarm_sink=LoggingAlarmSink(),
        )
    else:
        checker = HttpCheckerClient(config.checker.url, config.checker.shared_secret)

    if config.sms.gateway == "mock":
        gateway = MockSmsGateway(outbox_path=config.sms.outbox)
    elif config.sms.gateway == "console":
        gateway = ConsoleSmsGateway()
    else:
        gateway = None

    policy = AccountPolicy(
        slots=config.auth.slots,
        issuer=config.auth.issuer,
        session_ttl_seconds=config.auth.session_ttl_seconds,
        max_password_failures=config.auth.max_password_failures,
        max_otp_failures=config.auth.max_otp_failures,
        totp_params=config.totp,
    )
    service = AccountService(
        store,
        checker,
        policy=policy,
        password_policy=PasswordPolicy(min_length=config.auth.password_min_length),
        sms_gateway=gateway,
        admin_token=config.server.admin_token,
        clock=clock,
    )
    return service, gateway


def create_app(
    config: AppConfig | None = None,
    *,
    service: AccountService | None = None,
    clock: Callable[[], float] = time.time,
) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="honeyauth", version="0.1.0", docs_url=None, redoc_url=None)

    if service is None:
        service, gateway = _build_service(config, clock)
        app.state.sms_gateway = gateway
    app.state.service = service
    app.state.config = config
    limiter = RateLimiter(config.server.rate_limit_per_second)
    app.state.rate_limiter = limiter

    # -- error mapping -------------------------------------------------------

    @app.exception_handler(errors.AuthenticationError)
    async def _auth_error(request: Request, exc):  # byte-identical for all causes
        return _error(401, "invalid_credentials", "invalid username or password")

    @app.exception_handler(errors.AccountLockedError)
    async def _locked(request: Request, exc):
        return _error(423, "account_locked", str(exc), breach=exc.breach)

    @app.exception_handler(errors.OtpRejectedError)
    async def _otp_rejected(request: Request, exc):
        return _error(401, "otp_rejected", str(exc), attempts_remaining=exc.attempts_remaining)

    @app.exception_handler(errors.SessionError)
    async def _session_error(request: Request, exc):
        return _error(401, "invalid_session", str(exc))

    @app.exception_handler(errors.DuplicateUserError)
    async def _duplicate(request: Request, exc):
        return _error(409, "username_taken", str(exc))

    @app.exception_handler(errors.AuthorizationError)
    async def _forbidden(request: Request, exc):
        return _error(403, "forbidden", str(exc))

    @app.exception_handler(errors.UnknownUserError)
    async def _unknown_user(request: Request, exc):
        return _error(404, "unknown_user", str(exc))

    @app.exception_handler(errors.HoneycheckerUnavailableError)
    async def _checker_down(request: Request, exc):
        return _error(503, "checker_unavailable", "position checker is unreachable")

    @app.exception_handler(errors.IntegrityError)
    async def _integrity(request: Request, exc):
        return _error(503, "integrity_error", str(exc))

    @app.exception_handler(errors.ValidationError)
    async def _validation(request: Request, exc):
        return _error(422, "validation_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _request_validation(request: Request, exc):
        return _error(422, "validation_error", "; ".join(e["msg"] for e in exc.errors()))

    # -- rate limiting -------------------------------------------------------

    def _client_key(request: Request) -> str:
        return request.client.host if request.client else "unknown"

    def _rate_limited(request: Request) -> JSONResponse | None:
        if not limiter.allow(_client_key(request)):
            return _error(429, "rate_limited", "too many requests; slow down")
        return None

    # -- endpoints -----------------------------------------------------------

    @app.get("/health")
    def health():
        checker_state = "inprocess"
        checker = service.checker
        if isinstance(checker, HttpCheckerClient):
            checker_state = "ok" if checker.health() else "unreachable"
        return {
            "status": "ok",
            "slots": service.policy.slots,
            "digits": service.policy.totp_params.digits,
            "period": service.policy.totp_params.step,
            "checker": checker_state,
        }

    @app.post("/register", status_code=201)
    def register(body: RegisterRequest):
        form = RegistrationForm(
            username=body.username,
            password=body.password,
            firstname=body.firstname,
            lastname=body.lastname,
            phone=body.phone,
        )
        provisioning = service.register(form, position=body.position)
        entries = [
            {
                "slot": entry.slot,
                "label": entry.label,
                "uri": entry.uri,
                "qr_png_base64": base64.b64encode(qr_to_png_bytes(entry.qr)).decode("ascii"),
                "qr_svg": qr_to_svg(entry.qr),
            }
            for entry in provisioning.entries
        ]
        return {"username": body.username, "entries": entries}

    @app.post("/login")
    def login(body: LoginRequest, request: Request):
        limited = _rate_limited(request)
        if limited is not None:
            return limited
        session = service.login_password(body.username, body.password)
        return {"session_id": session.session_id, "expires_at": session.expires_at}

    @app.post("/login/otp")
    def login_otp(body: OtpRequest, request: Request):
        limited = _rate_limited(request)
        if limited is not None:
            return limited
        token = service.login_otp(body.session_id, body.code)
        return {"token": token, "token_type": "bearer"}

    @app.post("/admin/unlock")
    def unlock(body: UnlockRequest, x_admin_token: str = Header(default="")):
        service.unlock(x_admin_token, body.username)
        return {"username": body.username, "status": "active"}

    if config.webui_dist:
        from pathlib import Path

        dist = Path(config.webui_dist)
        if dist.is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/ui", StaticFiles(directory=dist, html=True), name="webui")

    return app
