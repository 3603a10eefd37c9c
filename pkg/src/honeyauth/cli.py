"""Operator command line: run services, enroll users, inspect codes.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration
error. Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import base64
import json
import sys
import time
from pathlib import Path

import httpx

from .config import load_config
from .errors import ConfigError, OtpauthParseError, ValidationError
from .otp import hotp, totp
from .provisioning import parse_otpauth_uri
from .qr import qr_to_png_bytes, qr_to_svg, render_qr

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="honeyauth",
        description="Two-factor authentication with honeytoken OTP slots.",
    )
    parser.add_argument("--verbose", action="store_true", help="chatty diagnostics on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP login service")
    serve.add_argument("--config", help="TOML config file")
    serve.add_argument("--host", help="override bind host")
    serve.add_argument("--port", type=int, help="override bind port")

    checker = sub.add_parser("honeychecker", help="run the position-checker process")
    checker.add_argument("--config", help="TOML config file")
    checker.add_argument("--host", help="override bind host")
    checker.add_argument("--port", type=int, help="override bind port")

    register = sub.add_parser("register", help="register a user against a running server")
    register.add_argument("--server", default="http://127.0.0.1:8000", help="server base URL")
    register.add_argument("--username", required=True)
    register.add_argument("--password", required=True)
    register.add_argument("--firstname", required=True)
    register.add_argument("--lastname", required=True)
    register.add_argument("--phone", required=True)
    register.add_argument("--position", type=int, required=True, help="genuine slot, 1-based")
    register.add_argument("--out", help="directory to write the QR images into")
    register.add_argument("--force", action="store_true", help="overwrite existing files")

    qr = sub.add_parser("qr", help="write QR images for otpauth URIs")
    qr.add_argument("uris", nargs="+", metavar="URI")
    qr.add_argument("--out", required=True, help="output directory")
    qr.add_argument("--force", action="store_true", help="overwrite existing files")

    auth = sub.add_parser("authenticator", help="show live codes for otpauth URIs")
    auth.add_argument("uris", nargs="+", metavar="URI")
    auth.add_argument("--at", type=int, help="frozen unix time instead of the wall clock")
    auth.add_argument("--watch", action="store_true", help="refresh every second until interrupted")

    unlock = sub.add_parser("unlock", help="unlock an account via the admin API")
    unlock.add_argument("--server", default="http://127.0.0.1:8000", help="server base URL")
    unlock.add_argument("--admin-token", required=True)
    unlock.add_argument("--username", required=True)

    return parser


def _fail(message: str, code: int) -> int:
    print(f"honeyauth: {message}", file=sys.stderr)
    return code


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    try:
        config = load_config(args.config)
        app = create_app(config)
    except ConfigError as exc:
        return _fail(f"bad configuration: {exc}", EXIT_USAGE)
    host = args.host or config.server.host
    port = args.port if args.port is not None else config.server.port
    try:
        uvicorn.run(app, host=host, port=port, log_level="info" if args.verbose else "warning")
    except OSError as exc:
        return _fail(f"cannot bind {host}:{port}: {exc}", EXIT_RUNTIME)
    except SystemExit as exc:  # uvicorn startup failure (e.g. port in use)
        if exc.code:
            return _fail(f"server failed to start on {host}:{port}", EXIT_RUNTIME)
    return EXIT_OK


def cmd_honeychecker(args) -> int:
    from .honeychecker import CheckerServer, Honeychecker, LoggingAlarmSink
    from .storage import JsonFileStore

    try:
        config = load_config(args.config)
        checker = Honeychecker(
            JsonFileStore(config.checker.store),
            max_slots=config.auth.slots,
            alarm_sink=LoggingAlarmSink(),
        )
        server = CheckerServer(
            checker,
            host=args.host or config.checker.host,
            port=args.port if args.port is not None else config.checker.port,
            shared_secret=config.checker.shared_secret,
        )
    except (ConfigError, ValidationError) as exc:
        return _fail(f"bad configuration: {exc}", EXIT_USAGE)
    except OSError as exc:
        return _fail(f"cannot bind checker port: {exc}", EXIT_RUNTIME)
    host, port = server.address
    print(f"honeychecker listening on http://{host}:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return EXIT_OK


def _write_file(path: Path, data: bytes, force: bool) -> str | None:
    if path.exists() and not force:
        return f"{path} exists; use --force to overwrite"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    return None


def cmd_register(args) -> int:
    payload = {
        "username": args.username,
        "password": args.password,
        "firstname": args.firstname,
        "lastname": args.lastname,
        "phone": args.phone,
        "position": args.position,
    }
    try:
        response = httpx.post(f"{args.server}/register", json=payload, timeout=10.0)
    except httpx.HTTPError as exc:
        return _fail(f"cannot reach server: {exc}", EXIT_RUNTIME)
    if response.status_code != 201:
        detail = response.json().get("message", response.text)
        return _fail(f"registration refused ({response.status_code}): {detail}", EXIT_RUNTIME)

    body = response.json()
    for entry in body["entries"]:
        print(entry["uri"])
    if args.out:
        out = Path(args.out)
        for entry in body["entries"]:
            png = base64.b64decode(entry["qr_png_base64"])
            for name, data in (
                (f"slot-{entry['slot']}.png", png),
                (f"slot-{entry['slot']}.svg", entry["qr_svg"].encode("utf-8")),
            ):
                problem = _write_file(out / name, data, args.force)
                if problem:
                    return _fail(problem, EXIT_RUNTIME)
        print(f"wrote {2 * len(body['entries'])} files to {out}", file=sys.stderr)
    print(
        "scan all QR images; remember that only your chosen position is genuine",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_qr(args) -> int:
    out = Path(args.out)
    for index, uri in enumerate(args.uris, start=1):
        try:
            parse_otpauth_uri(uri)
            payload = render_qr(uri)
        except (OtpauthParseError, ValidationError) as exc:
            return _fail(f"argument {index}: invalid URI: {exc}", EXIT_USAGE)
        for name, data in (
            (f"qr-{index:02d}.png", qr_to_png_bytes(payload)),
            (f"qr-{index:02d}.svg", qr_to_svg(payload).encode("utf-8")),
        ):
            problem = _write_file(out / name, data, args.force)
            if problem:
                return _fail(problem, EXIT_RUNTIME)
        print(out / f"qr-{index:02d}.png")
        print(out / f"qr-{index:02d}.svg")
    return EXIT_OK


def _code_row(parsed, now: int) -> tuple[str, str, str]:
    if parsed.type == "hotp":
        code = hotp(parsed.secret, parsed.counter or 0, parsed.params)
        remaining = "-"
    else:
        code = totp(parsed.secret, now, parsed.params)
        remaining = str(parsed.params.step - (now - parsed.params.t0) % parsed.params.step)
    slot = str(parsed.slot) if parsed.slot is not None else "-"
    return slot, code, remaining


def cmd_authenticator(args) -> int:
    parsed_uris = []
    for index, uri in enumerate(args.uris, start=1):
        try:
            parsed_uris.append(parse_otpauth_uri(uri))
        except (OtpauthParseError, ValidationError) as exc:
            return _fail(f"argument {index}: invalid URI: {exc}", EXIT_USAGE)

    def print_table() -> None:
        now = args.at if args.at is not None else int(time.time())
        print("slot  code      expires_in  account")
        for parsed in parsed_uris:
            slot, code, remaining = _code_row(parsed, now)
            label = f"{parsed.issuer}:{parsed.account}" if parsed.issuer else parsed.account
            print(f"{slot:<5} {code:<9} {remaining:<11} {label}")

    if not args.watch:
        print_table()
        return EXIT_OK
    try:
        while True:
            print_table()
            time.sleep(1)
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def cmd_unlock(args) -> int:
    try:
        response = httpx.post(
            f"{args.server}/admin/unlock",
            json={"username": args.username},
            headers={"x-admin-token": args.admin_token},
            timeout=10.0,
        )
    except httpx.HTTPError as exc:
        return _fail(f"cannot reach server: {exc}", EXIT_RUNTIME)
    if response.status_code != 200:
        detail = response.json().get("message", response.text)
        return _fail(f"unlock refused ({response.status_code}): {detail}", EXIT_RUNTIME)
    print(f"{args.username}: active")
    return EXIT_OK


_HANDLERS = {
    "serve": cmd_serve,
    "honeychecker": cmd_honeychecker,
    "register": cmd_register,
    "qr": cmd_qr,
    "authenticator": cmd_authenticator,
    "unlock": cmd_unlock,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return _HANDLERS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
