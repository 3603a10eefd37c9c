"""Two-factor authentication with honeytoken OTP slots.

Each user holds N live TOTP secrets of which exactly one, at a position
only the user and a separated checker know, is genuine. Submitting a
decoy slot's valid code locks the account and raises a breach alarm.
"""

from .accounts import AccountPolicy, AccountService, BreachEvent, LoginSession, RegistrationForm
from .errors import HoneyauthError
from .honeychecker import AlarmSignal, CheckerServer, Honeychecker, HttpCheckerClient
from .honeytokens import (
    Decoy,
    Genuine,
    NoMatch,
    SweetBundle,
    classify_submission,
    codes_for_delivery,
    generate_bundle,
)
from .otp import SweetSecret, TotpParams, base32_decode, base32_encode, hotp, totp, verify_code
from .provisioning import (
    ParsedOtpauth,
    ProvisioningBundle,
    build_otpauth_uri,
    build_provisioning_bundle,
    parse_otpauth_uri,
)
from .qr import QrPayload, qr_to_png_bytes, qr_to_svg, render_qr

__version__ = "0.1.0"

__all__ = [
    "AccountPolicy",
    "AccountService",
    "AlarmSignal",
    "BreachEvent",
    "CheckerServer",
    "Decoy",
    "Genuine",
    "Honeychecker",
    "HoneyauthError",
    "HttpCheckerClient",
    "LoginSession",
    "NoMatch",
    "ParsedOtpauth",
    "ProvisioningBundle",
    "QrPayload",
    "RegistrationForm",
    "SweetBundle",
    "SweetSecret",
    "TotpParams",
    "base32_decode",
    "base32_encode",
    "build_otpauth_uri",
    "build_provisioning_bundle",
    "classify_submission",
    "codes_for_delivery",
    "generate_bundle",
    "hotp",
    "parse_otpauth_uri",
    "qr_to_png_bytes",
    "qr_to_svg",
    "render_qr",
    "totp",
    "verify_code",
]
