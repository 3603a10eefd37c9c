"""One-time-password primitives: HOTP (RFC 4226), TOTP (RFC 6238), Base32.

Byte-compatible with Google Authenticator and friends: HMAC-SHA1,
6 digits, 30-second steps by default. All functions here are pure and
safe for unrestricted concurrent use.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import struct
from dataclasses import dataclass

from .errors import Base32Error, ValidationError

__all__ = [
    "SweetSecret",
    "TotpParams",
    "base32_encode",
    "base32_decode",
    "hotp",
    "totp",
    "verify_code",
    "is_well_formed_code",
]

# RFC 4648 Base32 alphabet, order significant.
_B32_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567"
_B32_INDEX = {c: i for i, c in enumerate(_B32_ALPHABET)}

_HASHES = {
    "SHA1": hashlib.sha1,
    "SHA256": hashlib.sha256,
    "SHA512": hashlib.sha512,
}

MIN_SECRET_BYTES = 10


@dataclass(frozen=True)
class SweetSecret:
    """One OTP secret occupying one slot of a user's bundle.

    ``id`` is the 1-based slot ordinal; ``raw`` is the key material fed
    to HMAC (at least 10 bytes, per the RFC 4226 shared-secret minimum).
    """

    raw: bytes
    id: int = 1

    def __post_init__(self) -> None:
        if len(self.raw) < MIN_SECRET_BYTES:
            raise ValidationError(
                f"secret must be at least {MIN_SECRET_BYTES} bytes, got {len(self.raw)}"
            )
        if self.id < 1:
            raise ValidationError("slot ordinal is 1-based")

    @property
    def base32(self) -> str:
        """Unpadded Base32 form, as carried in otpauth URIs."""
        return base32_encode(self.raw)


@dataclass(frozen=True)
class TotpParams:
    """TOTP/HOTP parameters.

    Defaults (SHA1 / 6 digits / 30 s / t0=0 / skew ±1 step) are the ones
    mainstream authenticator apps honor without configuration.
    """

    step: int = 30
    t0: int = 0
    digits: int = 6
    algorithm: str = "SHA1"
    skew: int = 1

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValidationError("step must be positive")
        if not 6 <= self.digits <= 8:
            raise ValidationError("digits must be between 6 and 8")
        if self.skew < 0:
            raise ValidationError("skew must be >= 0")
        if self.algorithm not in _HASHES:
            raise ValidationError(f"unsupported algorithm {self.algorithm!r}")

    @property
    def hash_factory(self):
        return _HASHES[self.algorithm]


def base32_encode(raw: bytes) -> str:
    """Encode bytes as unpadded upper-case RFC 4648 Base32."""
    return base64.b32encode(raw).decode("ascii").rstrip("=")


def base32_decode(text: str) -> bytes:
    """Decode RFC 4648 Base32, case-insensitive, padded or unpadded.

    Raises Base32Error on any character outside the alphabet.
    """
    cleaned = text.strip().upper().rstrip("=")
    for i, ch in enumerate(cleaned):
        if ch not in _B32_INDEX:
            raise Base32Error(f"invalid Base32 character {ch!r} at offset {i}")
    padded = cleaned + "=" * (-len(cleaned) % 8)
    try:
        return base64.b32decode(padded)
    except Exception as exc:  # pragma: no cover - alphabet already checked
        raise Base32Error(str(exc)) from exc


def _key_bytes(secret: SweetSecret | bytes) -> bytes:
    return secret.raw if isinstance(secret, SweetSecret) else secret


def hotp(secret: SweetSecret | bytes, counter: int, params: TotpParams = TotpParams()) -> str:
    """RFC 4226 HOTP: dynamic-truncated HMAC of the big-endian counter.

    Returns a zero-padded decimal string of ``params.digits`` digits.
    """
    if counter < 0 or counter > 0xFFFFFFFFFFFFFFFF:
        raise ValidationError("counter must fit in an unsigned 64-bit integer")
    digest = hmac.new(_key_bytes(secret), struct.pack(">Q", counter), params.hash_factory).digest()
    offset = digest[-1] & 0x0F
    value = (
        (digest[offset] & 0x7F) << 24
        | digest[offset + 1] << 16
        | digest[offset + 2] << 8
        | digest[offset + 3]
    )
    return str(value % 10**params.digits).zfill(params.digits)


def _counter_at(unix_time: int, params: TotpParams) -> int:
    return (int(unix_time) - params.t0) // params.step


def totp(secret: SweetSecret | bytes, unix_time: int, params: TotpParams = TotpParams()) -> str:
    """RFC 6238 TOTP: HOTP over the time-step counter at ``unix_time``."""
    if unix_time < params.t0:
        raise ValidationError("time precedes the epoch offset t0")
    return hotp(secret, _counter_at(unix_time, params), params)


def is_well_formed_code(candidate: str, params: TotpParams = TotpParams()) -> bool:
    """True iff ``candidate`` is exactly ``params.digits`` ASCII digits."""
    return (
        isinstance(candidate, str)
        and len(candidate) == params.digits
        and all("0" <= c <= "9" for c in candidate)
    )


def verify_code(
    secret: SweetSecret | bytes,
    candidate: str,
    unix_time: int,
    params: TotpParams = TotpParams(),
) -> bool:
    """Check ``candidate`` against the ±skew window around ``unix_time``.

    Comparison is constant-time with respect to candidate content: every
    window step is compared with hmac.compare_digest and the results are
    OR-folded, never short-circuited.
    """
    if not is_well_formed_code(candidate, params):
        raise ValidationError(f"candidate must be {params.digits} decimal digits")
    matched = False
    for k in range(-params.skew, params.skew + 1):
        t = unix_time + k * params.step
        if t < params.t0:
            continue
        matched |= hmac.compare_digest(candidate, totp(secret, t, params))
    return matched
