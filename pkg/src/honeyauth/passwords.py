"""Password policy and salted adaptive hashing.

Hashes are stored as self-describing strings,
``scrypt$<log2 n>$<r>$<p>$<salt b64>$<digest b64>``, so parameters can
be tightened later without invalidating old records. scrypt is the
default because it is memory-hard; a PBKDF2 fallback exists for
constrained deployments.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import secrets
from dataclasses import dataclass, field

from .errors import PasswordPolicyError, ValidationError

__all__ = ["PasswordPolicy", "hash_password", "verify_password"]

# A deliberately small list of catastrophically common passwords; the
# length requirement does the heavy lifting.
_DENYLIST = frozenset(
    {
        "password",
        "password1",
        "password123",
        "passw0rd",
        "123456",
        "12345678",
        "123456789",
        "1234567890",
        "qwerty",
        "qwertyuiop",
        "letmein",
        "iloveyou",
        "admin",
        "administrator",
        "welcome",
        "monkey",
        "dragon",
        "sunshine",
        "princess",
        "football",
    }
)

_SCRYPT_LOG_N = 14
_SCRYPT_R = 8
_SCRYPT_P = 1
_PBKDF2_ITERATIONS = 600_000
_SALT_BYTES = 16
_DIGEST_BYTES = 32


@dataclass(frozen=True)
class PasswordPolicy:
    min_length: int = 10
    denylist: frozenset[str] = field(default_factory=lambda: _DENYLIST)

    def check(self, password: str) -> None:
        if len(password) < self.min_length:
            raise PasswordPolicyError(
                f"password must be at least {self.min_length} characters"
            )
        if password.lower() in self.denylist:
            raise PasswordPolicyError("password is too common")


def _b64(raw: bytes) -> str:
    return base64.b64encode(raw).decode("ascii")


def _unb64(text: str) -> bytes:
    return base64.b64decode(text.encode("ascii"))


def hash_password(password: str, scheme: str = "scrypt") -> str:
    salt = secrets.token_bytes(_SALT_BYTES)
    if scheme == "scrypt":
        digest = hashlib.scrypt(
            password.encode("utf-8"),
            salt=salt,
            n=1 << _SCRYPT_LOG_N,
            r=_SCRYPT_R,
            p=_SCRYPT_P,
            dklen=_DIGEST_BYTES,
        )
        return f"scrypt${_SCRYPT_LOG_N}${_SCRYPT_R}${_SCRYPT_P}${_b64(salt)}${_b64(digest)}"
    if scheme == "pbkdf2":
        digest = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), salt, _PBKDF2_ITERATIONS, dklen=_DIGEST_BYTES
        )
        return f"pbkdf2${_PBKDF2_ITERATIONS}${_b64(salt)}${_b64(digest)}"
    raise ValidationError(f"unknown hash scheme {scheme!r}")


def verify_password(password: str, stored: str) -> bool:
    """Constant-time comparison against a stored hash string."""
    fields = stored.split("$")
    try:
        if fields[0] == "scrypt":
            _, log_n, r, p, salt, digest = fields
            computed = hashlib.scrypt(
                password.encode("utf-8"),
                salt=_unb64(salt),
                n=1 << int(log_n),
                r=int(r),
                p=int(p),
                dklen=len(_unb64(digest)),
            )
        elif fields[0] == "pbkdf2":
            _, iterations, salt, digest = fields
            computed = hashlib.pbkdf2_hmac(
                "sha256",
                password.encode("utf-8"),
                _unb64(salt),
                int(iterations),
                dklen=len(_unb64(digest)),
            )
        else:
            return False
    except (ValueError, IndexError):
        return False
    return hmac.compare_digest(computed, _unb64(digest))
