"""Exception hierarchy shared across the package.

Error types are deliberately coarse at the edges (one AuthenticationError
for both unknown-user and wrong-password, so callers cannot enumerate
usernames) and fine-grained internally.
"""


class HoneyauthError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(HoneyauthError):
    """Invalid or unusable configuration."""


class ValidationError(HoneyauthError):
    """Malformed or out-of-range input supplied by a caller."""


class Base32Error(ValidationError):
    """Input is not valid RFC 4648 Base32."""


class OtpauthParseError(ValidationError):
    """otpauth:// URI could not be parsed.

    ``position`` is the character offset where parsing failed, when known.
    """

    def __init__(self, message: str, position: int | None = None) -> None:
        super().__init__(message)
        self.position = position


class QrCapacityError(ValidationError):
    """Payload exceeds the capacity of the largest QR symbol."""


class PasswordPolicyError(ValidationError):
    """Password rejected by the configured policy."""


class DuplicateUserError(HoneyauthError):
    """Username is already registered."""


class UnknownUserError(HoneyauthError):
    """No record exists for the given username."""


class AuthenticationError(HoneyauthError):
    """Credentials rejected.

    Raised identically for unknown usernames and wrong passwords.
    """


class AccountLockedError(HoneyauthError):
    """Account is locked and refuses authentication operations."""

    def __init__(self, message: str, *, breach: bool = False) -> None:
        super().__init__(message)
        self.breach = breach


class OtpRejectedError(HoneyauthError):
    """Submitted code matched no slot; retry may be permitted."""

    def __init__(self, message: str, attempts_remaining: int) -> None:
        super().__init__(message)
        self.attempts_remaining = attempts_remaining


class SessionError(HoneyauthError):
    """Login session is unknown, expired, or already consumed."""


class AuthorizationError(HoneyauthError):
    """Caller is not authorized for an administrative operation."""


class IntegrityError(HoneyauthError):
    """Stores have drifted out of sync (e.g. slot position out of range)."""


class HoneycheckerUnavailableError(IntegrityError):
    """The position-checker service cannot be reached."""
