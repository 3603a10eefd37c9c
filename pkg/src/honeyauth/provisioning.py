"""otpauth:// URIs and QR payloads for enrolling all N slots in an app.

Every slot gets its own URI labeled with its ordinal ("issuer:account
(slot n)") so the positions are visible inside the authenticator; the
labels are identical in form, so nothing marks which slot is genuine,
and no URI ever carries the genuine position.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from urllib.parse import parse_qs, quote, unquote, urlsplit

from .errors import OtpauthParseError, ValidationError
from .honeytokens import SweetBundle
from .otp import SweetSecret, TotpParams, base32_decode, base32_encode
from .qr import QrPayload, render_qr

__all__ = [
    "ParsedOtpauth",
    "ProvisioningEntry",
    "ProvisioningBundle",
    "build_otpauth_uri",
    "parse_otpauth_uri",
    "build_provisioning_bundle",
]

# Sub-delimiters that stay literal in labels so URIs look the way
# authenticator apps expect: "Issuer:account (slot 1)".
_LABEL_SAFE = "():"
_SLOT_SUFFIX = re.compile(r"^(?P<account>.*) \(slot (?P<slot>[1-9][0-9]*)\)$", re.DOTALL)


def _slot_label(issuer: str, account: str, slot: int) -> str:
    return f"{issuer}:{account} (slot {slot})"


def build_otpauth_uri(
    issuer: str,
    account: str,
    secret: SweetSecret | bytes,
    params: TotpParams = TotpParams(),
    slot: int = 1,
) -> str:
    """TOTP provisioning URI, bit-exact grammar, RFC 3986 percent-encoded."""
    if not issuer or not account:
        raise ValidationError("issuer and account must be nonempty")
    if slot < 1:
        raise ValidationError("slot ordinal is 1-based")
    raw = secret.raw if isinstance(secret, SweetSecret) else secret
    label = quote(_slot_label(issuer, account, slot), safe=_LABEL_SAFE)
    return (
        f"otpauth://totp/{label}"
        f"?secret={base32_encode(raw)}"
        f"&issuer={quote(issuer, safe='')}"
        f"&algorithm={params.algorithm}"
        f"&digits={params.digits}"
        f"&period={params.step}"
    )


@dataclass(frozen=True)
class ParsedOtpauth:
    """Decoded provisioning URI; ``counter`` is set for hotp URIs only."""

    type: str  # "totp" | "hotp"
    issuer: str
    account: str
    secret: bytes
    params: TotpParams
    slot: int | None = None
    counter: int | None = None


def parse_otpauth_uri(uri: str) -> ParsedOtpauth:
    """Inverse of build_otpauth_uri on its image; also reads hotp URIs."""
    if not uri.startswith("otpauth://"):
        raise OtpauthParseError("URI must use the otpauth scheme", position=0)
    parts = urlsplit(uri)
    otp_type = parts.netloc.lower()
    if otp_type not in ("totp", "hotp"):
        raise OtpauthParseError(
            f"unknown otpauth type {parts.netloc!r}", position=len("otpauth://")
        )

    label = unquote(parts.path.lstrip("/"))
    if not label:
        raise OtpauthParseError("missing label", position=uri.find(parts.netloc) + len(parts.netloc))
    issuer_from_label, _, account = label.partition(":")
    if not account:
        issuer_from_label, account = "", label

    slot = None
    suffix = _SLOT_SUFFIX.match(account)
    if suffix:
        slot = int(suffix.group("slot"))
        account = suffix.group("account")

    query = parse_qs(parts.query, keep_blank_values=True)

    def single(name: str) -> str | None:
        values = query.get(name)
        if values is None:
            return None
        if len(values) != 1:
            raise OtpauthParseError(f"duplicate parameter {name!r}", position=uri.find(name))
        return values[0]

    secret_text = single("secret")
    if not secret_text:
        raise OtpauthParseError("missing secret parameter", position=len(uri))
    secret = base32_decode(secret_text)

    issuer = single("issuer") or issuer_from_label
    if issuer_from_label and issuer != issuer_from_label:
        raise OtpauthParseError("issuer parameter contradicts label", position=uri.find("issuer="))

    try:
        params = TotpParams(
            step=int(single("period") or 30),
            digits=int(single("digits") or 6),
            algorithm=(single("algorithm") or "SHA1").upper(),
        )
    except (TypeError, ValueError) as exc:
        raise OtpauthParseError(f"malformed parameter: {exc}", position=uri.find("?")) from exc

    counter = None
    if otp_type == "hotp":
        counter_text = single("counter")
        if counter_text is None:
            raise OtpauthParseError("hotp URI requires a counter parameter", position=len(uri))
        counter = int(counter_text)

    return ParsedOtpauth(
        type=otp_type,
        issuer=issuer,
        account=account,
        secret=secret,
        params=params,
        slot=slot,
        counter=counter,
    )


@dataclass(frozen=True)
class ProvisioningEntry:
    slot: int
    label: str
    uri: str
    qr: QrPayload


@dataclass(frozen=True)
class ProvisioningBundle:
    """One QR entry per slot, ordered by slot ordinal."""

    entries: tuple[ProvisioningEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


def build_provisioning_bundle(
    bundle: SweetBundle,
    issuer: str,
    account: str | None = None,
    params: TotpParams = TotpParams(),
) -> ProvisioningBundle:
    """URIs and QR matrices for every slot of a sweet bundle, in order."""
    account = account or bundle.username
    entries = []
    for secret in bundle.slots:
        uri = build_otpauth_uri(issuer, account, secret, params, slot=secret.id)
        entries.append(
            ProvisioningEntry(
                slot=secret.id,
                label=_slot_label(issuer, account, secret.id),
                uri=uri,
                qr=render_qr(uri),
            )
        )
    return ProvisioningBundle(entries=tuple(entries))
