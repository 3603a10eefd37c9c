"""Sweet bundles: N live TOTP secrets per user, exactly one genuine.

The genuine slot position is never stored here; every classification
receives it as a call parameter. All decoy slots are real TOTP streams,
indistinguishable from the genuine one to anybody who does not hold the
position.
"""

from __future__ import annotations

import random
import secrets as _secrets
from dataclasses import dataclass

from .errors import ConfigError, IntegrityError
from .otp import MIN_SECRET_BYTES, SweetSecret, TotpParams, totp, verify_code

__all__ = [
    "SweetBundle",
    "Genuine",
    "Decoy",
    "NoMatch",
    "SubmissionOutcome",
    "DEFAULT_SLOT_COUNT",
    "default_length_schedule",
    "generate_bundle",
    "classify_submission",
    "codes_for_delivery",
    "matching_slots",
]

DEFAULT_SLOT_COUNT = 3


def default_length_schedule(n: int) -> list[int]:
    """Byte lengths 10, 15, 20, ...: pairwise distinct, clean unpadded Base32."""
    return [10 + 5 * i for i in range(n)]


@dataclass(frozen=True)
class SweetBundle:
    """Ordered slots 1..N of per-user OTP secrets, pairwise distinct."""

    username: str
    slots: tuple[SweetSecret, ...]

    def __post_init__(self) -> None:
        if len(self.slots) < 2:
            raise ConfigError("a bundle needs at least 2 slots")
        if [s.id for s in self.slots] != list(range(1, len(self.slots) + 1)):
            raise ConfigError("slot ordinals must be contiguous starting at 1")
        raws = [s.raw for s in self.slots]
        if len(set(raws)) != len(raws):
            raise ConfigError("slot secrets must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.slots)

    def slot(self, ordinal: int) -> SweetSecret:
        """1-based slot lookup."""
        if not 1 <= ordinal <= len(self.slots):
            raise IntegrityError(f"slot ordinal {ordinal} out of range 1..{len(self.slots)}")
        return self.slots[ordinal - 1]


@dataclass(frozen=True)
class Genuine:
    pass


@dataclass(frozen=True)
class Decoy:
    slot: int


@dataclass(frozen=True)
class NoMatch:
    pass


SubmissionOutcome = Genuine | Decoy | NoMatch


def generate_bundle(
    username: str,
    n: int = DEFAULT_SLOT_COUNT,
    length_schedule: list[int] | None = None,
    rng: random.Random | None = None,
) -> SweetBundle:
    """Draw N fresh slot secrets for ``username``.

    Secrets come from the OS CSPRNG unless a seeded ``rng`` is supplied
    (test fixtures only). The default schedule gives every slot a distinct
    length; an explicit schedule may override that, in which case only
    byte-level distinctness is enforced.
    """
    if n < 2:
        raise ConfigError("n must be at least 2")
    schedule = default_length_schedule(n) if length_schedule is None else list(length_schedule)
    if len(schedule) != n:
        raise ConfigError(f"length schedule must have {n} entries, got {len(schedule)}")
    if any(length < MIN_SECRET_BYTES for length in schedule):
        raise ConfigError(f"every slot length must be >= {MIN_SECRET_BYTES} bytes")

    draw = rng.randbytes if rng is not None else _secrets.token_bytes
    seen: set[bytes] = set()
    slots = []
    for ordinal, length in enumerate(schedule, start=1):
        raw = draw(length)
        while raw in seen:
            raw = draw(length)
        seen.add(raw)
        slots.append(SweetSecret(raw=raw, id=ordinal))
    return SweetBundle(username=username, slots=tuple(slots))


def matching_slots(
    bundle: SweetBundle,
    candidate: str,
    unix_time: int,
    params: TotpParams = TotpParams(),
) -> list[int]:
    """Ordinals of every slot whose windowed codes include ``candidate``.

    Always evaluates all slots; never short-circuits.
    """
    return [s.id for s in bundle.slots if verify_code(s, candidate, unix_time, params)]


def classify_submission(
    bundle: SweetBundle,
    sweet_index: int,
    candidate: str,
    unix_time: int,
    params: TotpParams = TotpParams(),
) -> SubmissionOutcome:
    """Decide Genuine / Decoy(slot) / NoMatch for a submitted code.

    Genuine wins over any simultaneous decoy collision; among multiple
    decoy matches the lowest ordinal is reported. The sweet index is a
    parameter only, never read from storage.
    """
    if not 1 <= sweet_index <= len(bundle):
        raise IntegrityError(
            f"sweet index {sweet_index} out of range 1..{len(bundle)}; "
            "checker and account stores may have diverged"
        )
    matched = matching_slots(bundle, candidate, unix_time, params)
    if sweet_index in matched:
        return Genuine()
    for ordinal in matched:
        if ordinal != sweet_index:
            return Decoy(slot=ordinal)
    return NoMatch()


def codes_for_delivery(
    bundle: SweetBundle,
    unix_time: int,
    params: TotpParams = TotpParams(),
) -> list[str]:
    """Current code of every slot, in slot order (position i = ordinal i+1)."""
    return [totp(s, unix_time, params) for s in bundle.slots]
