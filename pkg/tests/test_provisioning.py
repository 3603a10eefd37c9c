"""otpauth URI grammar, round trips, and provisioning bundles."""

import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from honeyauth.errors import OtpauthParseError, ValidationError
from honeyauth.honeytokens import generate_bundle
from honeyauth.otp import SweetSecret, TotpParams, base32_encode
from honeyauth.provisioning import (
    build_otpauth_uri,
    build_provisioning_bundle,
    parse_otpauth_uri,
)

from oracles import oracle_parse_otpauth

SECRET = SweetSecret(b"12345678901234567890")


class TestBuildUri:
    def test_default_grammar_exact(self):
        uri = build_otpauth_uri("HoneyAuth", "alice", SECRET, TotpParams(), slot=1)
        assert uri == (
            "otpauth://totp/HoneyAuth:alice%20(slot%201)"
            "?secret=GEZDGNBVGY3TQOJQGEZDGNBVGY3TQOJQ"
            "&issuer=HoneyAuth&algorithm=SHA1&digits=6&period=30"
        )

    def test_slot_in_label_not_in_query(self):
        uri = build_otpauth_uri("Svc", "bob", SECRET, slot=3)
        assert "(slot%203)" in uri
        query = uri.split("?", 1)[1]
        assert "slot" not in query
        assert "index" not in query
        assert "position" not in query

    def test_empty_issuer_or_account_rejected(self):
        with pytest.raises(ValidationError):
            build_otpauth_uri("", "alice", SECRET)
        with pytest.raises(ValidationError):
            build_otpauth_uri("Svc", "", SECRET)

    def test_account_with_space_and_colon_round_trips(self):
        parsed = parse_otpauth_uri(build_otpauth_uri("Svc", "alice smith:work", SECRET, slot=2))
        assert parsed.account == "alice smith:work"
        assert parsed.issuer == "Svc"
        assert parsed.slot == 2

    def test_oracle_agrees_on_built_uri(self):
        uri = build_otpauth_uri("My Service", "alice@example.org", SECRET, slot=2)
        seen = oracle_parse_otpauth(uri)
        assert seen["type"] == "totp"
        assert seen["label_issuer"] == "My Service"
        assert seen["account"] == "alice@example.org"
        assert seen["slot"] == 2
        assert seen["secret"] == SECRET.base32
        assert seen["algorithm"] == "SHA1"
        assert seen["digits"] == "6"
        assert seen["period"] == "30"

    def test_unpadded_uppercase_secret(self):
        uri = build_otpauth_uri("S", "a", SweetSecret(b"0123456789"), slot=1)
        secret_param = re.search(r"secret=([^&]*)", uri).group(1)
        assert "=" not in secret_param
        assert secret_param == secret_param.upper()


class TestParseUri:
    def test_rejects_foreign_scheme(self):
        with pytest.raises(OtpauthParseError) as err:
            parse_otpauth_uri("http://evil")
        assert err.value.position == 0

    def test_rejects_unknown_type(self):
        with pytest.raises(OtpauthParseError):
            parse_otpauth_uri("otpauth://steam/label?secret=GEZDGNBV")

    def test_missing_secret(self):
        with pytest.raises(OtpauthParseError):
            parse_otpauth_uri("otpauth://totp/A:b?issuer=A")

    def test_hotp_with_counter(self):
        parsed = parse_otpauth_uri(
            "otpauth://hotp/Svc:carol?secret=GEZDGNBVGY3TQOJQ&issuer=Svc&counter=7"
        )
        assert parsed.type == "hotp"
        assert parsed.counter == 7
        assert parsed.account == "carol"

    def test_hotp_requires_counter(self):
        with pytest.raises(OtpauthParseError):
            parse_otpauth_uri("otpauth://hotp/Svc:carol?secret=GEZDGNBVGY3TQOJQ")

    def test_label_without_issuer(self):
        parsed = parse_otpauth_uri("otpauth://totp/justme?secret=GEZDGNBVGY3TQOJQ")
        assert parsed.issuer == ""
        assert parsed.account == "justme"

    def test_contradictory_issuer_rejected(self):
        with pytest.raises(OtpauthParseError):
            parse_otpauth_uri("otpauth://totp/A:b?secret=GEZDGNBVGY3TQOJQ&issuer=B")


_ISSUER_ALPHABET = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .-_@",
    min_size=1,
    max_size=24,
).filter(lambda s: s.strip() == s and s)

_ACCOUNT_ALPHABET = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .-_@:+/?#&=",
    min_size=1,
    max_size=32,
).filter(lambda s: s.strip() == s and s and not re.search(r" \(slot [0-9]+\)$", s))


@settings(max_examples=250, deadline=None)
@given(
    issuer=_ISSUER_ALPHABET,
    account=_ACCOUNT_ALPHABET,
    raw=st.binary(min_size=10, max_size=30),
    digits=st.integers(min_value=6, max_value=8),
    step=st.integers(min_value=5, max_value=120),
    algorithm=st.sampled_from(["SHA1", "SHA256", "SHA512"]),
    slot=st.integers(min_value=1, max_value=9),
)
def test_parse_build_identity_property(issuer, account, raw, digits, step, algorithm, slot):
    params = TotpParams(step=step, digits=digits, algorithm=algorithm)
    parsed = parse_otpauth_uri(build_otpauth_uri(issuer, account, raw, params, slot=slot))
    assert parsed.type == "totp"
    assert parsed.issuer == issuer
    assert parsed.account == account
    assert parsed.secret == raw
    assert parsed.params.step == step
    assert parsed.params.digits == digits
    assert parsed.params.algorithm == algorithm
    assert parsed.slot == slot


class TestProvisioningBundle:
    def test_three_entries_in_slot_order(self):
        bundle = generate_bundle("alice", rng=random.Random(5))
        prov = build_provisioning_bundle(bundle, issuer="Svc")
        assert len(prov) == 3
        assert [e.slot for e in prov.entries] == [1, 2, 3]

    def test_each_uri_embeds_its_slot_secret(self):
        bundle = generate_bundle("alice", rng=random.Random(5))
        prov = build_provisioning_bundle(bundle, issuer="Svc")
        for entry, secret in zip(prov.entries, bundle.slots):
            assert f"secret={base32_encode(secret.raw)}" in entry.uri
        secrets = {re.search(r"secret=([^&]*)", e.uri).group(1) for e in prov.entries}
        assert len(secrets) == 3

    def test_labels_identical_in_form(self):
        bundle = generate_bundle("alice", rng=random.Random(5))
        prov = build_provisioning_bundle(bundle, issuer="Svc")
        stripped = {re.sub(r"slot [0-9]+", "slot N", e.label) for e in prov.entries}
        assert stripped == {"Svc:alice (slot N)"}

    def test_uris_round_trip(self):
        bundle = generate_bundle("alice", rng=random.Random(5))
        prov = build_provisioning_bundle(bundle, issuer="Svc")
        for entry, secret in zip(prov.entries, bundle.slots):
            parsed = parse_otpauth_uri(entry.uri)
            assert parsed.secret == secret.raw
            assert parsed.slot == secret.id

    def test_qr_matrices_distinct_and_decode(self):
        import cv2
        import numpy as np

        from honeyauth.qr import qr_to_png_bytes

        bundle = generate_bundle("alice", rng=random.Random(5))
        prov = build_provisioning_bundle(bundle, issuer="Svc")
        matrices = {e.qr.module_matrix for e in prov.entries}
        assert len(matrices) == 3
        png = qr_to_png_bytes(prov.entries[0].qr)
        array = cv2.imdecode(np.frombuffer(png, np.uint8), cv2.IMREAD_GRAYSCALE)
        text, _, _ = cv2.QRCodeDetector().detectAndDecode(array)
        assert text == prov.entries[0].uri
