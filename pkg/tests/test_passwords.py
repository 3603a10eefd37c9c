"""Password policy and hash format checks."""

import pytest

from honeyauth.errors import PasswordPolicyError, ValidationError
from honeyauth.passwords import PasswordPolicy, hash_password, verify_password


def test_hash_and_verify_round_trip():
    stored = hash_password("a sufficiently long pass")
    assert stored.startswith("scrypt$")
    assert verify_password("a sufficiently long pass", stored)
    assert not verify_password("a sufficiently long paSS", stored)


def test_hash_is_salted():
    assert hash_password("same password!") != hash_password("same password!")


def test_parameters_embedded_in_string():
    stored = hash_password("a sufficiently long pass")
    scheme, log_n, r, p, salt, digest = stored.split("$")
    assert (scheme, log_n, r, p) == ("scrypt", "14", "8", "1")
    assert salt and digest


def test_pbkdf2_scheme():
    stored = hash_password("a sufficiently long pass", scheme="pbkdf2")
    assert stored.startswith("pbkdf2$")
    assert verify_password("a sufficiently long pass", stored)
    assert not verify_password("wrong password here", stored)


def test_unknown_scheme_rejected():
    with pytest.raises(ValidationError):
        hash_password("whatever password", scheme="md5")


def test_garbage_stored_hash_fails_closed():
    assert not verify_password("anything", "not-a-hash")
    assert not verify_password("anything", "scrypt$bad")


def test_policy_min_length():
    with pytest.raises(PasswordPolicyError):
        PasswordPolicy().check("short")
    PasswordPolicy().check("long enough to pass")


def test_policy_denylist():
    with pytest.raises(PasswordPolicyError):
        PasswordPolicy(min_length=5).check("password")
    with pytest.raises(PasswordPolicyError):
        PasswordPolicy(min_length=5).check("QWERTY")


def test_policy_configurable():
    PasswordPolicy(min_length=4).check("tiny")
