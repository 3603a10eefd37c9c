"""QR encoder checked against OpenCV's detector as an independent reader."""

import cv2
import numpy as np
import pytest

from honeyauth.errors import QrCapacityError, ValidationError
from honeyauth.qr import (
    _EC_BLOCKS_M,
    _build_function_patterns,
    _data_capacity_bytes,
    qr_to_png_bytes,
    qr_to_svg,
    render_qr,
)


def decode_png(png: bytes) -> str:
    array = cv2.imdecode(np.frombuffer(png, np.uint8), cv2.IMREAD_GRAYSCALE)
    text, _, _ = cv2.QRCodeDetector().detectAndDecode(array)
    return text


def test_block_table_consistent_with_module_counts():
    """Data+EC codewords must exactly fill the non-function modules."""
    for version in range(1, 41):
        _, reserved = _build_function_patterns(version)
        free_modules = sum(1 for row in reserved for cell in row if not cell)
        ec_per_block, blocks = _EC_BLOCKS_M[version]
        total_codewords = sum(blocks) + ec_per_block * len(blocks)
        remainder = free_modules - total_codewords * 8
        assert free_modules // 8 == total_codewords, f"version {version}"
        assert remainder in (0, 3, 4, 7), f"version {version} remainder {remainder}"


@pytest.mark.parametrize(
    "text",
    [
        "HELLO",
        "otpauth://totp/Example:alice%20(slot%201)?secret=GEZDGNBVGY3TQOJQ"
        "&issuer=Example&algorithm=SHA1&digits=6&period=30",
        "x" * 120,
        "x" * 400,
        "x" * 900,
    ],
)
def test_round_trip_via_independent_decoder(text):
    payload = render_qr(text)
    assert decode_png(qr_to_png_bytes(payload)) == text


def test_matrix_is_square_booleans():
    payload = render_qr("abc")
    assert len(payload.module_matrix) == payload.size
    for row in payload.module_matrix:
        assert len(row) == payload.size
        assert all(isinstance(cell, bool) for cell in row)


def test_distinct_texts_distinct_matrices():
    matrices = {render_qr(f"slot {i} secret").module_matrix for i in range(3)}
    assert len(matrices) == 3


def test_published_capacity_boundaries():
    assert _data_capacity_bytes(1) == 14
    assert _data_capacity_bytes(40) == 2331
    assert render_qr("a" * 2331).size == 177
    with pytest.raises(QrCapacityError):
        render_qr("a" * 2332)


def test_empty_payload_rejected():
    with pytest.raises(ValidationError):
        render_qr("")


def test_utf8_payload():
    text = "héllo wörld ✓"
    assert decode_png(qr_to_png_bytes(render_qr(text))) == text


def _svg_to_matrix(svg: str, size: int, scale: int, border: int) -> list[list[bool]]:
    import re

    matrix = [[False] * size for _ in range(size)]
    for m in re.finditer(
        r'<rect x="(\d+)" y="(\d+)" width="(\d+)" height="(\d+)" fill="#000000"/>', svg
    ):
        x, y, w, h = (int(v) for v in m.groups())
        row = y // scale - border
        for col in range(x // scale - border, (x + w) // scale - border):
            matrix[row][col] = True
    return matrix


def test_svg_encodes_same_matrix_as_png():
    payload = render_qr("otpauth://totp/A:b?secret=GEZDGNBVGY3TQOJQ&issuer=A")
    svg = qr_to_svg(payload, scale=8, border=4)
    assert svg.startswith("<svg")
    recovered = _svg_to_matrix(svg, payload.size, scale=8, border=4)
    expected = [[bool(c) for c in row] for row in payload.module_matrix]
    assert recovered == expected
    # And that matrix, rendered as PNG, reads back as the original text.
    assert decode_png(qr_to_png_bytes(payload)) == payload.text
