"""QR symbol encoder (byte mode, error-correction level M) and renderers.

Produces the module matrix for arbitrary byte payloads up to the
version-40 capacity, plus PNG and SVG renderings of that matrix. The
matrix layout follows ISO/IEC 18004: finder/alignment/timing patterns,
interleaved Reed-Solomon blocks, all eight masks scored by the standard
penalty rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from io import BytesIO

from .errors import QrCapacityError, ValidationError

__all__ = ["QrPayload", "render_qr", "qr_to_png_bytes", "qr_to_svg"]


# Per version 1..40 at level M: (ec codewords per block, list of data-codeword
# counts per block). Totals are cross-checked against the module-count
# derivation in _total_codewords by test_qr.py.
_EC_BLOCKS_M: dict[int, tuple[int, list[int]]] = {
    1: (10, [16]),
    2: (16, [28]),
    3: (26, [44]),
    4: (18, [32, 32]),
    5: (24, [43, 43]),
    6: (16, [27, 27, 27, 27]),
    7: (18, [31, 31, 31, 31]),
    8: (22, [38, 38, 39, 39]),
    9: (22, [36, 36, 36, 37, 37]),
    10: (26, [43, 43, 43, 43, 44]),
    11: (30, [50, 51, 51, 51, 51]),
    12: (22, [36, 36, 36, 36, 36, 36, 37, 37]),
    13: (22, [37, 37, 37, 37, 37, 37, 37, 37, 38]),
    14: (24, [40, 40, 40, 40, 41, 41, 41, 41, 41]),
    15: (24, [41, 41, 41, 41, 41, 42, 42, 42, 42, 42]),
    16: (28, [45, 45, 45, 45, 45, 45, 45, 46, 46, 46]),
    17: (28, [46] * 10 + [47]),
    18: (26, [43] * 9 + [44] * 4),
    19: (26, [44] * 3 + [45] * 11),
    20: (26, [41] * 3 + [42] * 13),
    21: (26, [42] * 17),
    22: (28, [46] * 17),
    23: (28, [47] * 4 + [48] * 14),
    24: (28, [45] * 6 + [46] * 14),
    25: (28, [47] * 8 + [48] * 13),
    26: (28, [46] * 19 + [47] * 4),
    27: (28, [45] * 22 + [46] * 3),
    28: (28, [45] * 3 + [46] * 23),
    29: (28, [45] * 21 + [46] * 7),
    30: (28, [47] * 19 + [48] * 10),
    31: (28, [46] * 2 + [47] * 29),
    32: (28, [46] * 10 + [47] * 23),
    33: (28, [46] * 14 + [47] * 21),
    34: (28, [46] * 14 + [47] * 23),
    35: (28, [47] * 12 + [48] * 26),
    36: (28, [47] * 6 + [48] * 34),
    37: (28, [46] * 29 + [47] * 14),
    38: (28, [46] * 13 + [47] * 32),
    39: (28, [47] * 40 + [48] * 7),
    40: (28, [47] * 18 + [48] * 31),
}

_ALIGNMENT_POSITIONS: dict[int, list[int]] = {
    1: [],
    2: [6, 18],
    3: [6, 22],
    4: [6, 26],
    5: [6, 30],
    6: [6, 34],
    7: [6, 22, 38],
    8: [6, 24, 42],
    9: [6, 26, 46],
    10: [6, 28, 50],
    11: [6, 30, 54],
    12: [6, 32, 58],
    13: [6, 34, 62],
    14: [6, 26, 46, 66],
    15: [6, 26, 48, 70],
    16: [6, 26, 50, 74],
    17: [6, 30, 54, 78],
    18: [6, 30, 56, 82],
    19: [6, 30, 58, 86],
    20: [6, 34, 62, 90],
    21: [6, 28, 50, 72, 94],
    22: [6, 26, 50, 74, 98],
    23: [6, 30, 54, 78, 102],
    24: [6, 28, 54, 80, 106],
    25: [6, 32, 58, 84, 110],
    26: [6, 30, 58, 86, 114],
    27: [6, 34, 62, 90, 118],
    28: [6, 26, 50, 74, 98, 122],
    29: [6, 30, 54, 78, 102, 126],
    30: [6, 26, 52, 78, 104, 130],
    31: [6, 30, 56, 82, 108, 134],
    32: [6, 34, 60, 86, 112, 138],
    33: [6, 30, 58, 86, 114, 142],
    34: [6, 34, 62, 90, 118, 146],
    35: [6, 30, 54, 78, 102, 126, 150],
    36: [6, 24, 50, 76, 102, 128, 154],
    37: [6, 28, 54, 80, 106, 132, 158],
    38: [6, 32, 58, 84, 110, 136, 162],
    39: [6, 26, 54, 82, 110, 138, 166],
    40: [6, 30, 58, 86, 114, 142, 170],
}

_FORMAT_MASK = 0b101010000010010
_FORMAT_GEN = 0b10100110111
_VERSION_GEN = 0b1111100100101
_EC_LEVEL_M_BITS = 0b00

# GF(256) tables for Reed-Solomon, primitive polynomial x^8+x^4+x^3+x^2+1.
_GF_EXP = [0] * 512
_GF_LOG = [0] * 256
_x = 1
for _i in range(255):
    _GF_EXP[_i] = _x
    _GF_LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= 0x11D
for _i in range(255, 512):
    _GF_EXP[_i] = _GF_EXP[_i - 255]


def _gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _GF_EXP[_GF_LOG[a] + _GF_LOG[b]]


def _rs_generator(degree: int) -> list[int]:
    # Product of (x - a^i), coefficients leading-first.
    poly = [1]
    for i in range(degree):
        next_poly = [0] * (len(poly) + 1)
        for j, coeff in enumerate(poly):
            next_poly[j] ^= coeff
            next_poly[j + 1] ^= _gf_mul(coeff, _GF_EXP[i])
        poly = next_poly
    return poly


def _rs_ec_codewords(data: list[int], degree: int) -> list[int]:
    gen = _rs_generator(degree)
    remainder = list(data) + [0] * degree
    for i in range(len(data)):
        factor = remainder[i]
        if factor:
            for j, coeff in enumerate(gen):
                remainder[i + j] ^= _gf_mul(coeff, factor)
    return remainder[len(data):]


def _size_for_version(version: int) -> int:
    return 17 + 4 * version


def _data_capacity_bytes(version: int) -> int:
    """Byte-mode payload capacity at level M for ``version``."""
    _, blocks = _EC_BLOCKS_M[version]
    total_data = sum(blocks)
    count_bits = 8 if version <= 9 else 16
    return (total_data * 8 - 4 - count_bits) // 8


def _pick_version(payload_len: int) -> int:
    for version in range(1, 41):
        if payload_len <= _data_capacity_bytes(version):
            return version
    raise QrCapacityError(
        f"payload of {payload_len} bytes exceeds the {_data_capacity_bytes(40)}-byte "
        "capacity of a version-40 level-M symbol"
    )


def _encode_codewords(payload: bytes, version: int) -> list[int]:
    ec_per_block, blocks = _EC_BLOCKS_M[version]
    total_data = sum(blocks)
    count_bits = 8 if version <= 9 else 16

    bits: list[int] = []

    def put(value: int, width: int) -> None:
        for shift in range(width - 1, -1, -1):
            bits.append((value >> shift) & 1)

    put(0b0100, 4)  # byte mode
    put(len(payload), count_bits)
    for byte in payload:
        put(byte, 8)
    # Terminator, then pad to a codeword boundary.
    bits.extend([0] * min(4, total_data * 8 - len(bits)))
    bits.extend([0] * (-len(bits) % 8))
    codewords = [
        int("".join(map(str, bits[i : i + 8])), 2) for i in range(0, len(bits), 8)
    ]
    pad = (0xEC, 0x11)
    for i in range(total_data - len(codewords)):
        codewords.append(pad[i % 2])

    # Split into blocks, compute EC, interleave.
    data_blocks: list[list[int]] = []
    offset = 0
    for block_len in blocks:
        data_blocks.append(codewords[offset : offset + block_len])
        offset += block_len
    ec_blocks = [_rs_ec_codewords(block, ec_per_block) for block in data_blocks]

    interleaved: list[int] = []
    for i in range(max(blocks)):
        for block in data_blocks:
            if i < len(block):
                interleaved.append(block[i])
    for i in range(ec_per_block):
        for block in ec_blocks:
            interleaved.append(block[i])
    return interleaved


def _build_function_patterns(version: int) -> tuple[list[list[int]], list[list[bool]]]:
    """Matrix pre-seeded with function patterns and a reserved-cell map."""
    size = _size_for_version(version)
    grid = [[0] * size for _ in range(size)]
    reserved = [[False] * size for _ in range(size)]

    def set_module(r: int, c: int, value: int) -> None:
        grid[r][c] = value
        reserved[r][c] = True

    def place_finder(top: int, left: int) -> None:
        for dr in range(-1, 8):
            for dc in range(-1, 8):
                r, c = top + dr, left + dc
                if not (0 <= r < size and 0 <= c < size):
                    continue
                inside = 0 <= dr <= 6 and 0 <= dc <= 6
                ring = dr in (0, 6) or dc in (0, 6)
                core = 2 <= dr <= 4 and 2 <= dc <= 4
                set_module(r, c, 1 if inside and (ring or core) else 0)

    place_finder(0, 0)
    place_finder(0, size - 7)
    place_finder(size - 7, 0)

    for i in range(8, size - 8):  # timing
        value = 1 if i % 2 == 0 else 0
        if not reserved[6][i]:
            set_module(6, i, value)
        if not reserved[i][6]:
            set_module(i, 6, value)

    centers = _ALIGNMENT_POSITIONS[version]
    for r0 in centers:
        for c0 in centers:
            near_top = r0 <= 8
            near_bottom = r0 >= size - 9
            near_left = c0 <= 8
            near_right = c0 >= size - 9
            if (near_top and near_left) or (near_top and near_right) or (near_bottom and near_left):
                continue  # would overlap a finder pattern
            for dr in range(-2, 3):
                for dc in range(-2, 3):
                    value = 1 if max(abs(dr), abs(dc)) != 1 else 0
                    set_module(r0 + dr, c0 + dc, value)

    # Reserve format info areas (filled in later) and the dark module.
    for i in range(9):
        if i != 6:
            reserved[8][i] = True
            reserved[i][8] = True
    for i in range(8):
        reserved[8][size - 1 - i] = True
        reserved[size - 1 - i][8] = True
    set_module(size - 8, 8, 1)

    if version >= 7:  # version info blocks
        for i in range(6):
            for j in range(3):
                reserved[i][size - 11 + j] = True
                reserved[size - 11 + j][i] = True

    return grid, reserved


def _place_data(grid: list[list[int]], reserved: list[list[bool]], codewords: list[int]) -> None:
    size = len(grid)
    bits = [(byte >> shift) & 1 for byte in codewords for shift in range(7, -1, -1)]
    index = 0
    col = size - 1
    upward = True
    while col > 0:
        if col == 6:
            col -= 1  # skip the timing column entirely
        rows = range(size - 1, -1, -1) if upward else range(size)
        for row in rows:
            for c in (col, col - 1):
                if reserved[row][c]:
                    continue
                grid[row][c] = bits[index] if index < len(bits) else 0
                index += 1
        upward = not upward
        col -= 2


def _mask_predicate(mask: int):
    return {
        0: lambda r, c: (r + c) % 2 == 0,
        1: lambda r, c: r % 2 == 0,
        2: lambda r, c: c % 3 == 0,
        3: lambda r, c: (r + c) % 3 == 0,
        4: lambda r, c: (r // 2 + c // 3) % 2 == 0,
        5: lambda r, c: (r * c) % 2 + (r * c) % 3 == 0,
        6: lambda r, c: ((r * c) % 2 + (r * c) % 3) % 2 == 0,
        7: lambda r, c: ((r + c) % 2 + (r * c) % 3) % 2 == 0,
    }[mask]


def _penalty(grid: list[list[int]]) -> int:
    size = len(grid)
    score = 0

    def run_penalty(line: list[int]) -> int:
        total = 0
        run_value, run_len = line[0], 1
        for value in line[1:]:
            if value == run_value:
                run_len += 1
            else:
                if run_len >= 5:
                    total += 3 + run_len - 5
                run_value, run_len = value, 1
        if run_len >= 5:
            total += 3 + run_len - 5
        return total

    columns = [[grid[r][c] for r in range(size)] for c in range(size)]
    for line in grid:
        score += run_penalty(line)
    for line in columns:
        score += run_penalty(line)

    for r in range(size - 1):
        for c in range(size - 1):
            if grid[r][c] == grid[r][c + 1] == grid[r + 1][c] == grid[r + 1][c + 1]:
                score += 3

    finder_like = ([1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0, 1, 1, 1, 0, 1])
    for line in list(grid) + columns:
        for start in range(size - 10):
            window = line[start : start + 11]
            if window == finder_like[0] or window == finder_like[1]:
                score += 40

    dark = sum(sum(row) for row in grid)
    percent = dark * 100 // (size * size)
    score += 10 * (abs(percent - 50) // 5)
    return score


def _bch_remainder(value: int, generator: int) -> int:
    gen_bits = generator.bit_length()
    remainder = value
    while remainder.bit_length() >= gen_bits:
        remainder ^= generator << (remainder.bit_length() - gen_bits)
    return remainder


def _format_bits(mask: int) -> int:
    data = (_EC_LEVEL_M_BITS << 3) | mask
    remainder = _bch_remainder(data << 10, _FORMAT_GEN)
    return ((data << 10) | remainder) ^ _FORMAT_MASK


def _write_format(grid: list[list[int]], mask: int) -> None:
    size = len(grid)
    bits = _format_bits(mask)
    value = [(bits >> i) & 1 for i in range(15)]  # bit 0 = LSB first
    # Around the top-left finder (bit 0..14).
    coords_a = [
        (8, 0), (8, 1), (8, 2), (8, 3), (8, 4), (8, 5), (8, 7), (8, 8),
        (7, 8), (5, 8), (4, 8), (3, 8), (2, 8), (1, 8), (0, 8),
    ]
    # Split copy: below bottom-left finder and right of top-right finder.
    coords_b = [(size - 1, 8), (size - 2, 8), (size - 3, 8), (size - 4, 8),
                (size - 5, 8), (size - 6, 8), (size - 7, 8),
                (8, size - 8), (8, size - 7), (8, size - 6), (8, size - 5),
                (8, size - 4), (8, size - 3), (8, size - 2), (8, size - 1)]
    for i, (r, c) in enumerate(coords_a):
        grid[r][c] = value[14 - i]
    for i, (r, c) in enumerate(coords_b):
        grid[r][c] = value[14 - i]


def _write_version_info(grid: list[list[int]], version: int) -> None:
    if version < 7:
        return
    size = len(grid)
    remainder = _bch_remainder(version << 12, _VERSION_GEN)
    bits = (version << 12) | remainder
    for i in range(18):
        bit = (bits >> i) & 1
        grid[size - 11 + i % 3][i // 3] = bit
        grid[i // 3][size - 11 + i % 3] = bit


@dataclass(frozen=True)
class QrPayload:
    """A rendered symbol: the square module matrix plus the encoded text."""

    module_matrix: tuple[tuple[bool, ...], ...]
    text: str

    @property
    def size(self) -> int:
        return len(self.module_matrix)


def render_qr(text: str) -> QrPayload:
    """Encode ``text`` (UTF-8, byte mode, level M) into a module matrix."""
    if not isinstance(text, str) or not text:
        raise ValidationError("QR payload must be a nonempty string")
    payload = text.encode("utf-8")
    version = _pick_version(len(payload))
    codewords = _encode_codewords(payload, version)

    base_grid, reserved = _build_function_patterns(version)
    _place_data(base_grid, reserved, codewords)

    best_grid: list[list[int]] | None = None
    best_score = None
    for mask in range(8):
        predicate = _mask_predicate(mask)
        candidate = [row[:] for row in base_grid]
        size = len(candidate)
        for r in range(size):
            for c in range(size):
                if not reserved[r][c] and predicate(r, c):
                    candidate[r][c] ^= 1
        _write_format(candidate, mask)
        _write_version_info(candidate, version)
        score = _penalty(candidate)
        if best_score is None or score < best_score:
            best_score = score
            best_grid = candidate

    assert best_grid is not None
    matrix = tuple(tuple(bool(v) for v in row) for row in best_grid)
    return QrPayload(module_matrix=matrix, text=text)


def qr_to_png_bytes(payload: QrPayload, scale: int = 8, border: int = 4) -> bytes:
    """Render the matrix to PNG with the standard 4-module quiet zone."""
    from PIL import Image

    size = payload.size
    total = size + 2 * border
    image = Image.new("1", (total, total), 1)
    pixels = image.load()
    for r, row in enumerate(payload.module_matrix):
        for c, dark in enumerate(row):
            if dark:
                pixels[border + c, border + r] = 0
    return _png_bytes(image.resize((total * scale, total * scale), Image.NEAREST))


def _png_bytes(image) -> bytes:
    buf = BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()


def qr_to_svg(payload: QrPayload, scale: int = 8, border: int = 4) -> str:
    """Render the matrix as an SVG of one <rect> per horizontal dark run."""
    size = payload.size
    total = (size + 2 * border) * scale
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {total} {total}" '
        f'width="{total}" height="{total}" shape-rendering="crispEdges">',
        f'<rect width="{total}" height="{total}" fill="#ffffff"/>',
    ]
    for r, row in enumerate(payload.module_matrix):
        c = 0
        while c < size:
            if row[c]:
                start = c
                while c < size and row[c]:
                    c += 1
                parts.append(
                    f'<rect x="{(border + start) * scale}" y="{(border + r) * scale}" '
                    f'width="{(c - start) * scale}" height="{scale}" fill="#000000"/>'
                )
            else:
                c += 1
    parts.append("</svg>")
    return "\n".join(parts)
