"""Oblivious-transfer distributions and their named auxiliary channels.

Bit layout for a string-OT pair of length L (choice bits stored 0/1 for 1/2):

    x = C_A * 2**(3L) + S_A1 * 2**(2L) + S_A2 * 2**L + S_B[C_A]
    y = C_B * 2**(3L) + S_B1 * 2**(2L) + S_B2 * 2**L + S_A[C_B]
"""

from __future__ import annotations

import numpy as np

from ..channel import AuxChannel
from ..errors import SizeGuard, ValidationError
from ..pmf import Alphabet, JointPMF, validate_joint

MAX_LOG_SUPPORT = 24


def _fields(n: np.ndarray, L: int) -> dict:
    mask = (1 << L) - 1
    return {
        "sb2": n & mask,
        "sb1": (n >> L) & mask,
        "sa2": (n >> (2 * L)) & mask,
        "sa1": (n >> (3 * L)) & mask,
        "cb": (n >> (4 * L)) & 1,
        "ca": (n >> (4 * L + 1)) & 1,
    }


def _side_alphabet(name: str, L: int) -> Alphabet:
    size = 1 << (3 * L + 1)
    n = np.arange(size)
    mask = (1 << L) - 1
    fmt = f"0{L}b"
    symbols = tuple(
        f"{(v >> 3 * L) + 1}:{(v >> 2 * L) & mask:{fmt}}:{(v >> L) & mask:{fmt}}:{v & mask:{fmt}}" for v in n.tolist()
    )
    return Alphabet(name, symbols)


def make_string_ot_pair(L: int) -> JointPMF:
    """Two independent length-L string OTs in opposite directions, uniform inputs."""
    if L < 1:
        raise ValidationError("string length must be >= 1")
    if 4 * L + 2 > MAX_LOG_SUPPORT:
        raise SizeGuard(f"support of 2**{4 * L + 2} points exceeds the 2**{MAX_LOG_SUPPORT} guard")
    n = np.arange(1 << (4 * L + 2), dtype=np.int64)
    f = _fields(n, L)
    sb_ca = np.where(f["ca"] == 0, f["sb1"], f["sb2"])
    sa_cb = np.where(f["cb"] == 0, f["sa1"], f["sa2"])
    x = (f["ca"] << (3 * L)) | (f["sa1"] << (2 * L)) | (f["sa2"] << L) | sb_ca
    y = (f["cb"] << (3 * L)) | (f["sb1"] << (2 * L)) | (f["sb2"] << L) | sa_cb
    idx = np.stack([x, y], axis=1)
    order = np.lexsort(idx.T[::-1])
    probs = np.full(len(n), 1.0 / len(n))
    return JointPMF([_side_alphabet("X", L), _side_alphabet("Y", L)], idx[order], probs)


def make_bit_ot() -> JointPMF:
    """Single bit OT: A = (S1, S2) uniform, B = (C, S_C) with C uniform on {1, 2}."""
    a_symbols = ("00", "01", "10", "11")
    b_symbols = ("10", "11", "20", "21")
    entries = {}
    for s1 in (0, 1):
        for s2 in (0, 1):
            for c in (1, 2):
                sc = s1 if c == 1 else s2
                entries[(a_symbols.index(f"{s1}{s2}"), b_symbols.index(f"{c}{sc}"))] = 1 / 8
    return validate_joint(entries, [Alphabet("A", a_symbols), Alphabet("B", b_symbols)])


def make_bit_ot_pair() -> JointPMF:
    """Two independent bit OTs in opposite directions (string-OT pair with L = 1)."""
    return make_string_ot_pair(1)


def unpack(v: np.ndarray, L: int) -> tuple:
    """Split packed side symbols into (choice, s1, s2, received)."""
    mask = (1 << L) - 1
    return (v >> (3 * L)) & 1, (v >> (2 * L)) & mask, (v >> L) & mask, v & mask


def string_length(pmf: JointPMF) -> int:
    nx = pmf.shape[0]
    L = (int(nx).bit_length() - 2) // 3
    if L < 1 or nx != 1 << (3 * L + 1):
        raise ValidationError("not a string-OT pair alphabet")
    return L


def paper_channel(pmf: JointPMF) -> AuxChannel:
    """Q = (C_A, C_B, S_A[C_B], S_B[C_A]), a deterministic function of (x, y)."""
    L = string_length(pmf)
    ca, _, _, sb_ca = unpack(pmf.indices[:, 0], L)
    cb, _, _, sa_cb = unpack(pmf.indices[:, 1], L)
    labels = (((ca << 1) | cb) << (2 * L)) | (sa_cb << L) | sb_ca
    return AuxChannel.deterministic(labels, 1 << (2 * L + 2))


def reveal_x_channel(pmf: JointPMF) -> AuxChannel:
    """U = X."""
    return AuxChannel.deterministic(pmf.indices[:, 0], pmf.shape[0])


def reveal_y_channel(pmf: JointPMF) -> AuxChannel:
    """U = Y."""
    return AuxChannel.deterministic(pmf.indices[:, 1], pmf.shape[1])
