"""Levenshtein distance over strings or arbitrary hashable sequences.

Sequences are mapped to int64 code arrays and scored by a compiled two-row
dynamic program; ``edit_distance_matrix`` runs the same kernel over every
pair of two collections without returning to Python per pair.
"""

from __future__ import annotations

from typing import Hashable, Sequence

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def _levenshtein(a, b, row):
    n = a.shape[0]
    m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    for j in range(m + 1):
        row[j] = j
    for i in range(1, n + 1):
        diag = row[0]
        row[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            up = row[j]
            best = diag if ai == b[j - 1] else diag + 1
            if up + 1 < best:
                best = up + 1
            if row[j - 1] + 1 < best:
                best = row[j - 1] + 1
            row[j] = best
            diag = up
    return row[m]


@numba.njit(cache=True, nogil=True)
def _pairwise(flat_a, off_a, flat_b, off_b, out):
    width = 1
    for j in range(off_b.shape[0] - 1):
        width = max(width, off_b[j + 1] - off_b[j] + 1)
    row = np.empty(width, np.int64)
    for i in range(off_a.shape[0] - 1):
        a = flat_a[off_a[i]:off_a[i + 1]]
        for j in range(off_b.shape[0] - 1):
            out[i, j] = _levenshtein(a, flat_b[off_b[j]:off_b[j + 1]], row)


class _Vocab:
    """Assigns stable int codes to non-string sequence items."""

    def __init__(self) -> None:
        self.codes: dict[Hashable, int] = {}

    def encode(self, seq: Sequence[Hashable]) -> np.ndarray:
        if isinstance(seq, str):
            return np.frombuffer(seq.encode("utf-32-le", "surrogatepass"), dtype=np.uint32).astype(np.int64)
        codes = self.codes
        return np.fromiter((codes.setdefault(x, len(codes)) for x in seq), dtype=np.int64, count=len(seq))


def _codes_pair(a: Sequence[Hashable], b: Sequence[Hashable]) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(a, str) != isinstance(b, str):
        a, b = list(a), list(b)
    vocab = _Vocab()
    return vocab.encode(a), vocab.encode(b)


def levenshtein(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Minimum number of single-item insertions, deletions and substitutions."""
    ca, cb = _codes_pair(a, b)
    if ca.shape[0] < cb.shape[0]:
        ca, cb = cb, ca
    return int(_levenshtein(ca, cb, np.empty(cb.shape[0] + 1, np.int64)))


def normalized_edit_distance(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Levenshtein distance divided by the longer length; 0.0 for two empty inputs."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def _pack(seqs: Sequence[Sequence[Hashable]], vocab: _Vocab) -> tuple[np.ndarray, np.ndarray]:
    arrays = [vocab.encode(s) for s in seqs]
    offsets = np.zeros(len(arrays) + 1, np.int64)
    np.cumsum([len(x) for x in arrays], out=offsets[1:])
    flat = np.concatenate(arrays) if arrays else np.empty(0, np.int64)
    return flat, offsets


def edit_distance_matrix(seqs_a: Sequence[Sequence[Hashable]], seqs_b: Sequence[Sequence[Hashable]]) -> np.ndarray:
    """Levenshtein distance for every ``(a, b)`` pair, shape ``(len(seqs_a), len(seqs_b))``."""
    vocab = _Vocab()
    if not all(isinstance(s, str) for s in (*seqs_a, *seqs_b)):
        seqs_a = [list(s) for s in seqs_a]
        seqs_b = [list(s) for s in seqs_b]
    flat_a, off_a = _pack(seqs_a, vocab)
    flat_b, off_b = _pack(seqs_b, vocab)
    out = np.empty((len(seqs_a), len(seqs_b)), np.int64)
    _pairwise(flat_a, off_a, flat_b, off_b, out)
    return out


def normalized_edit_distance_matrix(
    seqs_a: Sequence[Sequence[Hashable]], seqs_b: Sequence[Sequence[Hashable]]
) -> np.ndarray:
    dist = edit_distance_matrix(seqs_a, seqs_b).astype(np.float64)
    longest = np.maximum.outer(
        np.array([len(s) for s in seqs_a], np.int64).reshape(-1),
        np.array([len(s) for s in seqs_b], np.int64).reshape(-1),
    )
    return np.divide(dist, longest, out=np.zeros_like(dist), where=longest > 0)
