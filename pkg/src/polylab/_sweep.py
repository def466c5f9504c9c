"""Row-by-row dynamic programming over a directed lattice box.

Rows (fixed transverse coordinates) are visited in lexicographic order; a row
depends on the rows one step back in each transverse direction, all of which
sit within the last ``stride[0]`` rows, so only that many are kept resident.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import _kernels
from .env import EnvField
from .errors import OutOfBoundsError


def check_endpoint(field: EnvField, end: Sequence[int]) -> tuple:
    end = tuple(int(c) for c in end)
    if len(end) < 2:
        raise OutOfBoundsError(f"endpoint needs at least 2 coordinates, got {end}")
    if len(end) != field.ndim:
        raise OutOfBoundsError(f"endpoint {end} has wrong dimension for field shape {field.shape}")
    if any(c < 0 for c in end) or not field.contains(end):
        raise OutOfBoundsError(f"endpoint {end} outside field of shape {field.shape}")
    return end


def sweep(field: EnvField, end: Sequence[int], beta: float | None = None) -> float:
    """Last-passage value (``beta is None``) or unnormalized log partition function."""
    end = check_endpoint(field, end)
    length = end[0] + 1
    ext = tuple(c + 1 for c in end[1:])
    strides = np.ones(len(ext), dtype=np.int64)
    for i in range(len(ext) - 2, -1, -1):
        strides[i] = strides[i + 1] * ext[i + 1]
    ring = int(strides[0]) + 1
    buf = np.empty((ring, length))
    incoming = np.empty(length)
    tropical = beta is None
    for k, idx in enumerate(np.ndindex(*ext)):
        eta = field.row(*idx, length=length)
        if not tropical:
            eta = beta * eta
        incoming.fill(-np.inf)
        for i, c in enumerate(idx):
            if c > 0:
                nb = buf[(k - strides[i]) % ring]
                if tropical:
                    np.maximum(incoming, nb, out=incoming)
                else:
                    np.logaddexp(incoming, nb, out=incoming)
        out = buf[k % ring]
        origin = k == 0
        if tropical:
            _kernels.scan_max(eta, incoming, out, origin)
        else:
            _kernels.scan_logsumexp(eta, incoming, out, origin)
    return float(buf[k % ring][end[0]])


def planar_rows(field: EnvField, n_total: int, max_offset: int, beta: float | None = None):
    """Yield ``(m, value at (n_total - m, m))`` for m = 0..max_offset.

    One planar sweep restricted to the triangle i + j <= n_total: row m only
    needs columns up to n_total - m.
    """
    if field.ndim != 2:
        raise OutOfBoundsError(f"planar sweep needs a 2-d field, got shape {field.shape}")
    if n_total < 1 or max_offset < 0 or max_offset > n_total:
        raise OutOfBoundsError(f"bad anti-diagonal request n_total={n_total}, max_offset={max_offset}")
    if n_total + 1 > field.shape[0] or max_offset + 1 > field.shape[1]:
        raise OutOfBoundsError(
            f"field of shape {field.shape} does not cover anti-diagonal {n_total} up to offset {max_offset}")
    prev = np.full(n_total + 1, -np.inf)
    cur = np.empty(n_total + 1)
    tropical = beta is None
    for m in range(max_offset + 1):
        length = n_total - m + 1
        eta = field.row(m, length=length)
        if not tropical:
            eta = beta * eta
        out = cur[:length]
        if tropical:
            _kernels.scan_max(eta, prev[:length], out, m == 0)
        else:
            _kernels.scan_logsumexp(eta, prev[:length], out, m == 0)
        yield m, float(out[length - 1])
        prev, cur = cur, prev


def row_end_values(field: EnvField, n: int, max_row: int, beta: float | None = None):
    """Yield ``(m, value at (n, m))`` for m = 0..max_row from one planar sweep."""
    if field.ndim != 2:
        raise OutOfBoundsError(f"planar sweep needs a 2-d field, got shape {field.shape}")
    if n < 0 or max_row < 0 or n + 1 > field.shape[0] or max_row + 1 > field.shape[1]:
        raise OutOfBoundsError(f"field of shape {field.shape} does not cover ({n}, {max_row})")
    prev = np.full(n + 1, -np.inf)
    cur = np.empty(n + 1)
    tropical = beta is None
    for m in range(max_row + 1):
        eta = field.row(m, length=n + 1)
        if tropical:
            _kernels.scan_max(eta, prev, cur, m == 0)
        else:
            _kernels.scan_logsumexp(beta * eta, prev, cur, m == 0)
        yield m, float(cur[n])
        prev, cur = cur, prev
