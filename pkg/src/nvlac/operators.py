"""Spin-operator algebra on tensor-product spaces.

All operators are dense complex numpy arrays. Basis ordering within each
spin factor is by descending magnetic quantum number, so for spin 1 the
basis reads (+1, 0, -1) and Sz = diag(1, 0, -1).
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError


def spin_operators(multiplicity: int):
    """Standard spin-j matrices (Sx, Sy, Sz) for j = (multiplicity - 1) / 2.

    Each matrix is Hermitian and the triple satisfies [Sx, Sy] = i Sz.
    """
    if multiplicity < 2:
        raise InvalidArgumentError("multiplicity must be at least 2")
    j = (multiplicity - 1) / 2.0
    m = j - np.arange(multiplicity)  # descending m
    sz = np.diag(m).astype(complex)
    sp = np.zeros((multiplicity, multiplicity), dtype=complex)
    for k in range(multiplicity - 1):
        # raising operator connects m[k+1] to m[k]
        mm = m[k + 1]
        sp[k, k + 1] = np.sqrt(j * (j + 1) - mm * (mm + 1))
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    return sx, sy, sz


def embed(op: np.ndarray, slot: int, dims) -> np.ndarray:
    """Embed a single-factor operator into the tensor product of `dims`.

    Returns identity (x) ... (x) op (x) ... (x) identity with `op` at
    position `slot`.
    """
    op = np.asarray(op, dtype=complex)
    if not 0 <= slot < len(dims):
        raise InvalidArgumentError("slot %d outside dims of length %d" % (slot, len(dims)))
    if op.shape != (dims[slot], dims[slot]):
        raise InvalidArgumentError(
            "operator shape %s does not match dims[%d] = %d" % (op.shape, slot, dims[slot]))
    out = np.eye(1, dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == slot else np.eye(d, dtype=complex))
    return out


def basis_ket(dims, indices) -> np.ndarray:
    """Product basis vector |indices[0], indices[1], ...> for the given dims."""
    if len(indices) != len(dims):
        raise InvalidArgumentError("need one index per factor")
    flat = 0
    for d, k in zip(dims, indices):
        if not 0 <= k < d:
            raise InvalidArgumentError("basis index %d outside factor of dimension %d" % (k, d))
        flat = flat * d + k
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[flat] = 1.0
    return v


def is_hermitian(m: np.ndarray, tol: float = 1e-10) -> bool:
    """Relative Frobenius-norm Hermiticity test."""
    m = np.asarray(m)
    scale = np.linalg.norm(m)
    if scale == 0:
        return True
    return np.linalg.norm(m - m.conj().T) <= tol * scale
