"""Moment-independent block matrices.

Every block matrix is a dense complex ndarray whose dimensions are multiples
of the block size ``q``. Block ``(k, l)`` of ``M`` is
``M[k*q:(k+1)*q, l*q:(l+1)*q]``.
"""

from functools import lru_cache

import numpy as np

__all__ = [
    "adj",
    "blocks",
    "stack_blocks",
    "get_block",
    "make_shift",
    "make_truncations",
    "shift_resolvent",
    "make_v",
    "signature_matrices",
    "is_hermitian",
    "hermitize",
]


def adj(m):
    """Conjugate transpose."""
    return np.conj(np.swapaxes(m, -1, -2))


def hermitize(m):
    return 0.5 * (m + adj(m))


def is_hermitian(m, tol=None):
    """True if ``m`` is hermitian up to ``tol`` (default ``1e-12*max|m|``)."""
    m = np.asarray(m)
    if tol is None:
        tol = 1e-12 * max(np.max(np.abs(m), initial=0.0), 1.0)
    return bool(np.max(np.abs(m - adj(m)), initial=0.0) <= tol)


def blocks(vec, q):
    """Split a ``(j+1)q x c`` block column into an array of shape ``(j+1, q, c)``."""
    vec = np.asarray(vec)
    if vec.shape[0] % q:
        raise ValueError(f"row count {vec.shape[0]} is not a multiple of q={q}")
    return vec.reshape(vec.shape[0] // q, q, vec.shape[1])


def stack_blocks(bl):
    """Inverse of :func:`blocks`."""
    bl = np.asarray(bl)
    return bl.reshape(bl.shape[0] * bl.shape[1], bl.shape[2])


def get_block(m, k, l, q):
    return m[k * q:(k + 1) * q, l * q:(l + 1) * q]


def _frozen(a):
    a.setflags(write=False)
    return a


def _check(j, q):
    if j < 0:
        raise ValueError(f"block order must be non-negative, got {j}")
    if q < 1:
        raise ValueError(f"block size must be positive, got {q}")


@lru_cache(maxsize=256)
def make_shift(j, q):
    """Block down shift ``T_j`` of size ``(j+1)q``; ``T_0`` is the q x q zero."""
    _check(j, q)
    return _frozen(np.kron(np.eye(j + 1, k=-1), np.eye(q)).astype(complex))


@lru_cache(maxsize=256)
def make_truncations(j, q):
    """Return ``(L1, L2)``, the ``(j+1) x j`` block embeddings.

    ``L1`` prepends a zero block, ``L2`` appends one.
    """
    _check(j, q)
    if j == 0:
        raise ValueError("truncations need j >= 1")
    eye = np.eye(j * q, dtype=complex)
    zero = np.zeros((q, j * q), dtype=complex)
    return _frozen(np.vstack([zero, eye])), _frozen(np.vstack([eye, zero]))


def shift_resolvent(j, q, z):
    """``R_j(z) = (I - z T_j)^{-1}``, assembled as ``sum_l z^l T_j^l``.

    Block ``(k, l)`` equals ``z^(k-l) I`` for ``k >= l`` and zero otherwise.
    """
    _check(j, q)
    lower = np.tril(np.ones((j + 1, j + 1)))
    k = np.arange(j + 1)
    powers = np.where(lower > 0, complex(z) ** np.maximum(k[:, None] - k[None, :], 0), 0)
    return np.kron(powers, np.eye(q))


@lru_cache(maxsize=256)
def make_v(j, q):
    """Block column ``v_j = (I, 0, ..., 0)^T`` with ``j+1`` blocks."""
    _check(j, q)
    v = np.zeros(((j + 1) * q, q), dtype=complex)
    v[:q] = np.eye(q)
    return _frozen(v)


@lru_cache(maxsize=64)
def signature_matrices(q):
    """Return ``(J_q, frakJ_q)``: ``[[0, -iI], [iI, 0]]`` and ``[[0, I], [I, 0]]``."""
    _check(0, q)
    eye = np.eye(q)
    zero = np.zeros((q, q))
    J = np.block([[zero, -1j * eye], [1j * eye, zero]])
    Jf = np.block([[zero, eye], [eye, zero]]).astype(complex)
    return _frozen(J), _frozen(Jf)
