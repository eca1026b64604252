"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def horner_batch(coeffs, zs):
    """Evaluate ``sum_k zs**k * coeffs[k]`` at every point of ``zs``.

    coeffs: complex array ``(d+1, p, r)``; zs: complex array ``(N,)``.
    Returns ``(N, p, r)``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    zs = np.asarray(zs, dtype=complex)
    out = np.zeros((zs.shape[0],) + coeffs.shape[1:], dtype=complex)
    zcol = zs[:, None, None]
    for k in range(coeffs.shape[0] - 1, -1, -1):
        out = out * zcol + coeffs[k]
    return out


def sandwich_coeffs(row, col):
    """Coefficients of ``(c_0, ..., c_j) R_j(z) (w_0; ...; w_j)``.

    The z^d coefficient is ``sum_{k=d}^{j} c_k w_{k-d}``.
    row: ``(j+1, p, q)``; col: ``(j+1, q, r)``. Returns ``(j+1, p, r)``.
    """
    row = np.asarray(row, dtype=complex)
    col = np.asarray(col, dtype=complex)
    n = row.shape[0]
    out = np.zeros((n, row.shape[1], col.shape[2]), dtype=complex)
    for d in range(n):
        out[d] = np.einsum("kij,kjl->il", row[d:], col[:n - d])
    return out


def hankel_dense(s, rows, cols, shift):
    """Dense block matrix with block ``(k, l)`` equal to ``s[k + l + shift]``."""
    s = np.asarray(s, dtype=complex)
    q = s.shape[1]
    out = np.empty((rows * q, cols * q), dtype=complex)
    for k in range(rows):
        for l in range(cols):
            out[k * q:(k + 1) * q, l * q:(l + 1) * q] = s[k + l + shift]
    return out
