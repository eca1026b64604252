"""Square matrix polynomials with complex coefficients."""

from math import comb

import numpy as np

from . import kernels
from .blockkit import adj

__all__ = ["MatrixPolynomial", "eval_poly", "derivative"]


def _as_coeffs(coeffs):
    c = np.array(coeffs, dtype=complex)
    if c.ndim != 3 or c.shape[1] != c.shape[2]:
        raise ValueError(f"coefficients must have shape (d+1, p, p), got {c.shape}")
    return c


class MatrixPolynomial:
    """``P(z) = sum_k z^k coeffs[k]`` with ``p x p`` coefficients.

    Trailing blocks that are exactly zero are trimmed, so ``degree`` is the
    index of the last nonzero coefficient (``-1`` for the zero polynomial,
    which keeps one zero block so the size stays known).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = _as_coeffs(coeffs)
        k = c.shape[0]
        while k > 1 and not np.any(c[k - 1]):
            k -= 1
        if k == 0:
            raise ValueError("need at least one coefficient")
        c = c[:k]
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def constant(cls, m):
        return cls(np.asarray(m, dtype=complex)[None])

    @classmethod
    def identity(cls, p):
        return cls.constant(np.eye(p))

    @classmethod
    def zero(cls, p):
        return cls(np.zeros((1, p, p)))

    @classmethod
    def monomial(cls, k, m):
        """``z^k * m``."""
        m = np.asarray(m, dtype=complex)
        c = np.zeros((k + 1,) + m.shape, dtype=complex)
        c[k] = m
        return cls(c)

    @classmethod
    def from_blocks(cls, blocks2x2):
        """Assemble a ``2p x 2p`` polynomial from a 2x2 nested list of polynomials."""
        (a, b), (c, d) = blocks2x2
        deg = max(x.coeffs.shape[0] for x in (a, b, c, d))
        top = np.concatenate([a.padded(deg), b.padded(deg)], axis=2)
        bottom = np.concatenate([c.padded(deg), d.padded(deg)], axis=2)
        return cls(np.concatenate([top, bottom], axis=1))

    @property
    def size(self):
        return self.coeffs.shape[1]

    @property
    def degree(self):
        if self.coeffs.shape[0] == 1 and not np.any(self.coeffs[0]):
            return -1
        return self.coeffs.shape[0] - 1

    def leading(self):
        return self.coeffs[-1]

    def padded(self, length):
        """Coefficient array zero-padded to ``length`` entries."""
        c = self.coeffs
        if length < c.shape[0]:
            raise ValueError("cannot pad to fewer coefficients")
        out = np.zeros((length,) + c.shape[1:], dtype=complex)
        out[:c.shape[0]] = c
        return out

    def numerical_degree(self, rtol=1e-12):
        """Highest index whose coefficient exceeds ``rtol`` times the largest one."""
        norms = np.abs(self.coeffs).max(axis=(1, 2))
        top = norms.max()
        if top == 0:
            return -1
        return int(np.nonzero(norms > rtol * top)[0].max())

    def __call__(self, z):
        return eval_poly(self, z)

    def evaluate_many(self, zs):
        return kernels.horner_batch(self.coeffs, np.atleast_1d(np.asarray(zs, dtype=complex)))

    def adjoint(self):
        """The polynomial ``z -> P(conj z)^*`` (coefficient-wise adjoint)."""
        return MatrixPolynomial(adj(self.coeffs))

    def derivative(self, order=1):
        return derivative(self, order)

    def block(self, i, k, p):
        """Sub-polynomial made of the ``(i, k)`` block of size ``p``."""
        return MatrixPolynomial(self.coeffs[:, i * p:(i + 1) * p, k * p:(k + 1) * p])

    def _coerce(self, other):
        if isinstance(other, MatrixPolynomial):
            return other
        return MatrixPolynomial.constant(np.asarray(other, dtype=complex) * np.eye(self.size)
                                         if np.ndim(other) == 0 else other)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(self.coeffs.shape[0], other.coeffs.shape[0])
        return MatrixPolynomial(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self):
        return MatrixPolynomial(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return MatrixPolynomial(self.coeffs * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, MatrixPolynomial):
            a, b = self.coeffs, other.coeffs
            out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1], b.shape[2]), dtype=complex)
            for i in range(a.shape[0]):
                out[i:i + b.shape[0]] += np.matmul(a[i], b)
            return MatrixPolynomial(out)
        return MatrixPolynomial(np.matmul(self.coeffs, np.asarray(other, dtype=complex)))

    def __rmatmul__(self, other):
        return MatrixPolynomial(np.matmul(np.asarray(other, dtype=complex), self.coeffs))

    def times_scalar_poly(self, scoeffs):
        """Multiply by the scalar polynomial ``sum_k scoeffs[k] z^k``."""
        s = np.asarray(scoeffs, dtype=complex)
        c = self.coeffs
        out = np.zeros((c.shape[0] + s.shape[0] - 1,) + c.shape[1:], dtype=complex)
        for k, sk in enumerate(s):
            out[k:k + c.shape[0]] += sk * c
        return MatrixPolynomial(out)

    def divide_linear(self, root):
        """Synthetic division by ``(z - root)``; returns ``(quotient, remainder)``."""
        c = self.coeffs
        n = c.shape[0]
        if n == 1:
            return MatrixPolynomial.zero(self.size), c[0].copy()
        quot = np.zeros((n - 1,) + c.shape[1:], dtype=complex)
        acc = c[-1].copy()
        for k in range(n - 2, -1, -1):
            quot[k] = acc
            acc = c[k] + root * acc
        return MatrixPolynomial(quot), acc

    def taylor_coefficients(self, center):
        """Coefficients ``t_k`` with ``P(z) = sum_k t_k (z - center)^k`` (binomial recentering)."""
        c = self.coeffs
        n = c.shape[0]
        out = np.zeros_like(c)
        for k in range(n):
            for i in range(k, n):
                out[k] += comb(i, k) * center ** (i - k) * c[i]
        return out

    def __repr__(self):
        return f"MatrixPolynomial(degree={self.degree}, size={self.size})"


def eval_poly(poly, z):
    """Horner evaluation at a single point."""
    c = poly.coeffs
    acc = np.array(c[-1], dtype=complex)
    for k in range(c.shape[0] - 2, -1, -1):
        acc = acc * z + c[k]
    return acc


def derivative(poly, order=1):
    """Formal ``order``-th derivative, ``c'_k = (k+1) c_{k+1}`` applied repeatedly."""
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    c = np.array(poly.coeffs)
    for _ in range(order):
        if c.shape[0] == 1:
            c = np.zeros_like(c)
            break
        c = c[1:] * np.arange(1, c.shape[0])[:, None, None]
    return MatrixPolynomial(c)
