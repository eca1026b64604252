"""Orthogonal matrix polynomials on [a, b] and their second-kind companions."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .blockkit import adj, blocks, hermitize, make_v
from .instance import Instance, solve
from .moments import InsufficientMomentsError
from .polynomial import MatrixPolynomial, derivative, eval_poly

__all__ = [
    "as_instance",
    "schur_complement",
    "schur_from_blocks",
    "sigma",
    "first_kind",
    "second_kind",
    "tilde_second_kind",
    "tilde_schur_complement",
    "poly_from_row",
    "OmpFamily",
    "eval_poly",
    "derivative",
]


def as_instance(data):
    return data if isinstance(data, Instance) else Instance(data)


def schur_from_blocks(H_prev, Y, corner):
    """``corner - Y^* H_prev^{-1} Y`` for an explicit block split."""
    return hermitize(corner - adj(Y) @ solve(H_prev, Y))


def sigma(data, r, j):
    """``Sigma_{r,j} = (-H_{r,j-1}^{-1} Y_{r,j}; I)``, with ``Sigma_{r,0} = I``."""
    inst = as_instance(data)

    def build():
        q = inst.q
        if j == 0:
            return np.eye(q, dtype=complex)
        top = -inst.solve_H(r, j - 1, inst.Y(r, j))
        return np.vstack([top, np.eye(q)])

    return inst._memo(("Sigma", r, j), build)


def schur_complement(data, r, j):
    """``H^_{r,j} = s^{(r)}_{2j} - Y^* H_{r,j-1}^{-1} Y``; ``H^_{r,0} = s^{(r)}_0``."""
    inst = as_instance(data)

    def build():
        s = inst.moments(r)
        if 2 * j > inst.m_r(r):
            raise InsufficientMomentsError(f"Schur complement H^_{r},{j} needs s^({r})_{2 * j}")
        if j == 0:
            return hermitize(s[0])
        Y = inst.Y(r, j)
        return hermitize(s[2 * j] - adj(Y) @ inst.solve_H(r, j - 1, Y))

    return inst._memo(("Hhat", r, j), build)


def poly_from_row(row, col):
    """The polynomial ``row R_j(z) col`` for a block row ``row`` and column ``col``.

    ``row`` is ``q x (j+1)q`` (or already split into blocks), ``col`` is
    ``(j+1)q x q``.
    """
    q = col.shape[1]
    rb = row if row.ndim == 3 else adj(blocks(adj(row), q))
    return MatrixPolynomial(kernels.sandwich_coeffs(rb, blocks(col, q)))


def _sigma_row(inst, r, j):
    return adj(sigma(inst, r, j))


def first_kind(data, r, j):
    """Monic ``P_{r,j}(z) = Sigma_{r,j}^* R_j(z) v_j``."""
    inst = as_instance(data)

    def build():
        # With v_j = (I, 0, ...) the sandwich collapses to the blocks of Sigma^*.
        return MatrixPolynomial(adj(blocks(sigma(inst, r, j), inst.q)))

    return inst._memo(("P", r, j), build)


def second_kind(data, r, j):
    """``Q_{r,j}`` with the sign and vector conventions of each family.

    For ``r = 2`` the z-dependent vector ``u^_{2,j} + z v_j s_0`` is split so
    that ``Q_{2,j} = -Sigma^* R u^_{2,j} - z P_{2,j}(z) s_0`` (degree j+1).
    """
    inst = as_instance(data)

    def build():
        row = _sigma_row(inst, r, j)
        col = inst.u_r(r, j)
        base = poly_from_row(row, col)
        if r == 1:
            return -base
        if r == 2:
            s0 = inst.seq.s[0]
            return -base - MatrixPolynomial.monomial(1, np.eye(inst.q)) @ first_kind(inst, 2, j) @ s0
        return base

    return inst._memo(("Q", r, j), build)


def _tilde_sigma(inst, n):
    q = inst.q
    if n == 0:
        return np.eye(q, dtype=complex)
    Yt = np.vstack(inst.seq.s[n + 1:2 * n + 1])
    if Yt.shape[0] != n * q:
        raise InsufficientMomentsError("tilde polynomial needs s_{2n}")
    return np.vstack([-inst.solve_Ht(1, n - 1, Yt), np.eye(q)])


def tilde_second_kind(data, n):
    """``Q~_{2,n}(z) = -Sigma~_n^* R_n(z) u_n`` built on the shifted Hankel layout."""
    inst = as_instance(data)
    return inst._memo(("Qt2", n), lambda: -poly_from_row(adj(_tilde_sigma(inst, n)), inst.u(n)))


def tilde_schur_complement(data, n):
    """Schur complement of the corner ``s_{2n+1}`` inside ``H~_{1,n}``."""
    inst = as_instance(data)
    s = inst.seq.s
    if 2 * n + 1 > inst.m:
        raise InsufficientMomentsError(f"needs s_{2 * n + 1}")
    if n == 0:
        return hermitize(s[1])
    Yt = np.vstack(s[n + 1:2 * n + 1])
    return hermitize(s[2 * n + 1] - adj(Yt) @ inst.solve_Ht(1, n - 1, Yt))


@dataclass(frozen=True)
class OmpFamily:
    """``P_{r,0..n_max}``, ``Q_{r,0..n_max}``, the ``Sigma`` columns and Schur complements."""

    r: int
    n_max: int
    P: tuple
    Q: tuple
    Sigma: tuple
    Hhat: tuple

    @classmethod
    def build(cls, data, r, n_max=None):
        inst = as_instance(data)
        if n_max is None:
            n_max = (inst.m_r(r) + 1) // 2
        P, Q, S, Hh = [], [], [], []
        for j in range(n_max + 1):
            P.append(first_kind(inst, r, j))
            Q.append(second_kind(inst, r, j))
            S.append(sigma(inst, r, j))
            Hh.append(schur_complement(inst, r, j) if 2 * j <= inst.m_r(r) else None)
        return cls(r, n_max, tuple(P), tuple(Q), tuple(S), tuple(Hh))

    def degrees(self):
        return [(p.degree, qq.degree) for p, qq in zip(self.P, self.Q)]
