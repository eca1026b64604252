"""Per-sequence cache of transformed moments, Hankel matrices and factored solves."""

import numpy as np
import scipy.linalg as sla

from .blockkit import adj, hermitize
from .moments import InsufficientMomentsError, MomentSequence, hankel_matrix, transform_moments, u_vectors

__all__ = ["Instance", "SingularMatrixError", "solve", "solve_hpd", "right_adjoint_solve"]

_ORDER_DROP = {1: 0, 2: 2, 3: 1, 4: 1}


class SingularMatrixError(np.linalg.LinAlgError):
    """A matrix required to be invertible is numerically singular."""


def solve(A, B):
    """``A^{-1} B`` by LU with a singularity check."""
    try:
        lu = sla.lu_factor(A, check_finite=False)
    except (ValueError, sla.LinAlgError) as exc:
        raise SingularMatrixError(str(exc)) from exc
    if np.min(np.abs(np.diag(lu[0]))) == 0.0:
        raise SingularMatrixError("exactly singular matrix")
    return sla.lu_solve(lu, B, check_finite=False)


def solve_hpd(H, B):
    """``H^{-1} B`` by Cholesky; falls back to LU when ``H`` is not numerically definite."""
    try:
        c = sla.cho_factor(hermitize(H), check_finite=False)
    except sla.LinAlgError:
        return solve(H, B)
    return sla.cho_solve(c, B, check_finite=False)


def right_adjoint_solve(X, Y):
    """``X Y^{*-1}`` computed as ``(Y^{-1} X^*)^*``."""
    return adj(solve(Y, adj(X)))


class _Factor:
    __slots__ = ("kind", "data", "matrix")

    def __init__(self, matrix, definite):
        self.matrix = matrix
        if definite:
            try:
                self.kind, self.data = "cho", sla.cho_factor(matrix, check_finite=False)
                return
            except sla.LinAlgError:
                pass
        lu = sla.lu_factor(matrix, check_finite=False)
        if np.min(np.abs(np.diag(lu[0]))) == 0.0:
            raise SingularMatrixError("exactly singular matrix")
        self.kind, self.data = "lu", lu

    def solve(self, B):
        if self.kind == "cho":
            return sla.cho_solve(self.data, B, check_finite=False)
        return sla.lu_solve(self.data, B, check_finite=False)


class Instance:
    """Lazily computed moment structure of one sequence.

    Every matrix is computed once and cached; callers must treat returned
    arrays as read-only.
    """

    def __init__(self, seq):
        if not isinstance(seq, MomentSequence):
            raise TypeError("expected a MomentSequence")
        self.seq = seq
        self.q, self.m, self.n = seq.q, seq.m, seq.n
        self.a, self.b = float(seq.a), float(seq.b)
        self.parity = seq.parity
        self._cache = {}

    def _memo(self, key, fn):
        try:
            return self._cache[key]
        except KeyError:
            val = fn()
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            self._cache[key] = val
            return val

    def m_r(self, r):
        return self.m - _ORDER_DROP[r]

    def moments(self, r):
        """``s^{(r)}`` as a ``(m_r + 1, q, q)`` array."""
        return self._memo(("s", r), lambda: np.array(transform_moments(self.seq, r).s))

    def H(self, r, j):
        if j < 0 or 2 * j > self.m_r(r):
            raise InsufficientMomentsError(f"H_{r},{j} needs moments of order {2 * j}, have {self.m_r(r)}")
        return self._memo(("H", r, j), lambda: hermitize(hankel_matrix(self.moments(r), j + 1)))

    def Ht(self, r, j):
        if j < 0 or 2 * j + 1 > self.m_r(r):
            raise InsufficientMomentsError(f"H~_{r},{j} needs moments of order {2 * j + 1}, have {self.m_r(r)}")
        return self._memo(("Ht", r, j), lambda: hermitize(hankel_matrix(self.moments(r), j + 1, shift=1)))

    def Y(self, r, j):
        if j < 1 or 2 * j - 1 > self.m_r(r):
            raise InsufficientMomentsError(f"Y_{r},{j} unavailable")
        return self._memo(("Y", r, j), lambda: hankel_matrix(self.moments(r), j, 1, shift=j))

    def _factor(self, name, r, j):
        def build():
            mat = self.H(r, j) if name == "H" else self.Ht(r, j)
            return _Factor(mat, definite=(name == "H"))
        return self._memo(("fac", name, r, j), build)

    def solve_H(self, r, j, B):
        """``H_{r,j}^{-1} B``."""
        return self._factor("H", r, j).solve(B)

    def solve_Ht(self, r, j, B):
        """``H~_{r,j}^{-1} B`` (not assumed definite)."""
        return self._factor("Ht", r, j).solve(B)

    def uvec(self, j):
        return self._memo(("u", j), lambda: u_vectors(self.seq, j))

    def u(self, j):
        return self.uvec(j).u

    def u_r(self, r, j):
        """``u_{r,j}``; for ``r = 2`` this is the z-free part ``u^_{2,j}``."""
        rec = self.uvec(j)
        out = {1: rec.u1, 2: rec.u2hat, 3: rec.u3, 4: rec.u4}[r]
        if out is None:
            raise InsufficientMomentsError(f"u^_2,{j} needs s_{j + 1}")
        return out
