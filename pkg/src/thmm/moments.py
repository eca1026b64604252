"""Moment sequences on [a, b], their perturbed transforms and Hankel layouts."""

from dataclasses import dataclass, field
from math import ceil

import numpy as np

from . import kernels
from .blockkit import adj, hermitize, is_hermitian, make_shift, make_truncations, make_v, shift_resolvent

__all__ = [
    "InsufficientMomentsError",
    "Interval",
    "MomentSequence",
    "DiscreteMatrixMeasure",
    "HankelBundle",
    "UVectors",
    "SolvabilityVerdict",
    "moments_from_measure",
    "transform_moments",
    "hankel_matrix",
    "hankel",
    "u_vectors",
    "check_solvability",
    "random_hausdorff_sequence",
    "is_positive_definite",
    "min_eigenvalue",
    "condition_number",
]

PD_TOL = 1e-10
COND_LIMIT = 1e12


class InsufficientMomentsError(ValueError):
    """Raised when a quantity needs moments beyond the given order."""


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")

    def contains(self, t):
        return self.a <= t <= self.b


@dataclass(frozen=True)
class MomentSequence:
    """Hermitian q x q moments ``s_0, ..., s_m`` of a problem on ``interval``."""

    interval: Interval
    s: np.ndarray
    hermit_tol: float = None

    def __post_init__(self):
        s = np.array(self.s, dtype=complex)
        if s.ndim != 3 or s.shape[1] != s.shape[2] or s.shape[0] == 0:
            raise ValueError(f"moments must have shape (m+1, q, q), got {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("moments must be finite")
        for j, sj in enumerate(s):
            if not is_hermitian(sj, self.hermit_tol):
                raise ValueError(f"moment s_{j} is not hermitian")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @property
    def q(self):
        return self.s.shape[1]

    @property
    def m(self):
        return self.s.shape[0] - 1

    @property
    def a(self):
        return self.interval.a

    @property
    def b(self):
        return self.interval.b

    @property
    def n(self):
        return self.m // 2

    @property
    def parity(self):
        """``'even'`` for ``m = 2n+1`` (even count of moments), ``'odd'`` for ``m = 2n``."""
        return "even" if self.m % 2 else "odd"


@dataclass(frozen=True)
class DiscreteMatrixMeasure:
    """``sum_k W_k delta_{t_k}`` with hermitian PSD weights on ``interval``."""

    interval: Interval
    t: np.ndarray
    W: np.ndarray
    psd_tol: float = 1e-12

    def __post_init__(self):
        t = np.array(self.t, dtype=float).reshape(-1)
        W = np.array(self.W, dtype=complex)
        if W.size == 0:
            W = W.reshape(0, *(W.shape[1:] if W.ndim == 3 else (1, 1)))
        if W.ndim != 3 or W.shape[0] != t.shape[0] or W.shape[1] != W.shape[2]:
            raise ValueError("weights must have shape (k, q, q) matching the atoms")
        for tk in t:
            if not self.interval.contains(tk):
                raise ValueError(f"atom {tk} lies outside [{self.interval.a}, {self.interval.b}]")
        if len(np.unique(t)) != len(t):
            raise ValueError("atoms must be pairwise distinct")
        for k, w in enumerate(W):
            if not is_hermitian(w):
                raise ValueError(f"weight {k} is not hermitian")
            scale = max(np.abs(w).max(initial=0.0), 1.0)
            if np.linalg.eigvalsh(hermitize(w)).min() < -self.psd_tol * scale:
                raise ValueError(f"weight {k} is not positive semidefinite")
        t.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "W", W)

    @property
    def q(self):
        return self.W.shape[1]

    def density_factor(self, r):
        """Scalar factor turning sigma into sigma_r at the atoms."""
        a, b, t = self.interval.a, self.interval.b, self.t
        return {1: np.ones_like(t), 2: (b - t) * (t - a), 3: b - t, 4: t - a}[r]

    def perturbed(self, r):
        """The measure ``sigma_r``; atoms where the density vanishes are dropped."""
        f = self.density_factor(r)
        keep = f > 0
        return DiscreteMatrixMeasure(self.interval, self.t[keep], f[keep, None, None] * self.W[keep])

    def moments(self, m):
        powers = self.t[None, :] ** np.arange(m + 1)[:, None]
        s = np.einsum("jk,kab->jab", powers, self.W)
        return hermitize(s)

    def stieltjes(self, z):
        """``int sigma(dt) / (t - z)`` by atom summation."""
        return np.einsum("k,kab->ab", 1.0 / (self.t - z), self.W)

    def inner(self, P, Q):
        """Matrix inner product ``sum_k P(t_k) W_k Q(t_k)^*``."""
        Pv = P.evaluate_many(self.t)
        Qv = Q.evaluate_many(self.t)
        return np.einsum("kab,kbc,kdc->ad", Pv, self.W, np.conj(Qv))


def moments_from_measure(mu, m):
    """Moments ``s_j = sum_k t_k^j W_k`` for ``j = 0..m``."""
    return MomentSequence(mu.interval, mu.moments(m))


def transform_moments(seq, r):
    """Moments of the perturbed measure sigma_r.

    r=1 identity; r=2 order m-2 via ``-ab s_j + (a+b) s_{j+1} - s_{j+2}``;
    r=3 ``b s_j - s_{j+1}`` and r=4 ``-a s_j + s_{j+1}``, both order m-1.
    """
    a, b, s = seq.a, seq.b, seq.s
    if r == 1:
        return seq
    if r == 2:
        if seq.m < 2:
            raise InsufficientMomentsError("r=2 needs moments up to order 2")
        t = -a * b * s[:-2] + (a + b) * s[1:-1] - s[2:]
    elif r in (3, 4):
        if seq.m < 1:
            raise InsufficientMomentsError(f"r={r} needs moments up to order 1")
        t = b * s[:-1] - s[1:] if r == 3 else -a * s[:-1] + s[1:]
    else:
        raise ValueError(f"r must be in 1..4, got {r}")
    return MomentSequence(seq.interval, hermitize(t))


def hankel_matrix(s, rows, cols=None, shift=0):
    """Block matrix with block ``(k, l) = s[k + l + shift]``."""
    cols = rows if cols is None else cols
    if rows + cols - 2 + shift >= len(s):
        raise InsufficientMomentsError(
            f"{rows}x{cols} block layout with shift {shift} needs moments up to "
            f"{rows + cols - 2 + shift}, have {len(s) - 1}")
    return kernels.hankel_dense(s, rows, cols, shift)


@dataclass(frozen=True)
class HankelBundle:
    r: int
    j: int
    H: np.ndarray
    Htilde: np.ndarray = None
    Y: np.ndarray = None


def hankel(seq_r, j, r=1):
    """``H_{r,j}``, ``H~_{r,j}`` (if moments allow) and ``Y_{r,j}`` (j >= 1).

    ``seq_r`` must already be the r-transformed sequence.
    """
    s = seq_r.s
    H = hermitize(hankel_matrix(s, j + 1))
    Ht = hermitize(hankel_matrix(s, j + 1, shift=1)) if 2 * j + 1 <= seq_r.m else None
    Y = hankel_matrix(s, j, 1, shift=j) if j >= 1 else None
    return HankelBundle(r, j, H, Ht, Y)


@dataclass(frozen=True)
class UVectors:
    """The moment block columns built from ``u_j = -(s_0; ...; s_j)``."""

    j: int
    u: np.ndarray
    u1: np.ndarray
    u2hat: np.ndarray
    u3: np.ndarray
    u4: np.ndarray
    s0: np.ndarray

    def u2(self, z):
        """``u_{2,j}(z) = u^_{2,j} + z v_j s_0``."""
        if self.u2hat is None:
            raise InsufficientMomentsError("u_2 needs s_{j+1}")
        q = self.s0.shape[0]
        return self.u2hat + z * (make_v(self.j, q) @ self.s0)


def _u(s, j):
    if j > len(s) - 1:
        raise InsufficientMomentsError(f"u_{j} needs s_{j}")
    return -s[:j + 1].reshape(-1, s.shape[2])


def u_vectors(seq, j, z=None):
    """Return :class:`UVectors` for order ``j``; ``u2hat`` is None without s_{j+1}.

    When ``z`` is given the result also carries ``u_{2,j}(z)`` as ``(rec, u2)``.
    """
    s, q, a, b = seq.s, seq.q, seq.a, seq.b
    u = _u(s, j)
    T = make_shift(j, q)
    eye = np.eye((j + 1) * q)
    u1 = T @ u
    u3 = -(eye - b * T) @ u
    u4 = (eye - a * T) @ u
    u2hat = None
    if j + 1 <= seq.m:
        T1 = make_shift(j + 1, q)
        eye1 = np.eye((j + 2) * q)
        L1, _ = make_truncations(j + 1, q)
        u2hat = -adj(L1) @ (eye1 - b * T1) @ (eye1 - a * T1) @ _u(s, j + 1)
    rec = UVectors(j, u, u1, u2hat, u3, u4, s[0].copy())
    if z is None:
        return rec
    return rec, rec.u2(z)


def min_eigenvalue(H):
    return float(np.linalg.eigvalsh(hermitize(H)).min())


def is_positive_definite(H, tol=PD_TOL):
    """Smallest eigenvalue of the hermitized matrix exceeds ``tol * ||H||_2``."""
    scale = np.linalg.norm(H, 2)
    return scale > 0 and min_eigenvalue(H) > tol * scale


def condition_number(M):
    """1-norm condition number; ``inf`` for exactly singular input."""
    try:
        return float(np.real(np.linalg.cond(M, 1)))
    except np.linalg.LinAlgError:
        return float("inf")


@dataclass(frozen=True)
class SolvabilityVerdict:
    parity: str
    n: int
    pd: bool
    psd: bool
    min_eigs: list
    assumptions: dict = field(default_factory=dict)
    conditions: dict = field(default_factory=dict)
    definite: dict = field(default_factory=dict)

    @property
    def failures(self):
        """Names of the Hankel blocks that are not positive definite."""
        return [name for name, ok in self.definite.items() if not ok]

    @property
    def assumptions_ok(self):
        """Assumptions required by the parity (None entries count as unknown)."""
        need = ["H1tilde"] if self.parity == "even" else ["Gamma", "Gamma_diff"]
        return all(self.assumptions.get(k) is True for k in need)

    def to_dict(self):
        return {
            "parity": self.parity,
            "n": self.n,
            "pd": self.pd,
            "psd": self.psd,
            "min_eigs": [[name, val] for name, val in self.min_eigs],
            "failures": self.failures,
            "assumptions": self.assumptions,
            "conditions": self.conditions,
        }


def _gamma_matrix(seq, n, H1, point):
    """``I + x v_n^* R_n(x)^* H_{1,n}^{-1} u_{1,n}`` for real ``x``."""
    q = seq.q
    v = make_v(n, q)
    R = shift_resolvent(n, q, point)
    u1 = u_vectors(seq, n).u1
    return np.eye(q) + point * adj(v) @ adj(R) @ np.linalg.solve(H1, u1)


def check_solvability(seq, tol=PD_TOL):
    """Classify a sequence as Hausdorff positive (semi)definite and test the assumptions."""
    if seq.m < 1:
        raise ValueError("need at least two moments (m >= 1)")
    n, parity = seq.n, seq.parity
    if parity == "odd":
        names = [(f"H_1,{n}", 1, n), (f"H_2,{n - 1}", 2, n - 1)]
    else:
        names = [(f"H_3,{n}", 3, n), (f"H_4,{n}", 4, n)]
    min_eigs, flags = [], {}
    pd = psd = True
    for name, r, j in names:
        H = hankel(transform_moments(seq, r), j).H
        lam = min_eigenvalue(H)
        scale = np.linalg.norm(H, 2)
        ok = scale > 0 and lam > tol * scale
        pd &= ok
        psd &= lam >= -tol * max(scale, 1e-300)
        min_eigs.append((name, lam))
        flags[name] = bool(ok)

    assumptions, conds = {}, {}
    H1 = hankel(seq, n).H
    if 2 * n + 1 <= seq.m:
        ht = [hankel_matrix(seq.s, n + 1, shift=1)]
        if n >= 1:
            ht.append(hankel_matrix(seq.s, n, shift=1))
        cs = [condition_number(m) for m in ht]
        conds["H1tilde"] = max(cs)
        assumptions["H1tilde"] = bool(max(cs) < COND_LIMIT)
    else:
        assumptions["H1tilde"] = None
    if n >= 1 and condition_number(H1) < COND_LIMIT:
        ga = _gamma_matrix(seq, n, H1, seq.a)
        gb = _gamma_matrix(seq, n, H1, seq.b)
        conds["Gamma"] = condition_number(ga)
        assumptions["Gamma"] = bool(conds["Gamma"] < COND_LIMIT)
        if assumptions["Gamma"] and condition_number(gb) < COND_LIMIT:
            v = make_v(n, seq.q)
            core = lambda x: adj(v) @ adj(shift_resolvent(n, seq.q, x)) @ np.linalg.solve(H1, v)
            diff = seq.b * np.linalg.solve(gb, core(seq.b)) - seq.a * np.linalg.solve(ga, core(seq.a))
            conds["Gamma_diff"] = condition_number(diff)
            assumptions["Gamma_diff"] = bool(conds["Gamma_diff"] < COND_LIMIT)
        else:
            assumptions["Gamma_diff"] = False
    else:
        assumptions["Gamma"] = None
        assumptions["Gamma_diff"] = None

    return SolvabilityVerdict(parity, n, bool(pd), bool(psd), min_eigs, assumptions, conds, flags)


def random_hausdorff_sequence(q, m, interval, seed):
    """Seeded discrete measure with ``ceil(m/2)+2`` atoms and its moments.

    Atoms sit on a jittered uniform grid inside the open interval; weights are
    ``G G^*`` with complex Gaussian ``G``.
    """
    if q < 1 or m < 1:
        raise ValueError("need q >= 1 and m >= 1")
    rng = np.random.default_rng(seed)
    k = ceil(m / 2) + 2
    a, b = interval.a, interval.b
    cells = (np.arange(k) + 0.5 + rng.uniform(-0.3, 0.3, size=k)) / k
    t = a + (b - a) * cells
    G = rng.standard_normal((k, q, q)) + 1j * rng.standard_normal((k, q, q))
    W = hermitize(G @ adj(G))
    mu = DiscreteMatrixMeasure(interval, t, W)
    return mu, moments_from_measure(mu, m)
