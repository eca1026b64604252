"""Kovalishina matrices and the resolvent matrices at the points 0 and a."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .blockkit import adj, blocks, make_v, shift_resolvent, signature_matrices
from .instance import SingularMatrixError, right_adjoint_solve, solve
from .moments import COND_LIMIT, condition_number
from .omp import as_instance, first_kind, second_kind
from .polynomial import MatrixPolynomial

__all__ = [
    "AssumptionError",
    "ResolventEval",
    "EvenCoupling",
    "OddCoupling",
    "residual",
    "default_grid",
    "upper_half_plane_points",
    "conj_resolvent_coeffs",
    "kovalishina_poly",
    "kovalishina",
    "kovalishina_dense",
    "even_coupling",
    "odd_coupling",
    "V_even_poly",
    "V_even",
    "V_even_raw",
    "U_even_poly",
    "U_even",
    "V_odd_poly",
    "V_odd",
    "U_odd_poly",
    "U_odd",
    "resolvent_polys",
    "coupling_residual",
    "block_residuals",
    "j_property_check",
    "canonical_solution",
    "weight_polynomial",
]


class AssumptionError(ValueError):
    """An invertibility assumption required by a construction fails numerically."""


def residual(lhs, rhs):
    """``||lhs - rhs||_F / (1 + max(||lhs||_F, ||rhs||_F))``."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    nl, nr = np.linalg.norm(lhs), np.linalg.norm(rhs)
    return float(np.linalg.norm(lhs - rhs) / (1.0 + max(nl, nr)))


def default_grid(a, b, eps=1e-3):
    """25 points: five real parts across ``[a-1, b+1]`` times offsets ``0, +-0.5i, +-i``.

    Real points closer than ``eps`` to ``a`` or ``b`` are nudged by ``eps``.
    """
    pts = []
    for x in np.linspace(a - 1.0, b + 1.0, 5):
        for y in (0.0, 0.5, -0.5, 1.0, -1.0):
            if y == 0.0:
                for e in (a, b):
                    if abs(x - e) < eps:
                        x = e + eps
            pts.append(complex(x, y))
    return np.array(pts)


def upper_half_plane_points(a, b, count=10):
    """Deterministic points with positive imaginary part around the interval."""
    xs = np.linspace(a - 1.0, b + 1.0, count)
    ys = 0.1 + 1.9 * (np.arange(count) % 4) / 3.0
    return xs + 1j * ys


@dataclass(frozen=True)
class ResolventEval:
    z: complex
    M: np.ndarray

    @property
    def q(self):
        return self.M.shape[0] // 2

    @property
    def alpha(self):
        return self.M[:self.q, :self.q]

    @property
    def beta(self):
        return self.M[:self.q, self.q:]

    @property
    def gamma(self):
        return self.M[self.q:, :self.q]

    @property
    def delta(self):
        return self.M[self.q:, self.q:]


def _eval(poly, z):
    return ResolventEval(complex(z), poly(z))


def conj_resolvent_coeffs(x, w, q):
    """Coefficients in ``z`` of ``x^* R_j^*(conj z) w``.

    The z^l coefficient is ``(T^l x)^* w``; returns shape ``(j+1, cols(x), cols(w))``.
    """
    out = kernels.sandwich_coeffs(adj(blocks(w, q)), blocks(x, q))
    return adj(out)


def _shifted(c):
    """Multiply a coefficient array by ``z``."""
    return np.concatenate([np.zeros_like(c[:1]), c])


def kovalishina_poly(data, r, n):
    """``V~_r^{(n)}`` as a ``2q x 2q`` polynomial of degree ``n+1``.

    For ``r = 2`` the z-free vector ``u^_{2,n}`` takes the place of ``u_{2,n}``.
    """
    inst = as_instance(data)

    def build():
        q = inst.q
        u = inst.u_r(r, n)
        v = make_v(n, q)
        Hu = inst.solve_H(r, n, u)
        Hv = inst.solve_H(r, n, v)
        eye = np.zeros((n + 2, q, q), dtype=complex)
        eye[0] = np.eye(q)
        al = eye + _shifted(conj_resolvent_coeffs(v, Hu, q))
        be = -_shifted(conj_resolvent_coeffs(v, Hv, q))
        ga = _shifted(conj_resolvent_coeffs(u, Hu, q))
        de = eye - _shifted(conj_resolvent_coeffs(u, Hv, q))
        top = np.concatenate([al, be], axis=2)
        bot = np.concatenate([ga, de], axis=2)
        return MatrixPolynomial(np.concatenate([top, bot], axis=1))

    return inst._memo(("Vtilde", r, n), build)


def kovalishina(data, r, n, z):
    return _eval(kovalishina_poly(data, r, n), z)


def kovalishina_dense(data, r, n, z):
    """Direct evaluation of ``I - i z W^* R_n^*(conj z) H^{-1} W J`` with ``W = (v, u_r)``."""
    inst = as_instance(data)
    q = inst.q
    W = np.hstack([make_v(n, q), inst.u_r(r, n)])
    J, _ = signature_matrices(q)
    R = shift_resolvent(n, q, np.conj(z))
    return np.eye(2 * q) - 1j * z * adj(W) @ adj(R) @ inst.solve_H(r, n, W) @ J


def _require_parity(inst, parity):
    if inst.parity != parity:
        raise ValueError(f"construction needs the {parity} case (m = {'2n+1' if parity == 'even' else '2n'}), "
                         f"got m = {inst.m}")


def _check_invertible(M, name):
    c = condition_number(M)
    if not np.isfinite(c) or c >= COND_LIMIT:
        raise AssumptionError(f"{name} is numerically singular (cond={c:.3g})")


@dataclass(frozen=True)
class EvenCoupling:
    n: int
    M: np.ndarray
    N: np.ndarray
    C: np.ndarray
    D: np.ndarray
    d: np.ndarray
    d_adj_inv: np.ndarray
    Dfrak: np.ndarray

    @property
    def CD(self):
        return self.C @ self.D


@dataclass(frozen=True)
class OddCoupling:
    n: int
    Gamma_a: np.ndarray
    Gamma_b: np.ndarray
    M: np.ndarray
    N: np.ndarray
    C1: np.ndarray
    D1: np.ndarray
    d: np.ndarray
    d_adj_inv: np.ndarray
    Dfrak: np.ndarray

    @property
    def CD(self):
        return self.C1 @ self.D1


def _block2(a, b, c, d):
    return np.block([[a, b], [c, d]])


def even_coupling(data):
    """Coupling matrices for ``m = 2n+1``: ``M``, ``N``, ``C``, ``D``, ``d`` and the diagonal factor."""
    inst = as_instance(data)
    _require_parity(inst, "even")

    def build():
        n, q, a, b = inst.n, inst.q, inst.a, inst.b
        Ht = inst.Ht(1, n)
        _check_invertible(Ht, f"H~_1,{n}")
        if n >= 1:
            _check_invertible(inst.Ht(1, n - 1), f"H~_1,{n - 1}")
        u = inst.u(n)
        v = make_v(n, q)
        M = -a * adj(u) @ inst.solve_Ht(1, n, u)
        N = -b * adj(v) @ inst.solve_H(4, n, Ht @ inst.solve_H(3, n, v))
        I, Z = np.eye(q), np.zeros((q, q))
        C = _block2(I, Z, M, I)
        D = _block2(I, N, Z, I)
        P = first_kind(inst, 1, n + 1)
        Pa, P0 = P(a), P(0.0)
        _check_invertible(Pa, f"P_1,{n + 1}(a)")
        d = right_adjoint_solve(adj(P0), Pa)
        d_adj_inv = solve(P0, Pa)
        Dfrak = _block2(d_adj_inv, Z, Z, d)
        return EvenCoupling(n, M, N, C, D, d, d_adj_inv, Dfrak)

    return inst._memo(("even_coupling",), build)


def _gamma(inst, x):
    n, q = inst.n, inst.q
    v = make_v(n, q)
    Rx = adj(shift_resolvent(n, q, x))
    lead = np.eye(q) + x * adj(v) @ Rx @ inst.solve_H(1, n, inst.u_r(1, n))
    _check_invertible(lead, f"I + {x:g} v^* R^*({x:g}) H^-1 u_1")
    return solve(lead, adj(v) @ Rx @ inst.solve_H(1, n, v)), lead


def odd_coupling(data):
    """Coupling matrices for ``m = 2n``: ``Gamma_a``, ``Gamma_b``, ``M``, ``N``, ``C_1``, ``D_1``, ``d``."""
    inst = as_instance(data)
    _require_parity(inst, "odd")

    def build():
        n, q, a, b = inst.n, inst.q, inst.a, inst.b
        if n < 1:
            raise ValueError("the odd case needs n >= 1 (at least three moments)")
        Ga, _ = _gamma(inst, a)
        Gb, _ = _gamma(inst, b)
        diff = b * Gb - a * Ga
        _check_invertible(diff, "b Gamma_b - a Gamma_a")
        M = a * Ga
        N = solve(diff, np.eye(q))
        I, Z = np.eye(q), np.zeros((q, q))
        C1 = _block2(I, M, Z, I)
        D1 = _block2(I, Z, N, I)
        Q4 = second_kind(inst, 4, n)
        Q4a, Q40 = Q4(a), Q4(0.0)
        _check_invertible(Q4a, f"Q_4,{n}(a)")
        _check_invertible(Q40, f"Q_4,{n}(0)")
        d = right_adjoint_solve(adj(Q40), Q4a)
        d_adj_inv = solve(Q40, Q4a)
        Dfrak = _block2(d, Z, Z, d_adj_inv)
        return OddCoupling(n, Ga, Gb, M, N, C1, D1, d, d_adj_inv, Dfrak)

    return inst._memo(("odd_coupling",), build)


def V_even_poly(data):
    """``V^{(2n+1)}`` assembled coefficient-wise; returns ``(poly, remainder)``.

    The lower-left block is divided by ``(z - a)`` synthetically, so the point
    ``a`` is never evaluated as a quotient. ``remainder`` is the dropped
    division remainder and should vanish to roundoff.
    """
    inst = as_instance(data)

    def build():
        cp = even_coupling(inst)
        q, n, a = inst.q, inst.n, inst.a
        V4 = kovalishina_poly(inst, 4, n) @ cp.CD
        al, be, ga, de = (V4.block(i, k, q) for i, k in ((0, 0), (0, 1), (1, 0), (1, 1)))
        be = be.times_scalar_poly([-a, 1.0])
        ga, rem = ga.divide_linear(a)
        return MatrixPolynomial.from_blocks([[al, be], [ga, de]]), rem

    return inst._memo(("V_even",), build)


def V_even(data, z):
    return _eval(V_even_poly(data)[0], z)


def V_even_raw(data, z):
    """``diag(I, (z-a)^{-1}) V~_4(z) C D diag(I, (z-a))`` by direct evaluation (``z != a``)."""
    inst = as_instance(data)
    q, a = inst.q, inst.a
    if z == a:
        raise ZeroDivisionError("the conjugated form is undefined at z = a")
    cp = even_coupling(inst)
    V4 = kovalishina_dense(inst, 4, inst.n, z) @ cp.CD
    left = np.diag(np.r_[np.ones(q), np.full(q, 1.0 / (z - a))])
    right = np.diag(np.r_[np.ones(q), np.full(q, z - a)])
    return left @ V4 @ right


def U_even_poly(data):
    """``U^{(2n+1)}`` from ``P_{1,n+1}``, ``Q_{1,n+1}``, ``P_{2,n}`` and ``Q_{2,n}``."""
    inst = as_instance(data)
    _require_parity(inst, "even")

    def build():
        n, a, b = inst.n, inst.a, inst.b
        P1, Q1 = first_kind(inst, 1, n + 1), second_kind(inst, 1, n + 1)
        P2, Q2 = first_kind(inst, 2, n), second_kind(inst, 2, n)
        P1a, Q2a = P1(a), Q2(a)
        _check_invertible(P1a, f"P_1,{n + 1}(a)")
        _check_invertible(Q2a, f"Q_2,{n}(a)")
        inv_P1a = solve(adj(P1a), np.eye(inst.q))
        inv_Q2a = solve(adj(Q2a), np.eye(inst.q))
        al = Q2.adjoint() @ inv_Q2a
        be = -(Q1.adjoint() @ inv_P1a)
        ga = (P2.adjoint() @ inv_Q2a).times_scalar_poly([a * b, -(a + b), 1.0])
        de = P1.adjoint() @ inv_P1a
        return MatrixPolynomial.from_blocks([[al, be], [ga, de]])

    return inst._memo(("U_even",), build)


def U_even(data, z):
    return _eval(U_even_poly(data), z)


def V_odd_poly(data):
    """``V^{(2n)} = V~_1^{(n)} C_1 D_1``."""
    inst = as_instance(data)
    return inst._memo(("V_odd",), lambda: kovalishina_poly(inst, 1, inst.n) @ odd_coupling(inst).CD)


def V_odd(data, z):
    return _eval(V_odd_poly(data), z)


def U_odd_poly(data):
    """``U^{(2n)}`` from ``P_{3,n}``, ``Q_{3,n}``, ``P_{4,n}`` and ``Q_{4,n}``."""
    inst = as_instance(data)
    _require_parity(inst, "odd")

    def build():
        n, a, b = inst.n, inst.a, inst.b
        P3, Q3 = first_kind(inst, 3, n), second_kind(inst, 3, n)
        P4, Q4 = first_kind(inst, 4, n), second_kind(inst, 4, n)
        P3a, Q4a = P3(a), Q4(a)
        _check_invertible(P3a, f"P_3,{n}(a)")
        _check_invertible(Q4a, f"Q_4,{n}(a)")
        inv_P3a = solve(adj(P3a), np.eye(inst.q))
        inv_Q4a = solve(adj(Q4a), np.eye(inst.q))
        al = Q4.adjoint() @ inv_Q4a
        be = (Q3.adjoint() @ inv_P3a) * (1.0 / (b - a))
        ga = (P4.adjoint() @ inv_Q4a).times_scalar_poly([-a, 1.0])
        de = (P3.adjoint() @ inv_P3a).times_scalar_poly([b / (b - a), -1.0 / (b - a)])
        return MatrixPolynomial.from_blocks([[al, be], [ga, de]])

    return inst._memo(("U_odd",), build)


def U_odd(data, z):
    return _eval(U_odd_poly(data), z)


def resolvent_polys(data):
    """``(U, V, Dfrak)`` for the parity of the data."""
    inst = as_instance(data)
    if inst.parity == "even":
        return U_even_poly(inst), V_even_poly(inst)[0], even_coupling(inst).Dfrak
    return U_odd_poly(inst), V_odd_poly(inst), odd_coupling(inst).Dfrak


def coupling_residual(data, z_grid=None):
    """Max over the grid of the residual of ``U = frakJ V frakJ Dfrak``."""
    inst = as_instance(data)
    if z_grid is None:
        z_grid = default_grid(inst.a, inst.b)
    U, V, Df = resolvent_polys(inst)
    _, Jf = signature_matrices(inst.q)
    Us = U.evaluate_many(z_grid)
    Vs = V.evaluate_many(z_grid)
    return max(residual(u, Jf @ v @ Jf @ Df) for u, v in zip(Us, Vs))


def _blocks_of(M, q):
    return M[:q, :q], M[:q, q:], M[q:, :q], M[q:, q:]


def block_residuals(data, z_grid=None):
    """Per-block forms of the coupling, each built from pointwise Kovalishina blocks.

    Returns a dict ``name -> max residual`` with names ``dem1m..dem4m`` (even)
    or ``dem1..dem4`` (odd). Grid points at ``z = a`` are skipped for the
    blocks that carry ``(z - a)^{-1}``.
    """
    inst = as_instance(data)
    q, a, n = inst.q, inst.a, inst.n
    if z_grid is None:
        z_grid = default_grid(inst.a, inst.b)
    I = np.eye(q)
    out = {}
    if inst.parity == "even":
        cp = even_coupling(inst)
        U = U_even_poly(inst)
        M, N, d, dai = cp.M, cp.N, cp.d, cp.d_adj_inv
        names = ("dem1m", "dem2m", "dem3m", "dem4m")
        for name in names:
            out[name] = 0.0
        for z in z_grid:
            al, be, ga, de = _blocks_of(kovalishina_dense(inst, 4, n, z), q)
            Ua, Ub, Uc, Ud = _blocks_of(U(z), q)
            out["dem1m"] = max(out["dem1m"], residual(Ua, (ga @ N + de @ (I + M @ N)) @ dai))
            if z != a:
                out["dem2m"] = max(out["dem2m"], residual(Ub, (ga + de @ M) @ d / (z - a)))
            out["dem3m"] = max(out["dem3m"], residual(Uc, (z - a) * (al @ N + be @ (I + M @ N)) @ dai))
            out["dem4m"] = max(out["dem4m"], residual(Ud, (al + be @ M) @ d))
    else:
        cp = odd_coupling(inst)
        U = U_odd_poly(inst)
        M, N, d, dai = cp.M, cp.N, cp.d, cp.d_adj_inv
        for name in ("dem1", "dem2", "dem3", "dem4"):
            out[name] = 0.0
        for z in z_grid:
            al, be, ga, de = _blocks_of(kovalishina_dense(inst, 1, n, z), q)
            Ua, Ub, Uc, Ud = _blocks_of(U(z), q)
            out["dem1"] = max(out["dem1"], residual(Ua, (ga @ M + de) @ d))
            out["dem2"] = max(out["dem2"], residual(Ub, (ga @ (I + M @ N) + de @ N) @ dai))
            out["dem3"] = max(out["dem3"], residual(Uc, (al @ M + be) @ d))
            out["dem4"] = max(out["dem4"], residual(Ud, (al @ (I + M @ N) + be @ N) @ dai))
    return out


def j_property_check(data, r, n, z_grid=None, upper_points=None):
    """Check both signature properties of ``V~_r^{(n)}``.

    Returns ``(inverse_residual, max_eigenvalue)``. The inverse property is
    checked in product form, ``||V~(z) J V~(conj z)^* J - I||`` divided by
    ``1 + ||V~(z)|| ||J V~(conj z)^* J||``, which avoids the error an explicit
    inverse picks up from ``cond(V~(z))``. The second value is the largest
    eigenvalue of ``J - V~(z) J V~(z)^*`` over upper half-plane points,
    normalized by ``1 + ||V~(z)||^2``.
    """
    inst = as_instance(data)
    q = inst.q
    if z_grid is None:
        z_grid = default_grid(inst.a, inst.b)
    if upper_points is None:
        upper_points = upper_half_plane_points(inst.a, inst.b)
    J, _ = signature_matrices(q)
    V = kovalishina_poly(inst, r, n)
    inv_res = 0.0
    eye = np.eye(2 * q)
    for z in z_grid:
        Vz = V(z)
        W = J @ adj(V(np.conj(z))) @ J
        err = np.linalg.norm(Vz @ W - eye) / (1.0 + np.linalg.norm(Vz) * np.linalg.norm(W))
        inv_res = max(inv_res, float(err))
    top = -np.inf
    for z in upper_points:
        Vz = V(z)
        G = J - Vz @ J @ adj(Vz)
        lam = np.linalg.eigvalsh(0.5 * (G + adj(G))).max()
        top = max(top, lam / (1.0 + np.linalg.norm(Vz) ** 2))
    return inv_res, float(top)


def weight_polynomial(r, a, b):
    """Coefficients of ``p_r``: ``1``, ``(z-a)(b-z)``, ``b-z``, ``z-a``."""
    return {1: [1.0], 2: [-a * b, a + b, -1.0], 3: [b, -1.0], 4: [-a, 1.0]}[r]


def canonical_solution(data, r, z, n=None):
    """``p_r(z)^{-1} Q_{r,n}^*(conj z) P_{r,n}^{*-1}(conj z)``.

    ``n`` defaults to the largest order for which ``P_{r,n}`` is available.
    """
    inst = as_instance(data)
    a, b = inst.a, inst.b
    if np.imag(z) == 0 and a <= np.real(z) <= b:
        raise ValueError("z must lie off the interval [a, b]")
    if n is None:
        n = (inst.m_r(r) + 1) // 2
    P, Q = first_kind(inst, r, n), second_kind(inst, r, n)
    zc = np.conj(z)
    try:
        val = right_adjoint_solve(adj(Q(zc)), P(zc))
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"P_{r},{n}(conj z) is singular") from exc
    p = np.polyval(weight_polynomial(r, a, b)[::-1], z)
    return val / p
