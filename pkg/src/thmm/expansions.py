"""Closed-form power-series coefficients of the resolvent matrices at 0 and at a."""

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .blockkit import adj, make_shift, make_v
from .instance import solve
from .omp import as_instance, first_kind, second_kind
from .resolvent import U_even_poly, U_odd_poly, V_even_poly, V_odd_poly, odd_coupling, residual

__all__ = [
    "SeriesCoefficients",
    "series_even_at_zero",
    "series_odd_at_zero",
    "series_even_at_a",
    "series_odd_at_a",
    "extract_at_zero",
    "extract_at_a",
    "general_even_coefficient",
    "even_entries_dense",
    "compare",
]


@dataclass(frozen=True)
class SeriesCoefficients:
    """Expansion ``sum_j coeffs[j] (z - center)^j``; ``sources[j]`` names the formula used."""

    center: float
    parity: str
    coeffs: list
    sources: list = field(default_factory=list)

    def __len__(self):
        return len(self.coeffs)

    def array(self):
        return np.array(self.coeffs)

    def evaluate(self, z):
        acc = np.zeros_like(self.coeffs[0])
        w = z - self.center
        for c in reversed(self.coeffs):
            acc = acc * w + c
        return acc


def _tpow(n, q, k):
    """``(T_n^*)^k``, zero once ``k > n``."""
    return np.linalg.matrix_power(adj(make_shift(n, q)), k) if k >= 0 else None


def _even_parts(inst):
    n, q, a, b = inst.n, inst.q, inst.a, inst.b
    v = make_v(n, q)
    u = inst.u(n)
    Ht = inst.Ht(1, n)
    Htu = inst.solve_Ht(1, n, u)
    Kv = inst.solve_H(4, n, Ht @ inst.solve_H(3, n, v))
    return n, q, a, b, v, u, Htu, Kv


def _poly2(n, q, a, b):
    """``I - (a+b) T^* + ab T^{*2}``."""
    Ts = adj(make_shift(n, q))
    return np.eye((n + 1) * q) - (a + b) * Ts + a * b * Ts @ Ts


def _general_even(inst, j, parts):
    n, q, a, b, v, u, Htu, Kv = parts
    poly = _poly2(n, q, a, b)
    top_left = adj(v) @ _tpow(n, q, j - 1) @ Htu
    top_right = adj(v) @ _tpow(n, q, j - 2) @ poly @ Kv
    bot_left = adj(u) @ _tpow(n, q, j) @ Htu
    bot_right = adj(u) @ _tpow(n, q, j - 1) @ poly @ Kv
    return np.block([[top_left, top_right], [bot_left, bot_right]])


def series_even_at_zero(data):
    """``A~_0 .. A~_{n+2}`` for ``m = 2n+1``.

    ``A~_0``, ``A~_1``, ``A~_{n+1}`` and ``A~_{n+2}`` use their dedicated
    forms, ``A~_j`` for ``2 <= j <= n-1`` the general block form. ``A~_n``
    for ``n >= 2`` has no closed form of its own and is read off the
    assembled polynomial.
    """
    inst = as_instance(data)
    parts = _even_parts(inst)
    n, q, a, b, v, u, Htu, Kv = parts
    I = np.eye(q)
    Ts = adj(make_shift(n, q))
    H1, Ht = inst.H(1, n), inst.Ht(1, n)
    coeffs, sources = [None] * (n + 3), [None] * (n + 3)

    H3v = inst.solve_H(3, n, v)
    corner = I + a * b * adj(u) @ (Ts @ inst.solve_H(4, n, Ht @ H3v) - inst.solve_H(4, n, H1 @ H3v))
    coeffs[0] = np.block([[I, a * b * adj(v) @ Kv], [adj(u) @ Htu, corner]])
    sources[0] = "A0"
    coeffs[1] = np.block([
        [adj(v) @ Htu, adj(v) @ (a * b * Ts - (a + b) * np.eye((n + 1) * q)) @ Kv],
        [adj(u) @ Ts @ Htu, adj(u) @ _poly2(n, q, a, b) @ Kv],
    ])
    sources[1] = "A1"
    Z = np.zeros((q, q))
    coeffs[n + 2] = np.block([[Z, adj(v) @ _tpow(n, q, n) @ Kv], [Z, Z]])
    sources[n + 2] = "A_{n+2}"
    if n >= 1:
        top_right = adj(v) @ _tpow(n, q, n - 1) @ (np.eye((n + 1) * q) - (a + b) * Ts) @ Kv
        coeffs[n + 1] = np.block([
            [adj(v) @ _tpow(n, q, n) @ Htu, top_right],
            [Z, adj(u) @ _tpow(n, q, n) @ Kv],
        ])
        sources[n + 1] = "A_{n+1}"
    for j in range(2, n):
        coeffs[j] = _general_even(inst, j, parts)
        sources[j] = "A_j"
    if n >= 2:
        coeffs[n] = extract_at_zero(inst)[n]
        sources[n] = "extraction"
    return SeriesCoefficients(0.0, "even", coeffs, sources)


def general_even_coefficient(data, j):
    """The general block form of ``A~_j``, valid for every ``j >= 2``."""
    inst = as_instance(data)
    return _general_even(inst, j, _even_parts(inst))


def series_odd_at_zero(data):
    """``B~_0 = C_1 D_1`` and ``B~_j`` (``1 <= j <= n+1``) from the factored triple product."""
    inst = as_instance(data)
    cp = odd_coupling(inst)
    n, q = inst.n, inst.q
    v = make_v(n, q)
    u1 = inst.u_r(1, n)
    I = np.eye((n + 1) * q)
    mid = np.block([[I, -I], [I, -I]])
    right = np.block([[inst.solve_H(1, n, u1), np.zeros_like(u1)], [np.zeros_like(v), inst.solve_H(1, n, v)]])
    coeffs, sources = [cp.CD], ["B0"]
    for j in range(1, n + 2):
        Tp = _tpow(n, q, j - 1)
        left = np.block([
            [adj(v) @ Tp, np.zeros((q, (n + 1) * q))],
            [np.zeros((q, (n + 1) * q)), adj(u1) @ Tp],
        ])
        coeffs.append(left @ mid @ right @ cp.CD)
        sources.append("B_j")
    return SeriesCoefficients(0.0, "odd", coeffs, sources)


def _derivative_value(poly, a, k):
    """``X^{*[k]}(a)``, the k-th derivative of ``z -> X(conj z)^*`` at ``a``."""
    return poly.adjoint().derivative(k)(a)


def series_even_at_a(data):
    """``C~_0 .. C~_{n+2}`` from derivatives of ``P_{1,n+1}``, ``Q_{1,n+1}``, ``P_{2,n}``, ``Q_{2,n}`` at ``a``.

    Every coefficient uses the general derivative rule, including the
    top-left block of ``C~_{n+1}`` which is nonzero because ``Q_{2,n}`` has
    degree ``n+1``.
    """
    inst = as_instance(data)
    n, q, a, b = inst.n, inst.q, inst.a, inst.b
    P1, Q1 = first_kind(inst, 1, n + 1), second_kind(inst, 1, n + 1)
    P2, Q2 = first_kind(inst, 2, n), second_kind(inst, 2, n)
    inv_Q2a = solve(adj(Q2(a)), np.eye(q))
    inv_P1a = solve(adj(P1(a)), np.eye(q))
    coeffs, sources = [], []
    for j in range(n + 3):
        f = 1.0 / factorial(j)
        dQ2 = _derivative_value(Q2, a, j)
        dQ1 = _derivative_value(Q1, a, j)
        dP1 = _derivative_value(P1, a, j)
        low = np.zeros((q, q), dtype=complex)
        if j >= 2:
            low = low + (j - 1) * _derivative_value(P2, a, j - 2)
        if j >= 1:
            low = low - (b - a) * _derivative_value(P2, a, j - 1)
        low = j * low
        coeffs.append(f * np.block([[dQ2 @ inv_Q2a, -dQ1 @ inv_P1a], [low @ inv_Q2a, dP1 @ inv_P1a]]))
        sources.append("C_j")
    return SeriesCoefficients(a, "even", coeffs, sources)


def series_odd_at_a(data):
    """``D~_0 .. D~_{n+1}`` from derivatives of ``P_{3,n}``, ``Q_{3,n}``, ``P_{4,n}``, ``Q_{4,n}`` at ``a``."""
    inst = as_instance(data)
    n, q, a, b = inst.n, inst.q, inst.a, inst.b
    P3, Q3 = first_kind(inst, 3, n), second_kind(inst, 3, n)
    P4, Q4 = first_kind(inst, 4, n), second_kind(inst, 4, n)
    inv_Q4a = solve(adj(Q4(a)), np.eye(q))
    inv_P3a = solve(adj(P3(a)), np.eye(q))
    coeffs, sources = [], []
    for j in range(n + 2):
        f = 1.0 / factorial(j)
        tl = _derivative_value(Q4, a, j) @ inv_Q4a
        tr = _derivative_value(Q3, a, j) @ inv_P3a / (b - a)
        bl = j * _derivative_value(P4, a, j - 1) @ inv_Q4a if j >= 1 else np.zeros((q, q))
        br = _derivative_value(P3, a, j)
        if j >= 1:
            br = br - j / (b - a) * _derivative_value(P3, a, j - 1)
        coeffs.append(f * np.block([[tl, tr], [bl, br @ inv_P3a]]))
        sources.append("D_j")
    return SeriesCoefficients(a, "odd", coeffs, sources)


def extract_at_zero(data):
    """Coefficients of the assembled ``V`` polynomial, padded to the expected count."""
    inst = as_instance(data)
    if inst.parity == "even":
        poly, count = V_even_poly(inst)[0], inst.n + 3
    else:
        poly, count = V_odd_poly(inst), inst.n + 2
    return poly.padded(max(count, poly.coeffs.shape[0]))[:count]


def extract_at_a(data):
    """Taylor coefficients of the assembled ``U`` polynomial around ``a`` (binomial recentering)."""
    inst = as_instance(data)
    if inst.parity == "even":
        poly, count = U_even_poly(inst), inst.n + 3
    else:
        poly, count = U_odd_poly(inst), inst.n + 2
    c = poly.taylor_coefficients(inst.a)
    out = np.zeros((max(count, len(c)),) + c.shape[1:], dtype=complex)
    out[:len(c)] = c
    return out[:count]


def even_entries_dense(data, z):
    """Entries of ``V^{(2n+1)}(z)`` from the four direct expressions in ``H_{3,n}``, ``H_{4,n}``.

    Independent of the coupling construction; used as an oracle.
    """
    inst = as_instance(data)
    n, q, a, b = inst.n, inst.q, inst.a, inst.b
    v, u = make_v(n, q), inst.u(n)
    I = np.eye(q)
    Ts = adj(make_shift(n, q))
    Rs = np.linalg.matrix_power(np.eye((n + 1) * q) - np.conj(z) * make_shift(n, q), -1)
    Rs = adj(Rs)
    Hmix = (b * inst.H(4, n) + a * inst.H(3, n)) / (b - a)
    Hu = solve(Hmix, u)
    inv_mix = (a * inst.solve_H(4, n, v) + b * inst.solve_H(3, n, v)) / (b - a)
    eye = np.eye((n + 1) * q)
    mix = (a * (z - b) * (eye - a * Ts) @ inst.solve_H(4, n, v)
           + b * (z - a) * (eye - b * Ts) @ inst.solve_H(3, n, v)) / (b - a)
    al = I + z * adj(v) @ Rs @ Hu
    ga = adj(u) @ Rs @ Hu
    be = (z - b) * (z - a) * adj(v) @ Rs @ inv_mix
    de = I + adj(u) @ Rs @ mix
    return np.block([[al, be], [ga, de]])


def compare(series, extracted):
    """Per-coefficient residuals between a closed-form series and extracted coefficients."""
    return [residual(c, e) for c, e in zip(series.coeffs, extracted)]
