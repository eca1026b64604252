"""Exact scalar oracles built from a finite measure, independent of the Hankel machinery.

Polynomials are coefficient lists of ``Fraction`` in increasing powers.
"""

from fractions import Fraction


def padd(p, q):
    n = max(len(p), len(q))
    return [(p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0) for k in range(n)]


def pscale(p, c):
    return [c * x for x in p]


def pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def peval(p, z):
    acc = 0
    for c in reversed(p):
        acc = acc * z + c
    return acc


def weight(r, a, b):
    """``p_r`` as a coefficient list."""
    return {1: [Fraction(1)], 2: [-a * b, a + b, Fraction(-1)], 3: [b, Fraction(-1)], 4: [-a, Fraction(1)]}[r]


class ScalarMeasure:
    """``sum_k w_k delta_{t_k}`` on ``[a, b]`` with rational data."""

    def __init__(self, a, b, atoms):
        self.a, self.b = Fraction(a), Fraction(b)
        self.atoms = [(Fraction(t), Fraction(w)) for t, w in atoms]

    def moments(self, m):
        return [sum(w * t ** j for t, w in self.atoms) for j in range(m + 1)]

    def inner(self, r, p, q):
        pr = weight(r, self.a, self.b)
        return sum(w * peval(pr, t) * peval(p, t) * peval(q, t) for t, w in self.atoms)

    def monic(self, r, j):
        """Monic orthogonal polynomial of degree ``j`` by Gram-Schmidt on monomials."""
        basis = []
        for k in range(j + 1):
            p = [Fraction(0)] * k + [Fraction(1)]
            for e in basis:
                p = padd(p, pscale(e, -self.inner(r, p, e) / self.inner(r, e, e)))
            basis.append(p)
        return basis[j]

    def second_kind(self, r, P):
        """``eps_r * int (p_r(t)P(t) - p_r(z)P(z)) / (t - z) dsigma(t)``; eps = +1 for r = 1, 2."""
        f = pmul(weight(r, self.a, self.b), P)
        out = [Fraction(0)]
        for t, w in self.atoms:
            # (f(t) - f(z)) / (t - z) = (f(z) - f(t)) / (z - t), by synthetic division.
            g = list(f)
            g[0] -= peval(f, t)
            quot = [Fraction(0)] * (len(g) - 1)
            acc = g[-1]
            for k in range(len(g) - 2, -1, -1):
                quot[k] = acc
                acc = g[k] + t * acc
            out = padd(out, pscale(quot, w) if quot else [Fraction(0)])
        return out if r in (1, 2) else pscale(out, -1)

    def resolvent_U(self, m):
        """The four blocks of ``U`` for moments ``s_0..s_m`` as coefficient lists."""
        n = m // 2
        a, b = self.a, self.b
        if m % 2:
            P1 = self.monic(1, n + 1)
            Q1 = self.second_kind(1, P1)
            P2 = self.monic(2, n)
            Q2 = self.second_kind(2, P2)
            qa, pa = peval(Q2, a), peval(P1, a)
            return (pscale(Q2, 1 / qa), pscale(Q1, -1 / pa),
                    pscale(pmul([a * b, -(a + b), Fraction(1)], P2), 1 / qa), pscale(P1, 1 / pa))
        P3 = self.monic(3, n)
        Q3 = self.second_kind(3, P3)
        P4 = self.monic(4, n)
        Q4 = self.second_kind(4, P4)
        qa, pa = peval(Q4, a), peval(P3, a)
        return (pscale(Q4, 1 / qa), pscale(Q3, 1 / (pa * (b - a))),
                pscale(pmul([-a, Fraction(1)], P4), 1 / qa), pscale(pmul([b, Fraction(-1)], P3), 1 / (pa * (b - a))))


FIXTURE = ScalarMeasure(0, 1, [(Fraction(1, 4), 1), (Fraction(3, 4), 1)])
