"""Brute-force reference computations, independent of the pindist code paths.

Field elements use the same code convention (base-p digits, constant term
first) so results can be compared code for code, but the arithmetic here is
written from scratch with plain tuples and loops.
"""

from itertools import product


class GF:
    def __init__(self, p, modulus):
        self.p = p
        self.modulus = tuple(modulus)  # monic, constant term first
        self.k = len(modulus) - 1
        self.q = p**self.k

    def digits(self, a):
        return tuple((a // self.p**i) % self.p for i in range(self.k))

    def code(self, digits):
        return sum(c * self.p**i for i, c in enumerate(digits))

    def add(self, a, b):
        return self.code([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def sub(self, a, b):
        return self.code([(x - y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def mul(self, a, b):
        x, y = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.k)
        for i in range(self.k):
            for j in range(self.k):
                prod[i + j] += x[i] * y[j]
        # reduce using x^k = -(m_0 + ... + m_{k-1} x^{k-1})
        for deg in range(2 * self.k - 1, self.k - 1, -1):
            c = prod[deg] % self.p
            prod[deg] = 0
            for i in range(self.k):
                prod[deg - self.k + i] -= c * self.modulus[i]
        return self.code([c % self.p for c in prod[: self.k]])


def points(q, d):
    """All points of F_q^d in flat-index order (row-major)."""
    return list(product(range(q), repeat=d))


def norm(G, x):
    total = 0
    for c in x:
        total = G.add(total, G.mul(c, c))
    return total


def dist(G, x, y):
    return norm(G, [G.sub(a, b) for a, b in zip(x, y)])


def nu(G, E, y):
    counts = [0] * G.q
    for x in E:
        counts[dist(G, x, y)] += 1
    return counts


def second_moment_by_pairs(G, E, y):
    return sum(1 for x in E for z in E if dist(G, x, y) == dist(G, z, y))


def distance_set(G, E):
    return {dist(G, x, y) for x in E for y in E}


def pinned_set(G, E, y):
    return {dist(G, x, y) for x in E}


def bisector(G, d, x, z):
    return sum(1 for y in points(G.q, d) if dist(G, x, y) == dist(G, z, y))


def has_root(p, poly):
    return any(sum(c * r**i for i, c in enumerate(poly)) % p == 0 for r in range(p))
