"""Slow reference implementations written directly from the definitions.

Nothing here calls the package's transforms or operators; they are the
independent side of every cross-check.
"""

import math

import numpy as np


def bits(x, d):
    return [(x >> i) & 1 for i in range(d)]


def kappa(p, x, d):
    out = 1.0
    for b in bits(x, d):
        out *= p if b else 1 - p
    return out


def chi(p, S, x, d):
    out = 1.0
    for i in range(d):
        if (S >> i) & 1:
            out *= math.sqrt(p / (1 - p)) if not (x >> i) & 1 else -math.sqrt((1 - p) / p)
    return out


def expectation(values, p):
    d = len(values).bit_length() - 1
    return sum(kappa(p, x, d) * values[x] for x in range(len(values)))


def norm(values, p, j):
    d = len(values).bit_length() - 1
    return sum(kappa(p, x, d) * abs(values[x]) ** j for x in range(len(values))) ** (1 / j)


def fourier(values, p):
    """hat f(S) = E_p[f chi_S], double loop."""
    n = len(values)
    d = n.bit_length() - 1
    w = [kappa(p, x, d) for x in range(n)]
    return np.array([sum(w[x] * values[x] * chi(p, S, x, d) for x in range(n)) for S in range(n)])


def noise(values, p1, p2):
    """(R f)(x) = sum_y Pr[x -> y] f(y) with per-bit kernel [[1-p1, p1], [p2, 1-p2]]."""
    n = len(values)
    d = n.bit_length() - 1
    K = [[1 - p1, p1], [p2, 1 - p2]]
    out = np.zeros(n)
    for x in range(n):
        bx = bits(x, d)
        for y in range(n):
            pr = 1.0
            for a, b in zip(bx, bits(y, d)):
                pr *= K[a][b]
            out[x] += pr * values[y]
    return out


def tau(values, delta, p):
    n = len(values)
    d = n.bit_length() - 1
    c = fourier(values, p)
    c = np.array([c[S] * delta ** bin(S).count("1") for S in range(n)])
    return np.array([sum(c[S] * chi(p, S, x, d) for S in range(n)) for x in range(n)])


def fd_derivative(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


def bregman_from_phi(phi, x, y, h=1e-6):
    """phi(x) - phi(y) - phi'(y)(x - y) with phi' by central differences."""
    return phi(x) - phi(y) - fd_derivative(phi, y, h) * (x - y)


def cube_distance(mu, x, y, d):
    """sum over coordinates: mu when x_i = 0, y_i = 1; 1 when x_i = 1, y_i = 0."""
    return sum(mu if (a, b) == (0, 1) else 1.0 if (a, b) == (1, 0) else 0.0
               for a, b in zip(bits(x, d), bits(y, d)))


def dominates(q, p, d):
    return all(a >= b for a, b in zip(bits(q, d), bits(p, d)))


# closed-form scalar divergences, written out per generator
TABLE = {
    "l2": lambda x, y: 0.5 * (x - y) ** 2,
    "kl": lambda x, y: x * math.log(x / y) - x + y,
    "itakura-saito": lambda x, y: x / y - math.log(x / y) - 1,
    "exponential": lambda x, y: math.exp(x) - (x - y + 1) * math.exp(y),
    "bit-entropy": lambda x, y: x * math.log(x / y) + (1 - x) * math.log((1 - x) / (1 - y)),
}

PHI = {
    "l2": lambda x: 0.5 * x * x,
    "kl": lambda x: x * math.log(x) - x,
    "itakura-saito": lambda x: -math.log(x),
    "exponential": math.exp,
    "bit-entropy": lambda x: x * math.log(x) + (1 - x) * math.log(1 - x),
}
