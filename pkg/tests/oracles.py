"""Independent reference implementations used as test oracles.

Everything here is written as plain loops over the definitions, sharing no
code with the package.
"""

import itertools
from fractions import Fraction

import numpy as np


def naive_gramian(a, schedule):
    """``sum_k A^k B(K-1-k) B(K-1-k)^T (A^T)^k`` term by term."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    K = len(schedule)
    w = np.zeros((n, n))
    for k in range(K):
        nodes = schedule[K - 1 - k]
        b = np.zeros((n, len(nodes)))
        for col, j in enumerate(nodes):
            b[j, col] = 1.0
        ak = np.linalg.matrix_power(a, k)
        w += ak @ b @ b.T @ ak.T
    return w


def naive_metric(w, kind):
    lam = np.linalg.eigvalsh(w)
    if kind == "trace":
        return float(np.trace(w))
    if kind == "mineig":
        return max(float(lam[0]), 0.0)
    if kind == "det":
        return float(np.prod(np.clip(lam, 0.0, None)))
    if lam[0] <= 1e-12 * lam[-1]:
        return 0.0
    return float(1.0 / np.trace(np.linalg.inv(w)))


def brute_force(a, K, kind="trace", constant_only=False, m=1):
    """Best value over every schedule (or every constant schedule)."""
    n = np.asarray(a).shape[0]
    sets = list(itertools.combinations(range(n), m))
    if constant_only:
        candidates = ([s] * K for s in sets)
    else:
        candidates = (list(c) for c in itertools.product(sets, repeat=K))
    return max(naive_metric(naive_gramian(a, sched), kind) for sched in candidates)


def naive_communicability(a, K):
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    r = np.zeros((n, K))
    for k in range(K):
        ak = np.linalg.matrix_power(a, k)
        for i in range(n):
            r[i, k] = sum(ak[j, i] ** 2 for j in range(n))
    return r


def naive_argmax(values):
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def is_primitive_wielandt(a):
    """Primitive iff the boolean power ``(A > 0)^((n-1)^2 + 1)`` is all positive."""
    b = (np.asarray(a) > 0).astype(np.int64)
    n = b.shape[0]
    p = np.eye(n, dtype=np.int64)
    for _ in range((n - 1) ** 2 + 1):
        p = np.minimum(p @ b, 1)
    return bool(p.all())


def transmission_oracle(c):
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    a = np.zeros((n, n))
    for i in range(n):
        s = c[i].sum()
        if s > 0:
            a[i] = c[i] / s
        else:
            a[i, i] = 1.0
    return a


def random_transmission_network(rng, n, p=None):
    """Directed off-diagonal links with uniform weights, row-normalized."""
    p = rng.random() if p is None else p
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    c = np.where(mask, rng.random((n, n)), 0.0)
    return transmission_oracle(c)


def exact_energy(a, schedule, x_f):
    """``x_f^T W^{-1} x_f`` in rational arithmetic from the float inputs (single input)."""
    n = len(a)
    K = len(schedule)
    A = [[Fraction(float(v)) for v in row] for row in a]
    w = [[Fraction(0)] * n for _ in range(n)]
    for k in range(K):
        (j,) = schedule[K - 1 - k]
        v = [Fraction(int(i == j)) for i in range(n)]
        for _ in range(k):
            v = [sum(A[i][l] * v[l] for l in range(n)) for i in range(n)]
        for i in range(n):
            for l in range(n):
                w[i][l] += v[i] * v[l]
    b = [Fraction(float(x)) for x in x_f]
    rows = [w[i][:] + [b[i]] for i in range(n)]
    # Gauss-Jordan elimination
    for c in range(n):
        p = next(r for r in range(c, n) if rows[r][c] != 0)
        rows[c], rows[p] = rows[p], rows[c]
        for r in range(n):
            if r != c and rows[r][c] != 0:
                f = rows[r][c] / rows[c][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return float(sum(b[i] * rows[i][n] / rows[i][i] for i in range(n)))
