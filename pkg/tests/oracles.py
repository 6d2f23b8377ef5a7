"""Independent reference computations used by the tests.

These deliberately avoid the package's solver and filtering code: set
covers are found by enumerating every subfamily, filtering and enlargement
are recomputed from raw distances.
"""

import itertools
import math
import random
from fractions import Fraction

INF = math.inf


def diameter(matrix, S):
    return max((matrix[i][j] for i in S for j in S), default=0)


def brute_phi(sets, values, diams, delta, R):
    R = set(R)
    if not R:
        return 0
    admissible = [k for k in range(len(sets)) if diams[k] <= delta and values[k] != INF]
    best = INF
    for r in range(1, len(admissible) + 1):
        for combo in itertools.combinations(admissible, r):
            covered = set().union(*(sets[k] for k in combo))
            if R <= covered:
                cost = sum(values[k] for k in combo)
                best = min(best, cost)
    return best


def brute_psi(sets, values, diams, R):
    # phi only changes at member diameters; probe every gap and take the max.
    ds = sorted({d for d in diams if d > 0})
    probes = [Fraction(1)] if not ds else [ds[0] / 2] + [(a + b) / 2 for a, b in zip(ds, ds[1:])] + [ds[-1] + 1]
    return max(brute_phi(sets, values, diams, d, R) for d in probes)


def kept(mu, zeta):
    return not ((mu == 0 and zeta == 0) or (mu == INF and zeta == INF))


def brute_enlargement(matrix, sets, values, mus, S, tau):
    dS = diameter(matrix, S)
    out = set()
    for T, z, m in zip(sets, values, mus):
        if kept(m, z) and set(T) & set(S) and diameter(matrix, T) <= tau * dS:
            out |= set(T)
    return frozenset(out)


def random_matrix(n, rng):
    """Integer metric by shortest-path completion, written independently."""
    d = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = rng.randint(1, 6)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if d[i][k] + d[k][j] < d[i][j]:
                        d[i][j] = d[i][k] + d[k][j]
                        changed = True
    return [[Fraction(v) for v in row] for row in d]


def random_family(n, size, rng, zero_p=0.1, inf_p=0.05):
    sets, values = [], []
    seen = set()
    while len(sets) < size:
        S = frozenset(i for i in range(n) if rng.random() < 0.4)
        if not S or S in seen:
            if len(seen) >= 2**n - 1:
                break
            continue
        seen.add(S)
        roll = rng.random()
        v = Fraction(0) if roll < zero_p else INF if roll < zero_p + inf_p else Fraction(rng.randint(1, 9), rng.randint(1, 3))
        sets.append(S)
        values.append(v)
    return sets, values


def rng_for(seed):
    return random.Random(seed)
