"""Brute-force agreement oracles, written before and independently of the
library implementations they check.

Both statistics are computed by explicit pair enumeration, never via
marginal-product or coincidence-matrix shortcuts:

* expected agreement for kappa enumerates every (position i of coder A,
  position j of coder B) pair and counts label matches;
* alpha enumerates every ordered pair of value slots, within units for the
  observed disagreement and across the pooled values for expected.

Keep this file dumb and quadratic on purpose.
"""

from fractions import Fraction


def kappa_bruteforce(a, b):
    """Cohen's kappa for two equal-length nominal label sequences."""
    if len(a) != len(b) or not a:
        raise ValueError("need two non-empty sequences of equal length")
    n = len(a)
    p_o = Fraction(sum(1 for x, y in zip(a, b) if x == y), n)
    # chance agreement = probability a random A-position label equals a
    # random B-position label, by full enumeration
    hits = sum(1 for x in a for y in b if x == y)
    p_e = Fraction(hits, n * n)
    if p_e == 1:
        return {"kappa": 1.0, "p_o": float(p_o), "p_e": 1.0}
    kappa = (p_o - p_e) / (1 - p_e)
    return {"kappa": float(kappa), "p_o": float(p_o), "p_e": float(p_e)}


def alpha_bruteforce(a, b):
    """Krippendorff's alpha (nominal) for two coders, one value per unit each.

    Units are positions; every unit contributes the ordered pairs of its two
    values. Expected disagreement enumerates ordered pairs of distinct value
    slots in the pooled multiset.
    """
    if len(a) != len(b) or len(a) < 2:
        raise ValueError("need two sequences of equal length >= 2")
    values = []
    for x, y in zip(a, b):
        values.append(x)
        values.append(y)
    n = len(values)

    # observed: within each unit, both ordered pairs, weighted 1/(m_u - 1)
    disagree = 0
    for x, y in zip(a, b):
        if x != y:
            disagree += 2  # (x,y) and (y,x), m_u - 1 == 1
    d_o = Fraction(disagree, n)

    # expected: all ordered pairs of distinct slots in the pooled values
    mismatched = 0
    for i in range(n):
        for j in range(n):
            if i != j and values[i] != values[j]:
                mismatched += 1
    d_e = Fraction(mismatched, n * (n - 1))

    if d_e == 0:
        return {"alpha": 1.0, "d_o": float(d_o), "d_e": 0.0}
    alpha = 1 - d_o / d_e
    return {"alpha": float(alpha), "d_o": float(d_o), "d_e": float(d_e)}


def levenshtein_bruteforce(s, t):
    """Plain recursive edit distance with memoisation; the library uses an
    iterative DP, so this is an independent route to the same function."""
    memo = {}

    def go(i, j):
        if i == len(s):
            return len(t) - j
        if j == len(t):
            return len(s) - i
        key = (i, j)
        if key not in memo:
            if s[i] == t[j]:
                memo[key] = go(i + 1, j + 1)
            else:
                memo[key] = 1 + min(go(i + 1, j), go(i, j + 1), go(i + 1, j + 1))
        return memo[key]

    return go(0, 0)
