"""Pure-Python implementations of the hot inner loops.

Same contract as the compiled twin in ``_ckernels.pyx``; ``towerlab.kernels``
picks whichever imports (env var TOWERLAB_PURE=1 forces this module).
Everything here works on machine-size integers; callers stay inside the
documented ranges.
"""

from math import isqrt

IMPL = "python"

_MASK64 = (1 << 64) - 1


def pell_norm(d):
    """Norm (+1/-1) of the fundamental unit of the maximal order of Q(sqrt d).

    d: squarefree, > 1.  The norm is (-1)^(period length) for the continued
    fraction of (1+sqrt d)/2 when d = 1 mod 4, of sqrt d otherwise; both give
    the same sign (the unit index of Z[sqrt d] in the maximal order is odd).
    """
    s = isqrt(d)
    if d % 4 == 1:
        P, Q = 1, 2
    else:
        P, Q = 0, 1
    # iterate to a reduced state, remember it, then count the cycle
    firstP = -1
    firstQ = -1
    steps = 0
    n = 0
    while True:
        a = (P + s) // Q
        P = a * Q - P
        Q = (d - P * P) // Q
        steps += 1
        if firstP < 0:
            if 0 < P <= s and s - P < Q <= s + P:
                firstP, firstQ = P, Q
                n = 0
        else:
            n += 1
            if P == firstP and Q == firstQ:
                return 1 if n % 2 == 0 else -1
        if steps > 10 * d + 100:
            raise ArithmeticError(f"continued fraction of sqrt({d}) did not cycle")


def pell_x_mod64(d):
    """Fundamental solution of x^2 - d*y^2 = +-1 over Z[sqrt d], x mod 2^64.

    d: squarefree, d % 4 in (2, 3), 1 < d < 2^62.
    Returns (norm, x_mod) with norm = (-1)^period.
    """
    s = isqrt(d)
    P, Q = s, d - s * s
    a1, a0 = 1, s  # convergent numerators A_{-1}, A_0 (mod 2^64)
    i = 1
    while Q != 1:
        a = (P + s) // Q
        P = a * Q - P
        Q = (d - P * P) // Q
        a1, a0 = a0, (a * a0 + a1) & _MASK64
        i += 1
    return (1 if i % 2 == 0 else -1), a0


def count_forms(D):
    """Class number of the imaginary quadratic field of discriminant D < 0,
    counted as the number of reduced positive-definite forms."""
    h = 0
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        a4 = 4 * a
        for b in range(-a + 1, a + 1):
            t = b * b - D
            if t % a4:
                continue
            c = t // a4
            if c < a or (a == c and b < 0):
                continue
            h += 1
    return h


def count_forms_batch(limit):
    """Class numbers h(-n) for all 0 <= n <= limit in one triple sweep.

    Returns a list h with h[n] the number of reduced forms of discriminant -n
    (0 when n is not 0 or 3 mod 4).  Cost O(limit^{3/2}).
    """
    h = [0] * (limit + 1)
    amax = isqrt(limit // 3)
    for a in range(1, amax + 1):
        a4 = 4 * a
        for b in range(0, a + 1):
            bb = b * b
            double = 0 < b < a
            for c in range(a, (limit + bb) // a4 + 1):
                n = a4 * c - bb
                if double and a < c:
                    h[n] += 2
                else:
                    h[n] += 1
    return h


def smallest_prime_factors(limit):
    """Smallest-prime-factor table 0..limit as a list (spf[0] = spf[1] = 0)."""
    spf = [0] * (limit + 1)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            spf[p] = p
            for m in range(p * p, limit + 1, p):
                if spf[m] == 0:
                    spf[m] = p
    for n in range(2, limit + 1):
        if spf[n] == 0:
            spf[n] = n
    return spf


def residue_prime_counts(limit):
    """Per-n count of prime factors = 3 mod 4 over squarefree n <= limit.

    Returns a list cnt with cnt[n] = that count for squarefree n, -1 for
    non-squarefree n (cnt[0] = -1, cnt[1] = 0).
    """
    spf = smallest_prime_factors(limit)
    cnt = [0] * (limit + 1)
    if limit >= 0:
        cnt[0] = -1
    for n in range(2, limit + 1):
        m = n
        c = 0
        while m > 1:
            p = spf[m]
            m //= p
            if m % p == 0:
                c = -1
                break
            if p % 4 == 3:
                c += 1
        cnt[n] = c
    return cnt
