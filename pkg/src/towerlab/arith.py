"""Exact integer primitives: primality, sieves, Kronecker symbols, valuations,
squarefree parts, and Smith normal form.

All functions are pure and exact; primality is deterministic below 2^64 and
refuses larger inputs rather than answering probabilistically.
"""

from dataclasses import dataclass
from math import gcd, isqrt

import numpy as np

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic primality for 0 <= n < 2^64."""
    if n < 0:
        raise ValueError("is_prime requires n >= 0")
    if n >= 1 << 64:
        raise ValueError("out of deterministic range")
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sieve_primes(limit, residue_filter=None):
    """All primes <= limit, optionally restricted to p = residue (mod modulus).

    residue_filter: None or a (modulus, residue) pair.
    """
    if limit < 2:
        raise ValueError("limit must be >= 2")
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    primes = np.flatnonzero(mask)
    if residue_filter is not None:
        modulus, residue = residue_filter
        primes = primes[primes % modulus == residue % modulus]
    return [int(p) for p in primes]


def kronecker(a, n):
    """Kronecker symbol (a|n), full semantics including n <= 0 and n even."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    k = 1
    if n < 0:
        n = -n
        if a < 0:
            k = -1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            k = -k
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def two_valuation(n):
    """Largest k with 2^k | n; n must be nonzero."""
    if n == 0:
        raise ValueError("undefined valuation")
    return ((n if n > 0 else -n) & -(n if n > 0 else -n)).bit_length() - 1


def is_square(n):
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


_TRIAL_BOUND = 1_000_000


def squarefree_part(n, trial_bound=_TRIAL_BOUND):
    """The unique squarefree s (same sign as n) with n/s a positive square.

    Factors by trial division up to trial_bound; the cofactor is then handled
    if it is 1, a prime, a prime square, or a square.  Raises for n = 0 or
    when the cofactor cannot be certified.
    """
    if n == 0:
        raise ValueError("undefined")
    sign = -1 if n < 0 else 1
    m = abs(n)
    s = 1
    p = 2
    while p * p <= m and p <= trial_bound:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e % 2:
                s *= p
        p += 1 if p == 2 else 2
    if m > 1:
        if is_square(m):
            pass  # even exponents throughout: contributes nothing
        elif p * p > m or (m < 1 << 64 and is_prime(m)):
            s *= m  # prime cofactor
        else:
            raise ValueError(f"cannot certify squarefree part of {n}")
    return sign * s


def xgcd(a, b):
    """(g, u, v) with u*a + v*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def sqrt_mod_prime(a, p):
    """A square root of a mod the odd prime p (Tonelli-Shanks); a must be a QR."""
    a %= p
    if a == 0:
        return 0
    if kronecker(a, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while kronecker(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def factorize(n, trial_bound=_TRIAL_BOUND):
    """Sorted list of (prime, exponent) for |n|; desk-scale trial division."""
    if n == 0:
        raise ValueError("cannot factor 0")
    m = abs(n)
    out = []
    p = 2
    while p * p <= m and p <= trial_bound:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        if p * p > m or (m < 1 << 64 and is_prime(m)):
            out.append((m, 1))
        elif is_square(m) and is_prime(isqrt(m)):
            out.append((isqrt(m), 2))
        else:
            raise ValueError(f"cannot factor {n} by trial division")
    return out


def primitive_root(p):
    """Smallest primitive root mod the odd prime p."""
    fac = [q for q, _ in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in fac):
            return g
    raise ArithmeticError(f"no primitive root mod {p}")


# ---------------------------------------------------------------------------
# Integer matrices and Smith normal form


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple  # row-major tuple of tuples

    @classmethod
    def from_rows(cls, rows):
        rows = [tuple(int(x) for x in r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), ncols, tuple(rows))

    def to_lists(self):
        return [list(r) for r in self.entries]

    def __mul__(self, other):
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = [
            [
                sum(self.entries[i][k] * other.entries[k][j] for k in range(self.cols))
                for j in range(other.cols)
            ]
            for i in range(self.rows)
        ]
        return IntMatrix.from_rows(out)


def _as_rows(m):
    if isinstance(m, IntMatrix):
        return m.to_lists()
    return [list(r) for r in m]


def smith_normal_form(m, transforms=False):
    """Divisor chain d_1 | d_2 | ... of an integer matrix.

    Returns (divisors, None) or, with transforms=True, (divisors, (U, V))
    where U*m*V is the diagonal matrix of the divisors.  The chain has one
    entry per column of m; zeros (free rank of the cokernel) sort last.
    Pivoting is on the smallest nonzero entry (fraction-free elimination).
    """
    A = _as_rows(m)
    nr = len(A)
    nc = len(A[0]) if nr else 0
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_sub(i, j, q):  # row_i -= q*row_j
        A[i] = [x - q * y for x, y in zip(A[i], A[j])]
        U[i] = [x - q * y for x, y in zip(U[i], U[j])]

    def col_sub(j, k, q):  # col_j -= q*col_k
        for row in A:
            row[j] -= q * row[k]
        for row in V:
            row[j] -= q * row[k]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_swap(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def diagonalize_from(t0):
        t = t0
        while t < min(nr, nc):
            while True:
                piv = None
                for i in range(t, nr):
                    for j in range(t, nc):
                        if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                            piv = (i, j)
                if piv is None:
                    return
                if piv[0] != t:
                    row_swap(t, piv[0])
                if piv[1] != t:
                    col_swap(t, piv[1])
                p = A[t][t]
                clean = True
                for i in range(t + 1, nr):
                    if A[i][t]:
                        row_sub(i, t, A[i][t] // p)
                        if A[i][t]:
                            clean = False
                if not clean:
                    continue
                for j in range(t + 1, nc):
                    if A[t][j]:
                        col_sub(j, t, A[t][j] // p)
                        if A[t][j]:
                            clean = False
                if clean:
                    break
            t += 1

    diagonalize_from(0)
    # enforce the divisibility chain on the diagonal
    rank = min(nr, nc)
    while True:
        bad = None
        for i in range(rank):
            for j in range(i + 1, rank):
                a, b = A[i][i], A[j][j]
                if (a == 0 and b != 0) or (a and b and b % a):
                    bad = (i, j)
                    break
            if bad:
                break
        if bad is None:
            break
        i, j = bad
        row_sub(i, j, -1)  # row_i += row_j brings A[j][j] next to A[i][i]
        diagonalize_from(i)
    divisors = []
    for j in range(nc):
        d = abs(A[j][j]) if j < nr else 0
        divisors.append(d)
    # normalize signs on the diagonal through U
    for i in range(min(nr, nc)):
        if A[i][i] < 0:
            A[i] = [-x for x in A[i]]
            U[i] = [-x for x in U[i]]
    if transforms:
        return divisors, (IntMatrix.from_rows(U), IntMatrix.from_rows(V))
    return divisors, None


def cokernel_structure(rows, ncols):
    """Elementary divisors (> 1, ascending chain) of Z^ncols / <rows>, with
    0 entries for free rank."""
    if not rows:
        return tuple([0] * ncols)
    divisors, _ = smith_normal_form([list(r) + [0] * (ncols - len(r)) for r in rows])
    out = [d for d in divisors if d != 1]
    return tuple(sorted(out, key=lambda x: (x == 0, x)))


def two_part(structure):
    """2-part of an abelian structure given as a divisor chain."""
    out = []
    for d in structure:
        if d == 0:
            raise ValueError("infinite group has no finite 2-part")
        t = d & -d
        if t > 1:
            out.append(t)
    return tuple(sorted(out))
