"""Dense univariate helpers on plain coefficient lists over the rationals.

Lists are lowest degree first and carry no trailing zeros; ``[]`` is the zero
polynomial.  These are the kernels used for eliminants, number-field
arithmetic and root certification, where the generic :class:`UPoly` layer
would only add overhead.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpq, mpz

from .rational import format_rational


def trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def deg(a: list) -> int:
    return len(a) - 1


def add(a: list, b: list) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return trim(out)


def sub(a: list, b: list) -> list:
    out = list(a) + [mpq(0)] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    return trim(out)


def scale(a: list, c) -> list:
    if not c:
        return []
    return [x * c for x in a]


KRONECKER_MIN_LENGTH = 6


def to_integer(a: list) -> tuple[list, mpz]:
    """``(ints, den)`` with ``a == [n / den for n in ints]``."""
    den = mpz(1)
    for c in a:
        d = mpq(c).denominator
        if d != 1:
            den = gmpy2.lcm(den, d)
    return [mpz(mpq(c) * den) for c in a], den


def int_mul(a: list, b: list) -> list:
    """Product of integer coefficient lists by Kronecker substitution."""
    if not a or not b:
        return []
    bound = max(abs(x) for x in a) * max(abs(x) for x in b) * min(len(a), len(b))
    bits = int(gmpy2.bit_length(mpz(bound))) + 2
    pa = sum(mpz(x) << (k * bits) for k, x in enumerate(a))
    pb = sum(mpz(x) << (k * bits) for k, x in enumerate(b))
    prod = pa * pb
    out = []
    half = mpz(1) << (bits - 1)
    full = mpz(1) << bits
    mask = full - 1
    for _ in range(len(a) + len(b) - 1):
        d = prod & mask
        if d >= half:
            d -= full
        out.append(d)
        prod = (prod - d) >> bits
    return out


def mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    if min(len(a), len(b)) >= KRONECKER_MIN_LENGTH:
        ia, da = to_integer(a)
        ib, db = to_integer(b)
        den = da * db
        return trim([mpq(x, den) for x in int_mul(ia, ib)])
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def monic(a: list) -> list:
    if not a:
        return []
    lc = a[-1]
    if lc == 1:
        return list(a)
    inv = 1 / lc
    return [x * inv for x in a]


def divmod_(a: list, b: list) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], trim(r)
    q = [mpq(0)] * (len(r) - db)
    inv = 1 / b[-1]
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k]
        if not c:
            continue
        c = c * inv
        q[k - db] = c
        for j in range(db + 1):
            r[k - db + j] -= c * b[j]
    return trim(q), trim(r[:db])


def rem(a: list, b: list) -> list:
    """Remainder; fast path for monic ``b``."""
    db = len(b) - 1
    if len(a) - 1 < db:
        return list(a)
    if b[-1] != 1:
        return divmod_(a, b)[1]
    r = list(a)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k]
        if c:
            base = k - db
            for j in range(db):
                r[base + j] -= c * b[j]
    return trim(r[:db])


def gcd(a: list, b: list) -> list:
    """Monic gcd; gcd(0, 0) = 0."""
    a, b = trim(list(a)), trim(list(b))
    while b:
        b = monic(b)
        a, b = b, rem(a, b)
    return monic(a)


def gcdex(a: list, b: list) -> tuple[list, list, list]:
    """Return ``(s, t, g)`` with ``s*a + t*b = g`` and ``g`` monic."""
    r0, r1 = trim(list(a)), trim(list(b))
    s0, s1 = [mpq(1)], []
    t0, t1 = [], [mpq(1)]
    while r1:
        q, r = divmod_(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
        t0, t1 = t1, sub(t0, mul(q, t1))
    if not r0:
        return [], [], []
    inv = 1 / r0[-1]
    return scale(s0, inv), scale(t0, inv), scale(r0, inv)


def derivative(a: list) -> list:
    return trim([a[k] * k for k in range(1, len(a))])


def squarefree_part(a: list) -> list:
    if len(a) <= 2:
        return monic(a)
    g = gcd(a, derivative(a))
    if len(g) <= 1:
        return monic(a)
    return monic(divmod_(a, g)[0])


def evaluate(a: list, x):
    acc = None
    for c in reversed(a):
        acc = c if acc is None else acc * x + c
    return mpq(0) if acc is None else acc


def to_string(a: list, var: str = "t") -> str:
    if not a:
        return "0"
    parts = []
    for k in range(len(a) - 1, -1, -1):
        c = a[k]
        if not c:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if not mono:
            parts.append(format_rational(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{format_rational(c)}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")
