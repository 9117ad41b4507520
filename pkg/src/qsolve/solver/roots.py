"""Certified complex root isolation for squarefree rational polynomials.

Approximations come from Aberth-Ehrlich iteration in multiprecision
(seeded from double-precision companion eigenvalues when the coefficients
fit in a double).  Each approximation ``z`` is then rounded to a dyadic
Gaussian rational and the inclusion radius ``n |p(z) / p'(z)|`` is
evaluated exactly; a disk of that radius always contains a root, so
pairwise disjoint disks isolate all ``n`` roots.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import mpmath
import numpy as np
from gmpy2 import mpq, mpz

from ..errors import PrecisionExhausted
from ..algebra import dense

_UP = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_DOWN = gmpy2.context(precision=64, round=gmpy2.RoundDown)


@dataclass(frozen=True)
class RootDisk:
    """An isolating disk: exactly one root of the polynomial lies inside."""

    center: mpmath.mpc
    radius: mpq  # exact upper bound

    def contains(self, other: "RootDisk") -> bool:
        d = _dist2(self.center, other.center)
        return d <= (self.radius - other.radius) ** 2 and self.radius >= other.radius


def as_mpc(x) -> mpmath.mpc:
    """``x`` as an mpc without rounding to the ambient working precision."""
    if isinstance(x, mpmath.mpc):
        return x
    if isinstance(x, mpmath.mpf):
        with mpmath.workprec(max(53, x._mpf_[3] + 2)):
            return mpmath.mpc(x)
    return mpmath.mpc(x)


def dyadic(x: mpmath.mpf) -> mpq:
    raw = x._mpf_ if hasattr(x, "_mpf_") else mpmath.mpf(x)._mpf_
    sign, man, exp, _ = raw
    man = -int(man) if sign else int(man)
    return mpq(man * 2**exp) if exp >= 0 else mpq(man, 2 ** (-exp))


def _gauss(z) -> tuple[mpq, mpq]:
    z = as_mpc(z)
    return dyadic(z.real), dyadic(z.imag)


def _dist2(a, b) -> mpq:
    ar, ai = _gauss(a)
    br, bi = _gauss(b)
    return (ar - br) ** 2 + (ai - bi) ** 2


def _integer_coeffs(p: list) -> list[mpz]:
    den = mpz(1)
    for c in p:
        den = gmpy2.lcm(den, mpq(c).denominator)
    return [mpz(mpq(c) * den) for c in p]


def _eval_gauss(coeffs: list[mpz], re: mpq, im: mpq) -> tuple[mpq, mpq]:
    """Exact value of an integer polynomial at ``re + i im``."""
    den = gmpy2.lcm(re.denominator, im.denominator)
    x, y = mpz(re * den), mpz(im * den)
    n = len(coeffs) - 1
    ar, ai = coeffs[-1], mpz(0)
    scale = mpz(1)
    for k in range(n - 1, -1, -1):
        scale *= den
        ar, ai = ar * x - ai * y + coeffs[k] * scale, ar * y + ai * x
    total = den**n
    return mpq(ar, total), mpq(ai, total)


def inclusion_radius(p: list, z) -> mpq | None:
    """Exact upper bound on ``deg p * |p(z)/p'(z)|`` (``None`` if ``p'(z) = 0``).

    ``z`` is taken as the dyadic rational nearest to the given approximation.
    """
    ints = _integer_coeffs(p)
    dints = [k * c for k, c in enumerate(ints)][1:]
    re, im = _gauss(z)
    pr, pi = _eval_gauss(ints, re, im)
    dr, di = _eval_gauss(dints, re, im)
    den = dr * dr + di * di
    if not den:
        return None
    ratio2 = (pr * pr + pi * pi) / den
    n = len(p) - 1
    with gmpy2.context(_UP):
        r = gmpy2.sqrt(gmpy2.mpfr(ratio2)) * n
    return mpq(r)


def _seeds(p: list, prec: int) -> list:
    n = len(p) - 1
    lead = p[-1]
    try:
        arr = np.array([float(c / lead) for c in reversed(p)], dtype=float)
        if np.all(np.isfinite(arr)) and np.max(np.abs(arr)) < 1e250:
            rts = np.roots(arr)
            if len(rts) == n and np.all(np.isfinite(rts)):
                return [mpmath.mpc(complex(r)) for r in rts]
    except (OverflowError, ValueError, np.linalg.LinAlgError):
        pass
    # Cauchy bound circle, slightly rotated to avoid symmetric stagnation
    bound = 1 + max(abs(float(c / lead)) if abs(c / lead) < 1e300 else 1e300 for c in p[:-1]) if n else 1
    return [mpmath.mpc(bound) * mpmath.expj(2 * mpmath.pi * (k + 0.25) / n) for k in range(n)]


def _spread(z: list, prec: int) -> list:
    """Nudge (nearly) coincident seeds apart; Aberth cannot separate equal iterates."""
    n = len(z)
    close = mpmath.mpf(2) ** (-prec // 2)
    offset = mpmath.mpf(2) ** (-prec // 4)
    out = []
    for i, zi in enumerate(z):
        scale = max(abs(zi), 1)
        if any(abs(zi - zj) <= close * scale for zj in out):
            zi = zi + offset * scale * mpmath.expj(2 * mpmath.pi * (i + 0.3) / n)
        out.append(zi)
    return out


def aberth(p: list, prec: int, maxiter: int = 200, seeds=None) -> list:
    """Simultaneous approximation of all roots of ``p`` at ``prec`` bits."""
    n = len(p) - 1
    if n < 1:
        return []
    with mpmath.workprec(prec):
        lead = mpmath.mpf(int(mpq(p[-1]).numerator)) / int(mpq(p[-1]).denominator)
        cs = [mpmath.mpf(int(mpq(c).numerator)) / int(mpq(c).denominator) / lead for c in p]
        dcs = [cs[k] * k for k in range(1, n + 1)]
        if n == 1:
            return [mpmath.mpc(-cs[0])]
        z = list(seeds) if seeds is not None else _seeds(p, prec)
        z = _spread([mpmath.mpc(x) for x in z], prec)
        tol = mpmath.mpf(2) ** (-prec + 4)
        noise = mpmath.mpf(2) ** (-prec // 3)
        active = set(range(n))
        last = [None] * n
        for _ in range(maxiter):
            if not active:
                break
            for i in sorted(active):
                zi = z[i]
                pv = mpmath.polyval(cs[::-1], zi)
                if pv == 0:
                    active.discard(i)
                    continue
                dv = mpmath.polyval(dcs[::-1], zi)
                ratio = pv / dv if dv != 0 else mpmath.mpc(tol)
                s = mpmath.fsum(1 / (zi - z[j]) for j in range(n) if j != i and zi != z[j])
                w = ratio / (1 - ratio * s)
                z[i] = zi - w
                step = abs(w) / max(abs(zi), 1)
                # converged, or stalled at the rounding-noise level
                if step < tol or (last[i] is not None and step < noise and step >= last[i] / 2):
                    active.discard(i)
                last[i] = step
        return z


def isolate(p: list, prec: int = 128, max_prec: int = 1024) -> tuple[list[RootDisk], int]:
    """Isolating disks for every root of the squarefree polynomial ``p``.

    Precision doubles until the disks are pairwise disjoint; returns the
    disks and the precision that succeeded.
    """
    p = dense.monic(dense.trim([mpq(c) for c in p]))
    n = len(p) - 1
    if n < 1:
        return [], prec
    bits = prec
    seeds = None
    while bits <= max_prec:
        approx = aberth(p, bits, seeds=seeds)
        disks = []
        ok = True
        for z in approx:
            r = inclusion_radius(p, z)
            if r is None:
                ok = False
                break
            disks.append(RootDisk(z, r))
        if ok and _disjoint(disks):
            return disks, bits
        seeds = approx
        bits *= 2
    raise PrecisionExhausted(f"could not separate {n} roots with {max_prec} bits")


def _disjoint(disks: list[RootDisk]) -> bool:
    items = sorted(((_gauss(d.center), d.radius) for d in disks), key=lambda t: t[0][0])
    for i, ((ar, ai), ra) in enumerate(items):
        for (br, bi), rb in items[i + 1:]:
            s = ra + rb
            if br - ar > s:
                break
            if (ar - br) ** 2 + (ai - bi) ** 2 <= s * s:
                return False
    return True


def refine(p: list, disk: RootDisk, bits: int, steps: int = 60) -> RootDisk:
    """Newton-polish the root isolated by ``disk`` at ``bits`` of precision.

    The result is certified to be the same root: its inclusion disk must lie
    inside the original isolating disk, otherwise ``disk`` is returned as is.
    """
    p = dense.monic(dense.trim([mpq(c) for c in p]))
    n = len(p) - 1
    with mpmath.workprec(bits):
        cs = [mpmath.mpf(int(c.numerator)) / int(c.denominator) for c in reversed(p)]
        dcs = [cs[i] * (n - i) for i in range(n)]
        z = mpmath.mpc(disk.center)
        tol = mpmath.mpf(2) ** (-bits + 8)
        for _ in range(steps):
            dv = mpmath.polyval(dcs, z)
            if dv == 0:
                break
            w = mpmath.polyval(cs, z) / dv
            z -= w
            if abs(w) <= tol * max(abs(z), 1):
                break
    r = inclusion_radius(p, z)
    if r is None:
        return disk
    new = RootDisk(z, r)
    return new if disk.contains(new) else disk


def magnitude_bits(g: list, disk: RootDisk) -> int:
    """Bits lost to cancellation when evaluating ``g`` near the disk."""
    if not g:
        return 0
    re, im = _gauss(disk.center)
    with gmpy2.context(_UP):
        rho = gmpy2.sqrt(gmpy2.mpfr(re * re + im * im)) + gmpy2.mpfr(disk.radius) + 1
        mag = gmpy2.mpfr(0)
        power = gmpy2.mpfr(1)
        for c in g:
            mag += abs(gmpy2.mpfr(c)) * power
            power *= rho
        return max(0, int(gmpy2.ceil(gmpy2.log2(mag))) + 1) if mag > 0 else 0


def enclose(g: list, disk: RootDisk, prec: int) -> tuple[mpmath.mpc, mpq]:
    """Value of the rational polynomial ``g`` at the root isolated by ``disk``.

    Returns the value at the disk center and an exact bound on the distance
    to the true value, ``r * max |g'|`` over the disk.
    """
    g = dense.trim([mpq(c) for c in g])
    with mpmath.workprec(prec):
        z = mpmath.mpc(disk.center)
        val = mpmath.polyval([mpmath.mpf(int(c.numerator)) / int(c.denominator) for c in reversed(g)], z) if g else mpmath.mpc(0)
    re, im = _gauss(disk.center)
    with gmpy2.context(_UP):
        rho = gmpy2.sqrt(gmpy2.mpfr(re * re + im * im)) + gmpy2.mpfr(disk.radius)
        slope = gmpy2.mpfr(0)
        mag = abs(gmpy2.mpfr(g[0])) if g else gmpy2.mpfr(0)
        power = gmpy2.mpfr(1)
        for k in range(1, len(g)):
            slope += k * abs(gmpy2.mpfr(g[k])) * power
            power *= rho
            mag += abs(gmpy2.mpfr(g[k])) * power
        # Lipschitz term plus the rounding error of the center evaluation
        err = slope * gmpy2.mpfr(disk.radius) + mag * (len(g) + 1) * gmpy2.mpfr(2) ** (-prec + 4)
    return val, mpq(err)


def to_decimal(x, digits: int = 30) -> str:
    return mpmath.nstr(x, digits, strip_zeros=False) if x != 0 else "0"


def radius_string(r: mpq) -> str:
    if not r:
        return "0"
    return mpmath.nstr(mpmath.mpf(int(r.numerator)) / int(r.denominator), 6)
