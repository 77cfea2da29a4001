"""Prime-by-prime check over Q: does some member of a family have a Q_p-root?

At a prime p not dividing any member's discriminant every root mod p is
simple, so by Hensel it lifts to Z_p; for monic members a Q_p-root is
integral.  Hence at good primes the question is just whether some member has
a root mod p.  This channel uses no group theory and serves as an independent
check on densities predicted from Galois data.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .intmath import bareiss_det

SCAN_LIMIT = 10_000


class OracleError(ValueError):
    pass


def _trim(f: Sequence[int]) -> list[int]:
    f = [int(c) for c in f]
    while f and f[-1] == 0:
        f.pop()
    return f


def discriminant(f: Sequence[int]) -> int:
    """Discriminant of a monic integer polynomial, coefficients low degree first."""
    f = _trim(f)
    n = len(f) - 1
    if n < 1:
        raise OracleError("discriminant needs degree at least 1")
    if f[-1] != 1:
        raise OracleError(f"polynomial {f} is not monic")
    if n == 1:
        return 1
    df = [k * c for k, c in enumerate(f)][1:]
    # Sylvester matrix of f and f' (high degree first), size (2n - 1)
    hi_f, hi_df = f[::-1], df[::-1]
    size = 2 * n - 1
    rows = []
    for k in range(n - 1):
        rows.append([0] * k + hi_f + [0] * (size - k - len(hi_f)))
    for k in range(n):
        rows.append([0] * k + hi_df + [0] * (size - k - len(hi_df)))
    res = bareiss_det(rows)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res


def primes_in_range(lower: int, upper: int) -> list[int]:
    """Primes p with lower <= p <= upper."""
    if upper < 2 or upper < lower:
        return []
    sieve = np.ones(upper + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(upper ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return [int(p) for p in np.flatnonzero(sieve) if p >= lower]


def _prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


class PolynomialFamily:
    """Monic squarefree integer polynomials; "has a root" means some member does."""

    def __init__(self, members: Sequence[Sequence[int]]):
        if not members:
            raise OracleError("a polynomial family needs at least one member")
        ms = []
        for f in members:
            f = _trim(f)
            d = discriminant(f)
            if d == 0:
                raise OracleError(f"polynomial {f} is not squarefree")
            ms.append(tuple(f))
        self.members: tuple[tuple[int, ...], ...] = tuple(ms)

    @cached_property
    def discriminants(self) -> tuple[int, ...]:
        return tuple(discriminant(f) for f in self.members)

    @cached_property
    def bad_primes(self) -> tuple[int, ...]:
        return tuple(sorted({p for d in self.discriminants for p in _prime_factors(d)}))

    def is_good(self, p: int) -> bool:
        return all(d % p for d in self.discriminants)

    def __repr__(self):
        return f"PolynomialFamily({[list(f) for f in self.members]})"


# --- polynomials over F_p, coefficient lists low degree first ---------------

def _pmod(a: list[int], f: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    inv = pow(f[-1], -1, p)
    df = len(f) - 1
    while len(a) - 1 >= df:
        c = a[-1] * inv % p
        if c:
            shift = len(a) - 1 - df
            for k, fk in enumerate(f):
                a[shift + k] = (a[shift + k] - c * fk) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, f, p)


def _pgcd_degree(a: list[int], b: list[int], p: int) -> int:
    a, b = [c % p for c in a], [c % p for c in b]
    for poly in (a, b):
        while poly and poly[-1] == 0:
            poly.pop()
    while b:
        a, b = b, _pmod(a, b, p)
    return len(a) - 1


def has_root_mod_p_gcd(f: Sequence[int], p: int) -> bool:
    """Root test via gcd(X^p - X, f) over F_p."""
    fp = [c % p for c in f]
    while fp and fp[-1] == 0:
        fp.pop()
    if len(fp) <= 1:
        return not fp  # zero polynomial vanishes everywhere
    if len(fp) == 2:
        return True
    result, base, e = [1], _pmod([0, 1], fp, p), p
    while e:
        if e & 1:
            result = _pmulmod(result, base, fp, p)
        base = _pmulmod(base, base, fp, p)
        e >>= 1
    xp_minus_x = list(result) + [0] * max(0, 2 - len(result))
    xp_minus_x[1] = (xp_minus_x[1] - 1) % p
    return _pgcd_degree(fp, xp_minus_x, p) >= 1


def has_root_mod_p_scan(f: Sequence[int], p: int) -> bool:
    """Root test by evaluating f at every residue."""
    x = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(f):
        acc = (acc * x + (int(c) % p)) % p
    return bool((acc == 0).any())


def has_root_mod_p(f: Sequence[int], p: int) -> bool:
    if p <= SCAN_LIMIT:
        return has_root_mod_p_scan(f, p)
    return has_root_mod_p_gcd(f, p)


def has_qp_root(fam: PolynomialFamily, p: int) -> bool:
    if not fam.is_good(p):
        raise OracleError(f"p = {p} divides a discriminant of the family; exclude it")
    return any(has_root_mod_p(f, p) for f in fam.members)


@dataclass(frozen=True)
class DensityEstimate:
    lower: int
    upper: int
    good_primes: int
    successes: int
    excluded: tuple[int, ...]

    @property
    def ratio(self) -> Fraction | None:
        if not self.good_primes:
            return None
        return Fraction(self.successes, self.good_primes)

    def merge(self, other: DensityEstimate) -> DensityEstimate:
        if other.lower != self.upper + 1:
            raise ValueError("ranges are not adjacent")
        return DensityEstimate(self.lower, other.upper, self.good_primes + other.good_primes,
                               self.successes + other.successes, self.excluded + other.excluded)

    def to_json(self) -> dict:
        r = self.ratio
        return {
            "range": [self.lower, self.upper],
            "good_primes": self.good_primes,
            "successes": self.successes,
            "ratio": None if r is None else f"{r.numerator}/{r.denominator}",
            "ratio_decimal": None if r is None else f"{float(r):.6f}",
            "excluded": list(self.excluded),
        }


def _count(fam: PolynomialFamily, lower: int, upper: int) -> DensityEstimate:
    good = succ = 0
    excluded = []
    for p in primes_in_range(lower, upper):
        if not fam.is_good(p):
            excluded.append(p)
            continue
        good += 1
        succ += has_qp_root(fam, p)
    return DensityEstimate(lower, upper, good, succ, tuple(excluded))


def empirical_density(fam: PolynomialFamily, lower: int, upper: int, workers: int = 1) -> DensityEstimate:
    """Proportion of good primes in [lower, upper] at which the family has a Q_p-root."""
    if not 2 <= lower <= upper:
        raise ValueError("need 2 <= lower <= upper")
    if workers <= 1 or upper - lower < 1000:
        return _count(fam, lower, upper)
    edges = np.linspace(lower, upper + 1, workers + 1).astype(int)
    chunks = [(int(a), int(b) - 1) for a, b in zip(edges[:-1], edges[1:]) if b - 1 >= a]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_count, [fam] * len(chunks), *zip(*chunks)))
    out = parts[0]
    for part in parts[1:]:
        out = out.merge(part)
    return out


@dataclass(frozen=True)
class Comparison:
    estimate: DensityEstimate
    predicted: Fraction
    tolerance: float

    @property
    def deviation(self) -> Fraction | None:
        r = self.estimate.ratio
        return None if r is None else abs(r - self.predicted)

    @property
    def passed(self) -> bool:
        d = self.deviation
        return d is not None and d <= Fraction(str(self.tolerance))

    def to_json(self) -> dict:
        d = self.deviation
        return {
            "estimate": self.estimate.to_json(),
            "predicted": f"{self.predicted.numerator}/{self.predicted.denominator}",
            "deviation": None if d is None else f"{float(d):.6f}",
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def compare_with_prediction(fam: PolynomialFamily, predicted: Fraction, lower: int, upper: int,
                            tolerance: float, workers: int = 1) -> Comparison:
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    est = empirical_density(fam, lower, upper, workers)
    return Comparison(est, Fraction(predicted), tolerance)
