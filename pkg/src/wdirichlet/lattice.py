"""Index arithmetic on the multiplicative monoid N x N.

Primes are indexed globally and 1-based: p_1 = 2, p_2 = 3, ...
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError

FACTORIZE_BOUND = 1 << 64
# prime-index lookups sieve up to this bound
INDEX_SIEVE_LIMIT = 1 << 26

_sieve_primes = np.array([2, 3, 5, 7, 11, 13], dtype=np.int64)
_sieve_limit = 13


def _extend_sieve(limit: int) -> None:
    global _sieve_primes, _sieve_limit
    if limit <= _sieve_limit:
        return
    limit = max(limit, 2 * _sieve_limit)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for q in range(3, math.isqrt(limit) + 1, 2):
        if is_p[q]:
            is_p[q * q :: 2 * q] = False
    _sieve_primes = np.flatnonzero(is_p).astype(np.int64)
    _sieve_limit = limit


def primes_upto(limit: int) -> np.ndarray:
    _extend_sieve(limit)
    return _sieve_primes[: np.searchsorted(_sieve_primes, limit, side="right")]


def nth_prime(i: int) -> int:
    """Return p_i (1-based)."""
    if i < 1:
        raise DomainError(f"prime index must be >= 1, got {i}")
    while len(_sieve_primes) < i:
        # p_i < i (ln i + ln ln i) for i >= 6
        est = int(i * (math.log(i) + math.log(math.log(i)))) + 16 if i >= 6 else 16
        _extend_sieve(est)
    return int(_sieve_primes[i - 1])


def prime_index(p: int) -> int:
    """Return i with p_i = p; ``p`` must be prime."""
    if p > INDEX_SIEVE_LIMIT:
        raise DomainError(f"prime index lookup limited to primes <= {INDEX_SIEVE_LIMIT}")
    _extend_sieve(p)
    k = int(np.searchsorted(_sieve_primes, p))
    if k >= len(_sieve_primes) or _sieve_primes[k] != p:
        raise DomainError(f"{p} is not prime")
    return k + 1


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    # deterministic Miller-Rabin below 3.3e24
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        c = rng.randrange(1, n)
        y = rng.randrange(0, n)
        m, g, r, q = 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _prime_factors(n: int, out: list) -> None:
    if n == 1:
        return
    if is_prime(n):
        out.append(n)
        return
    d = _pollard_rho(n)
    _prime_factors(d, out)
    _prime_factors(n // d, out)


@dataclass(frozen=True)
class Factorization:
    """Unique factorization; iterating yields ``(prime_index, exponent)`` pairs."""

    primes: tuple[int, ...] = ()
    exponents: tuple[int, ...] = ()

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.primes)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((prime_index(p), e) for p, e in zip(self.primes, self.exponents))

    @property
    def big_omega(self) -> int:
        return sum(self.exponents)

    def value(self) -> int:
        out = 1
        for p, e in zip(self.primes, self.exponents):
            out *= p**e
        return out


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> Factorization:
    """Factor ``n`` into prime powers, primes increasing."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"factorize needs a positive integer, got {n!r}")
    n = int(n)
    if n >= FACTORIZE_BOUND:
        raise DomainError(f"factorize supports n < 2**64, got {n}")
    primes: list[int] = []
    exps: list[int] = []
    # strip small primes first; pollard rho handles the cofactor
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            primes.append(q)
            exps.append(e)
    if n > 1:
        big: list[int] = []
        _prime_factors(n, big)
        big.sort()
        for q in big:
            if primes and primes[-1] == q:
                exps[-1] += 1
            else:
                primes.append(q)
                exps.append(1)
    return Factorization(tuple(primes), tuple(exps))


def valuation(n: int, p: int) -> int:
    """Exponent of prime ``p`` in ``n`` (works for arbitrarily large ``n``)."""
    if n < 1:
        raise DomainError("valuation needs n >= 1")
    if p == 2:
        return (n & -n).bit_length() - 1
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def big_omega(n: int) -> int:
    return factorize(n).big_omega


def divisors(n: int) -> list[int]:
    divs = [1]
    f = factorize(n)
    for p, e in zip(f.primes, f.exponents):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    divs.sort()
    return divs


def divisors2(m: int, n: int) -> list[tuple[int, int]]:
    """All (u, v) with u | m and v | n, in lexicographic order."""
    if m < 1 or n < 1:
        raise DomainError(f"divisors2 needs m, n >= 1, got ({m}, {n})")
    dn = divisors(n)
    return [(u, v) for u in divisors(m) for v in dn]


@dataclass(frozen=True)
class BoxSpec:
    """A divisor-closed finite index set containing (1, 1).

    Square boxes {1..M}^2 are kept symbolic so huge ``M`` (e.g. 2**40) is fine
    as long as only reachable points are ever enumerated.
    """

    kind: str
    M: int = 0
    members: frozenset = field(default_factory=frozenset)
    added: tuple = ()

    def __contains__(self, idx) -> bool:
        m, n = idx
        if self.kind == "square":
            return 1 <= m <= self.M and 1 <= n <= self.M
        return (m, n) in self.members

    def __len__(self) -> int:
        return self.M * self.M if self.kind == "square" else len(self.members)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        if self.kind == "square":
            return ((m, n) for m in range(1, self.M + 1) for n in range(1, self.M + 1))
        return iter(sorted(self.members))

    @property
    def bounds(self) -> tuple[int, int]:
        if self.kind == "square":
            return self.M, self.M
        return max(m for m, _ in self.members), max(n for _, n in self.members)

    def describe(self) -> str:
        if self.kind == "square":
            return f"square M={self.M}"
        return f"explicit |box|={len(self.members)} bounds={self.bounds}"


def make_box(M: int | None = None, members: Iterable[tuple[int, int]] | None = None) -> BoxSpec:
    """Square box {1..M}^2, or the divisor closure of an explicit index set.

    For explicit sets the pairs added by the closure are reported in ``added``.
    """
    if M is not None:
        if M < 1:
            raise DomainError(f"box bound must be >= 1, got {M}")
        return BoxSpec("square", M=int(M))
    if members is None:
        raise DomainError("empty box spec")
    given = {(int(m), int(n)) for m, n in members}
    if not given:
        raise DomainError("empty box spec")
    if any(m < 1 or n < 1 for m, n in given):
        raise DomainError("box indices must be >= 1")
    closed = set()
    for m, n in given:
        closed.update(divisors2(m, n))
    added = tuple(sorted(closed - given))
    return BoxSpec("explicit", members=frozenset(closed), added=added)


def is_divisor_closed(points: Iterable[tuple[int, int]]) -> bool:
    pts = set(points)
    return all(d in pts for x in pts for d in divisors2(*x))


def reachable_points(
    generators: Iterable[tuple[int, int]], box: BoxSpec, limit: int = 1 << 22
) -> dict[tuple[int, int], int]:
    """Points of the monoid generated by ``generators`` lying in ``box``.

    Maps each point to its total prime-factor count Omega(m*n).  The formal
    inverse of a table is supported here, so nothing outside needs computing.
    """
    gens = sorted({g for g in generators if g != (1, 1)})
    gen_omega = [big_omega(u) + big_omega(v) for u, v in gens]
    seen = {(1, 1): 0}
    queue = deque([(1, 1)])
    while queue:
        x = queue.popleft()
        om = seen[x]
        for (u, v), go in zip(gens, gen_omega):
            y = (x[0] * u, x[1] * v)
            if y in seen or y not in box:
                continue
            seen[y] = om + go
            if len(seen) > limit:
                raise DomainError(f"more than {limit} reachable box points; use a smaller box")
            queue.append(y)
    return seen


def omega_table(M: int) -> np.ndarray:
    """Omega(k) for k = 0..M (entry 0 unused)."""
    om = np.zeros(M + 1, dtype=np.int64)
    for p in primes_upto(M):
        p = int(p)
        pk = p
        while pk <= M:
            om[pk::pk] += 1
            pk *= p
    return om

