"""Weights on N x N and their diagnostics.

A weight is a map w: N^2 -> [1, inf) with w(xy) <= w(x) w(y) under pointwise
multiplication of index pairs.  Every weight here can evaluate
log w(l**n, k**n) without materialising the huge integers, which is what the
growth and Beurling-Domar diagnostics need.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, SpecParseError
from .lattice import BoxSpec, nth_prime, valuation

LOG2 = math.log(2.0)


class Weight:
    """Base class.  Subclasses are frozen dataclasses and hence hashable."""

    def __call__(self, m: int, n: int):
        raise NotImplementedError

    def log(self, m: int, n: int) -> float:
        return math.log(self(m, n))

    def log_power(self, l: int, k: int, n: int) -> float:
        """log w(l**n, k**n)."""
        return self.log(l**n, k**n)

    def prime_root(self, axis: int, i: int, n: int) -> float:
        """w(p_i**n, 1)**(1/n) (axis 1) or w(1, p_i**n)**(1/n) (axis 2)."""
        p = nth_prime(i)
        l, k = (p, 1) if axis == 1 else (1, p)
        return math.exp(self.log_power(l, k, n) / n)

    def limit_rho(self, axis: int, i: int, depth: int = 48 << 20) -> float:
        """Estimate of lim_n w(p_i**n)**(1/n).

        Generic fallback: the increment (L(2D) - L(D)) / D of L(n) = log w(p**n)
        at a far depth D.  Families with a closed form override this.
        """
        p = nth_prime(i)
        l, k = (p, 1) if axis == 1 else (1, p)
        inc = (self.log_power(l, k, 2 * depth) - self.log_power(l, k, depth)) / depth
        return max(1.0, math.exp(inc))

    def lower_bound(self) -> float:
        return 1.0

    def grid(self, M1: int, M2: int) -> np.ndarray:
        """Array G with G[m-1, n-1] = w(m, n) for m <= M1, n <= M2."""
        out = np.empty((M1, M2))
        for m in range(1, M1 + 1):
            for n in range(1, M2 + 1):
                out[m - 1, n - 1] = float(self(m, n))
        return out

    @property
    def is_multiplicative(self) -> bool:
        return False

    @property
    def is_constant(self) -> bool:
        return False

    def spec(self) -> str:
        raise NotImplementedError


def _num(x):
    """Keep ints/Fractions exact, everything else as float."""
    if isinstance(x, (int, Fraction)):
        return x
    xf = float(x)
    return int(xf) if xf.is_integer() and abs(xf) < 2**53 else xf


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(x) if isinstance(x, float) else str(x)


@dataclass(frozen=True)
class Constant(Weight):
    c: object = 1

    def __post_init__(self):
        if self.c < 1:
            raise DomainError(f"constant weight must be >= 1, got {self.c}")
        object.__setattr__(self, "c", _num(self.c))

    def __call__(self, m, n):
        return self.c

    def log(self, m, n):
        return math.log(self.c)

    def log_power(self, l, k, n):
        return math.log(self.c)

    def prime_root(self, axis, i, n):
        return float(self.c) ** (1.0 / n)

    def limit_rho(self, axis, i, depth=0):
        return 1.0

    def lower_bound(self):
        return float(self.c)

    def grid(self, M1, M2):
        return np.full((M1, M2), float(self.c))

    @property
    def is_constant(self):
        return True

    def spec(self):
        return f"const:{_fmt(self.c)}"


@dataclass(frozen=True)
class MultiplicativeFromPrimes(Weight):
    """Multiplicative weight fixed by w(p_i, 1) = R_i and w(1, p_i) = S_i.

    ``R`` and ``S`` are tuples of ``(prime_index, value)``; absent indices are 1.
    """

    R: tuple = ()
    S: tuple = ()

    def __post_init__(self):
        for name in ("R", "S"):
            raw = getattr(self, name)
            items = raw.items() if isinstance(raw, dict) else raw
            clean = []
            for i, v in items:
                if int(i) < 1:
                    raise DomainError(f"prime index must be >= 1, got {i}")
                if v < 1:
                    raise DomainError(f"prime value must be >= 1, got {v} at {name}{i}")
                if v != 1:
                    clean.append((int(i), _num(v)))
            object.__setattr__(self, name, tuple(sorted(clean)))

    def value(self, axis: int, i: int):
        for j, v in self.R if axis == 1 else self.S:
            if j == i:
                return v
        return 1

    def __call__(self, m, n):
        out = 1
        for i, r in self.R:
            e = valuation(m, nth_prime(i))
            if e:
                out = out * r**e
        for i, s in self.S:
            e = valuation(n, nth_prime(i))
            if e:
                out = out * s**e
        return out

    def log(self, m, n):
        tot = 0.0
        for i, r in self.R:
            tot += valuation(m, nth_prime(i)) * math.log(r)
        for i, s in self.S:
            tot += valuation(n, nth_prime(i)) * math.log(s)
        return tot

    def log_power(self, l, k, n):
        return n * self.log(l, k)

    def prime_root(self, axis, i, n):
        return float(self.value(axis, i))

    def limit_rho(self, axis, i, depth=0):
        return float(self.value(axis, i))

    def grid(self, M1, M2):
        g = np.ones((M1, M2))
        for i, r in self.R:
            g *= (float(r) ** _valuations(M1, nth_prime(i)))[:, None]
        for i, s in self.S:
            g *= (float(s) ** _valuations(M2, nth_prime(i)))[None, :]
        return g

    @property
    def is_multiplicative(self):
        return True

    @property
    def is_constant(self):
        return not self.R and not self.S

    def spec(self):
        parts = [f"R{i}={_fmt(v)}" for i, v in self.R] + [f"S{i}={_fmt(v)}" for i, v in self.S]
        return "mfpi:" + ";".join(parts) if parts else "const:1"


def _valuations(M: int, p: int) -> np.ndarray:
    v = np.zeros(M, dtype=np.int64)
    pk = p
    while pk <= M:
        v[pk - 1 :: pk] += 1
        pk *= p
    return v


def mfp(R: dict | None = None, S: dict | None = None) -> MultiplicativeFromPrimes:
    return MultiplicativeFromPrimes(tuple((R or {}).items()), tuple((S or {}).items()))


@dataclass(frozen=True)
class TwoAdic(Weight):
    """w(m, n) = 2**(k+1) where 2**k exactly divides m*n."""

    def __call__(self, m, n):
        return 2 ** (valuation(m, 2) + valuation(n, 2) + 1)

    def log(self, m, n):
        return (valuation(m, 2) + valuation(n, 2) + 1) * LOG2

    def log_power(self, l, k, n):
        return (n * (valuation(l, 2) + valuation(k, 2)) + 1) * LOG2

    def prime_root(self, axis, i, n):
        return 2.0 ** ((n + 1) / n) if i == 1 else 2.0 ** (1.0 / n)

    def limit_rho(self, axis, i, depth=0):
        return 2.0 if i == 1 else 1.0

    def lower_bound(self):
        return 2.0

    def grid(self, M1, M2):
        return 2.0 ** (_valuations(M1, 2)[:, None] + _valuations(M2, 2)[None, :] + 1)

    def spec(self):
        return "twoadic"


@dataclass(frozen=True)
class AxisPower(Weight):
    """w(m, n) = m**alpha * n**beta."""

    alpha: object = 0
    beta: object = 0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise DomainError("axis powers must be >= 0")
        object.__setattr__(self, "alpha", _num(self.alpha))
        object.__setattr__(self, "beta", _num(self.beta))

    def __call__(self, m, n):
        if isinstance(self.alpha, int) and isinstance(self.beta, int):
            return m**self.alpha * n**self.beta
        return float(m) ** self.alpha * float(n) ** self.beta

    def log(self, m, n):
        return self.alpha * math.log(m) + self.beta * math.log(n)

    def log_power(self, l, k, n):
        return n * self.log(l, k)

    def prime_root(self, axis, i, n):
        return float(nth_prime(i)) ** float(self.alpha if axis == 1 else self.beta)

    def limit_rho(self, axis, i, depth=0):
        return self.prime_root(axis, i, 1)

    def grid(self, M1, M2):
        m = np.arange(1, M1 + 1, dtype=float)
        n = np.arange(1, M2 + 1, dtype=float)
        return np.outer(m ** float(self.alpha), n ** float(self.beta))

    @property
    def is_constant(self):
        return self.alpha == 0 and self.beta == 0

    def spec(self):
        return f"axispow:{_fmt(self.alpha)},{_fmt(self.beta)}"


@dataclass(frozen=True)
class PolyLog(Weight):
    """w(m, n) = (1 + log m)**alpha * (1 + log n)**beta (admissible, Beurling-Domar)."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise DomainError("polylog exponents must be >= 0")

    def __call__(self, m, n):
        return math.exp(self.log(m, n))

    def log(self, m, n):
        return self.alpha * math.log1p(math.log(m)) + self.beta * math.log1p(math.log(n))

    def log_power(self, l, k, n):
        return self.alpha * math.log1p(n * math.log(l)) + self.beta * math.log1p(n * math.log(k))

    def limit_rho(self, axis, i, depth=0):
        return 1.0

    def grid(self, M1, M2):
        m = np.log1p(np.log(np.arange(1, M1 + 1, dtype=float)))
        n = np.log1p(np.log(np.arange(1, M2 + 1, dtype=float)))
        return np.exp(self.alpha * m[:, None] + self.beta * n[None, :])

    @property
    def is_constant(self):
        return self.alpha == 0 and self.beta == 0

    def spec(self):
        return f"polylog:{_fmt(self.alpha)},{_fmt(self.beta)}"


@dataclass(frozen=True)
class MinWeight(Weight):
    """Pointwise minimum (not submultiplicative in general; check it)."""

    weights: tuple = ()

    def __post_init__(self):
        if not self.weights:
            raise DomainError("MinWeight needs at least one weight")

    def __call__(self, m, n):
        return min(w(m, n) for w in self.weights)

    def log(self, m, n):
        return min(w.log(m, n) for w in self.weights)

    def log_power(self, l, k, n):
        return min(w.log_power(l, k, n) for w in self.weights)

    def prime_root(self, axis, i, n):
        return min(w.prime_root(axis, i, n) for w in self.weights)

    def limit_rho(self, axis, i, depth=48 << 20):
        return min(w.limit_rho(axis, i, depth) for w in self.weights)

    def lower_bound(self):
        return min(w.lower_bound() for w in self.weights)

    def grid(self, M1, M2):
        return np.minimum.reduce([w.grid(M1, M2) for w in self.weights])

    def spec(self):
        return "min(" + ",".join(w.spec() for w in self.weights) + ")"


@dataclass(frozen=True)
class TableWeight(Weight):
    """Tabulated values on a finite set of indices; 1 everywhere else."""

    values: tuple = ()
    source: str = ""

    def __post_init__(self):
        raw = self.values.items() if isinstance(self.values, dict) else self.values
        clean = []
        for (m, n), v in raw:
            if v < 1:
                raise DomainError(f"table weight value {v} < 1 at ({m},{n})")
            clean.append(((int(m), int(n)), _num(v)))
        object.__setattr__(self, "values", tuple(sorted(clean)))
        object.__setattr__(self, "_lookup", dict(clean))

    def __call__(self, m, n):
        return self._lookup.get((m, n), 1)

    def log_power(self, l, k, n):
        if (l == 1 and k == 1) or not self.values:
            return self.log(1, 1)
        mmax = max(m for (m, _), _ in self.values)
        nmax = max(nn for (_, nn), _ in self.values)
        if n * math.log(l) > math.log(mmax) + 1e-9 or n * math.log(k) > math.log(nmax) + 1e-9:
            return 0.0
        return self.log(l**n, k**n)

    def limit_rho(self, axis, i, depth=0):
        return 1.0

    def spec(self):
        return self.source or "table"


def weight_eval(w: Weight, m: int, n: int):
    if m < 1 or n < 1:
        raise DomainError(f"weights live on N^2, got ({m}, {n})")
    return w(m, n)


# ---------------------------------------------------------------- diagnostics


@dataclass(frozen=True)
class GrowthProfile:
    axis: int
    prime_index: int
    estimates: tuple
    inf_estimate: float
    limit_estimate: float

    @property
    def rho(self) -> float:
        """Best available value of rho_i / mu_i: min of both estimates."""
        return min(self.inf_estimate, self.limit_estimate)

    @property
    def running_inf(self) -> list[float]:
        return list(np.minimum.accumulate(self.estimates))


def growth_profile(w: Weight, i: int, axis: int = 1, N: int = 48) -> GrowthProfile:
    """Roots w(p_i**n)**(1/n), n = 1..N, along one axis.

    ``inf_estimate`` is the minimum over n <= N, an upper bound on the limit
    (log w along powers is subadditive).  ``limit_estimate`` is a closed form
    when the weight family has one, else a far-depth increment estimate.
    """
    if N < 1:
        raise DomainError("growth depth N must be >= 1")
    if axis not in (1, 2):
        raise DomainError(f"axis must be 1 or 2, got {axis}")
    est = tuple(float(w.prime_root(axis, i, n)) for n in range(1, N + 1))
    return GrowthProfile(axis, i, est, min(est), float(w.limit_rho(axis, i)))


@dataclass
class AdmissibilityReport:
    admissible: bool
    max_rho: float
    witness: tuple | None  # (axis, prime_index, rho) of the largest growth
    profiles: list = field(default_factory=list)
    prime_count: int = 0
    depth: int = 0
    tol: float = 0.0

    @property
    def verdict(self) -> str:
        return "admissible" if self.admissible else "not-admissible"


def is_admissible(w: Weight, prime_count: int = 8, depth: int = 48, tol: float = 1e-6) -> AdmissibilityReport:
    """Finite-evidence check that every rho_i and mu_i (i <= prime_count) is 1.

    A semi-decision: passing means no growth was seen on the sampled primes.
    """
    if prime_count < 1 or depth < 1 or tol <= 0:
        raise DomainError("need prime_count >= 1, depth >= 1, tol > 0")
    profiles = [growth_profile(w, i, axis, depth) for axis in (1, 2) for i in range(1, prime_count + 1)]
    worst = max(profiles, key=lambda g: g.rho)
    ok = all(g.rho <= 1 + tol for g in profiles)
    return AdmissibilityReport(ok, worst.rho, (worst.axis, worst.prime_index, worst.rho),
                               profiles, prime_count, depth, tol)


@dataclass
class AlmostMonotoneReport:
    verdict: str  # admissible | monotone-with-constant | violated
    K: float | None = None
    witness: tuple | None = None  # ((m1, n1), (m2, n2)) attaining K
    box: str = ""


def _box_points(box: BoxSpec) -> np.ndarray:
    if box.kind == "square" and box.M > 128:
        raise DomainError("almost-monotone scan limited to boxes with at most 128^2 points")
    pts = np.array(list(box), dtype=np.int64)
    return pts


def scan_monotone_constant(w: Weight, box: BoxSpec):
    """Max of w(x1)/w(x2) over box pairs with m1 | m2 or n1 | n2."""
    pts = _box_points(box)
    M1, M2 = int(pts[:, 0].max()), int(pts[:, 1].max())
    g = w.grid(M1, M2)
    W = g[pts[:, 0] - 1, pts[:, 1] - 1]
    best, arg = -1.0, None
    for lo in range(0, len(pts), 256):
        blk = pts[lo : lo + 256]
        div = (pts[None, :, 0] % blk[:, None, 0] == 0) | (pts[None, :, 1] % blk[:, None, 1] == 0)
        ratio = np.where(div, W[lo : lo + 256, None] / W[None, :], -np.inf)
        k = int(np.argmax(ratio))
        r, c = divmod(k, ratio.shape[1])
        if ratio[r, c] > best:
            best = float(ratio[r, c])
            arg = (tuple(int(v) for v in blk[r]), tuple(int(v) for v in pts[c]))
    return best, arg


def is_almost_monotone(w: Weight, box: BoxSpec, K: float | None = None, **adm_kw) -> AlmostMonotoneReport:
    """Almost-monotonicity evidence on a finite box.

    Admissible weights pass outright.  Otherwise the smallest K valid on the
    box is the largest ratio w(m1,n1)/w(m2,n2) over pairs with m1|m2 or n1|n2;
    if a K is supplied and the scan exceeds it, the verdict is ``violated``.
    """
    if is_admissible(w, **adm_kw).admissible:
        return AlmostMonotoneReport("admissible", box=box.describe())
    kscan, arg = scan_monotone_constant(w, box)
    if K is not None and kscan > K * (1 + 1e-12):
        return AlmostMonotoneReport("violated", kscan, arg, box.describe())
    return AlmostMonotoneReport("monotone-with-constant", kscan, arg, box.describe())


@dataclass
class SubmultiplicativityReport:
    ok: bool
    worst_ratio: float  # max of w(x1 x2) / (w(x1) w(x2))
    witness: tuple | None
    box_only: bool  # True for tables: only products inside the table were checked


def check_submultiplicative(w: Weight, M: int = 32, rtol: float = 1e-12) -> SubmultiplicativityReport:
    """Exhaustive check of w(x1 x2) <= w(x1) w(x2) for x1, x2 in {1..M}^2."""
    table = isinstance(w, TableWeight)
    if table and w.values:
        M = max(max(m, n) for (m, n), _ in w.values)
    big = w.grid(M * M, M * M)
    small = big[:M, :M]
    r = np.arange(1, M + 1)
    worst, arg = 0.0, None
    for m1 in r:
        for n1 in r:
            prod = big[m1 * r[:, None] - 1, n1 * r[None, :] - 1]
            ratio = prod / (small[m1 - 1, n1 - 1] * small)
            if table:
                inside = (m1 * r[:, None] <= M) & (n1 * r[None, :] <= M)
                ratio = np.where(inside, ratio, 0.0)
            k = int(np.argmax(ratio))
            if ratio.flat[k] > worst:
                worst = float(ratio.flat[k])
                a, b = divmod(k, M)
                arg = ((int(m1), int(n1)), (int(a + 1), int(b + 1)))
    return SubmultiplicativityReport(worst <= 1 + rtol, worst, arg, table)


@dataclass
class BeurlingDomarReport:
    l: int
    k: int
    N: int
    partial: float
    growth_exponent: float  # gamma in L(n) ~ C n**gamma over the last doubling
    tail_estimate: float
    crude_tail_bound: float  # from log w(l**n, k**n) <= n log w(l, k)
    verdict: str  # convergent-evidence | divergent-evidence


def beurling_domar_partial(w: Weight, l: int, k: int, N: int = 10_000, linear_tol: float = 1e-3) -> BeurlingDomarReport:
    """Partial sum of log w(l**n, k**n) / (1 + n**2) for n <= N, with a tail model.

    The tail is modelled by fitting L(n) = log w(l**n, k**n) ~ C n**gamma
    between N and 2N: gamma >= 1 - linear_tol means linear growth and a
    divergent series, otherwise the tail is about L(N) / ((1 - gamma) N).
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    if l < 1 or k < 1:
        raise DomainError("(l, k) must lie in N^2")
    n = np.arange(1, N + 1, dtype=float)
    L = np.array([w.log_power(l, k, j) for j in range(1, N + 1)])
    partial = float(np.sum(L / (1.0 + n * n)))
    LN, L2N = w.log_power(l, k, N), w.log_power(l, k, 2 * N)
    base = w.log(l, k)
    crude = math.inf if base > 0 else 0.0
    if LN <= 0 and L2N <= 0:
        return BeurlingDomarReport(l, k, N, partial, 0.0, 0.0, crude, "convergent-evidence")
    gamma = math.log2(L2N / LN) if LN > 0 else 1.0
    if gamma >= 1 - linear_tol:
        return BeurlingDomarReport(l, k, N, partial, gamma, math.inf, crude, "divergent-evidence")
    tail = max(LN, L2N) / ((1 - gamma) * N)
    return BeurlingDomarReport(l, k, N, partial, gamma, tail, crude, "convergent-evidence")


def min_weight(ws: Sequence[Weight]) -> Weight:
    """Minimum of weights.

    Multiplicative inputs combine prime value by prime value, giving the
    largest multiplicative weight below every input.  A constant at or below
    every other input's floor absorbs the rest.  Anything else is a pointwise
    ``MinWeight``.
    """
    ws = list(ws)
    if not ws:
        raise DomainError("min_weight of an empty list")
    if len(ws) == 1:
        return ws[0]
    consts = [w for w in ws if isinstance(w, Constant)]
    if consts:
        c = min(consts, key=lambda w: w.c)
        if all(c.c <= w.lower_bound() for w in ws):
            return c
    if all(isinstance(w, MultiplicativeFromPrimes) for w in ws):
        out = {}
        for axis, name in ((1, "R"), (2, "S")):
            idx = {i for w in ws for i, _ in getattr(w, name)}
            out[name] = {i: min(w.value(axis, i) for w in ws) for i in idx}
        return mfp(out["R"], out["S"])
    return MinWeight(tuple(ws))


# ---------------------------------------------------------------- spec parsing

_NUM_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?")


def parse_number(tok: str):
    tok = tok.strip()
    if not _NUM_RE.fullmatch(tok):
        raise ValueError(f"not a number: {tok!r}")
    if "/" in tok:
        return Fraction(tok)
    if re.fullmatch(r"[+-]?\d+", tok):
        return int(tok)
    return float(tok)


class _Parser:
    def __init__(self, text: str, base_dir: Path | None):
        self.s = text
        self.i = 0
        self.base = base_dir or Path.cwd()

    def err(self, msg, at=None):
        raise SpecParseError(msg, 1, (self.i if at is None else at) + 1)

    def skip_ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self):
        self.skip_ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.err(f"expected {ch!r}")
        self.i += 1

    def ident(self):
        self.skip_ws()
        j = self.i
        while self.i < len(self.s) and (self.s[self.i].isalnum() or self.s[self.i] == "_"):
            self.i += 1
        if j == self.i:
            self.err("expected a weight name")
        return self.s[j : self.i].lower(), j

    def number(self):
        self.skip_ws()
        m = _NUM_RE.match(self.s, self.i)
        if not m:
            self.err("expected a number")
        self.i = m.end()
        return parse_number(m.group(0))

    def raw_arg(self):
        # file path: up to ',' or ')' at this nesting level
        self.skip_ws()
        j = self.i
        while self.i < len(self.s) and self.s[self.i] not in ",)":
            self.i += 1
        tok = self.s[j : self.i].strip()
        if not tok:
            self.err("expected a file path", j)
        return tok, j

    def weight(self) -> Weight:
        name, at = self.ident()
        try:
            return self._weight(name, at)
        except DomainError as exc:
            self.err(str(exc), at)

    def _weight(self, name, at) -> Weight:
        if name == "min":
            self.expect("(")
            items = [self.weight()]
            while self.peek() == ",":
                self.i += 1
                items.append(self.weight())
            self.expect(")")
            return min_weight(items)
        if name == "twoadic":
            return TwoAdic()
        if name in ("const", "axispow", "polylog", "mfp", "mfpi"):
            self.expect(":")
        else:
            self.err(f"unknown weight {name!r}", at)
        if name == "const":
            return Constant(self.number())
        if name in ("axispow", "polylog"):
            a = self.number()
            self.expect(",")
            b = self.number()
            return AxisPower(a, b) if name == "axispow" else PolyLog(float(a), float(b))
        if name == "mfp":
            path, j = self.raw_arg()
            p = Path(path)
            if not p.is_absolute():
                p = self.base / p
            return load_mfp_file(p)
        # mfpi:R1=3;S2=1.5
        R, S = {}, {}
        while True:
            self.skip_ws()
            j = self.i
            m = re.compile(r"([RSrs])(\d+)\s*=").match(self.s, self.i)
            if not m:
                self.err("expected R<i>=<value> or S<i>=<value>", j)
            self.i = m.end()
            (R if m.group(1) in "Rr" else S)[int(m.group(2))] = self.number()
            if self.peek() != ";":
                break
            self.i += 1
        return mfp(R, S)


def parse_weight(text: str, base_dir: Path | None = None) -> Weight:
    """Parse a weight spec.

    Grammar::

        spec    := "const:" NUM | "twoadic" | "axispow:" NUM "," NUM
                 | "polylog:" NUM "," NUM | "mfp:" PATH | "mfpi:" ENTRY (";" ENTRY)*
                 | "min(" spec ("," spec)* ")"
        ENTRY   := ("R" | "S") INT "=" NUM
        NUM     := decimal, float with exponent, or "p/q"

    An ``mfp`` file holds lines ``axis i value`` (axis 1 or 2); ``#`` starts
    a comment.  Errors raise ``SpecParseError`` carrying line and column.
    """
    p = _Parser(text, base_dir)
    w = p.weight()
    p.skip_ws()
    if p.i != len(text):
        p.err("trailing characters")
    return w


def load_mfp_file(path: Path) -> MultiplicativeFromPrimes:
    R, S = {}, {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise SpecParseError(f"cannot read mfp file: {exc.strerror}", source=str(path)) from exc
    for ln, line in enumerate(lines, 1):
        body = line.split("#", 1)[0]
        toks = [(m.group(0), m.start()) for m in re.finditer(r"\S+", body)]
        if not toks:
            continue
        if len(toks) != 3:
            raise SpecParseError("expected 'axis i value'", ln, toks[0][1] + 1, str(path))
        (ax, cax), (idx, cidx), (val, cval) = toks
        if ax not in ("1", "2"):
            raise SpecParseError(f"axis must be 1 or 2, got {ax!r}", ln, cax + 1, str(path))
        if not idx.isdigit() or int(idx) < 1:
            raise SpecParseError(f"bad prime index {idx!r}", ln, cidx + 1, str(path))
        try:
            v = parse_number(val)
        except ValueError:
            raise SpecParseError(f"bad value {val!r}", ln, cval + 1, str(path)) from None
        if v < 1:
            raise SpecParseError(f"value {val} < 1", ln, cval + 1, str(path))
        (R if ax == "1" else S)[int(idx)] = v
    return mfp(R, S)

