"""Semicharacters on N x N, Gel'fand transforms and spectral-minimum sampling.

A semicharacter is multiplicative with chi(1,1) = 1, so it is fixed by its
values at (p_i, 1) and (1, p_i).  Only finitely many values are stored; the
rest come from a default profile:

* ``one``   -- chi(p, 1) = chi(1, p) = 1
* ``zero``  -- chi(p, 1) = chi(1, p) = 0
* ``point`` -- chi(p, 1) = p**(-s1), chi(1, p) = p**(-s2)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, SpecParseError
from .lattice import factorize, nth_prime, prime_index
from .series import CoeffTable, evaluate_many
from .weights import Constant, MultiplicativeFromPrimes, Weight, growth_profile, is_admissible, parse_number

PROFILES = ("one", "zero", "point")


@dataclass(frozen=True)
class Semicharacter:
    s_values: tuple = ()  # ((prime_index, value), ...) on the first axis
    t_values: tuple = ()  # same, second axis
    default: str = "one"
    s1: complex = 0j
    s2: complex = 0j
    label: str = ""

    def __post_init__(self):
        if self.default not in PROFILES:
            raise DomainError(f"unknown default profile {self.default!r}")
        for name in ("s_values", "t_values"):
            raw = getattr(self, name)
            items = raw.items() if isinstance(raw, dict) else raw
            object.__setattr__(self, name, tuple(sorted((int(i), complex(v)) for i, v in items)))
        object.__setattr__(self, "_s", dict(self.s_values))
        object.__setattr__(self, "_t", dict(self.t_values))

    def value(self, axis: int, i: int) -> complex:
        table = self._s if axis == 1 else self._t
        if i in table:
            return table[i]
        if self.default == "one":
            return 1 + 0j
        if self.default == "zero":
            return 0j
        s = self.s1 if axis == 1 else self.s2
        return cmath.exp(-s * math.log(nth_prime(i)))

    def __call__(self, m: int, n: int) -> complex:
        out = 1 + 0j
        for axis, x in ((1, m), (2, n)):
            f = factorize(x)
            for p, e in zip(f.primes, f.exponents):
                out *= self.value(axis, prime_index(p)) ** e
        return out

    def describe(self) -> str:
        if self.label:
            return self.label
        parts = [f"s{i}={v!r}" for i, v in self.s_values] + [f"t{i}={v!r}" for i, v in self.t_values]
        tail = f"default={self.default}"
        if self.default == "point":
            tail += f"({self.s1!r},{self.s2!r})"
        return "explicit[" + ", ".join(parts + [tail]) + "]"


def _check_h2(s1, s2):
    if complex(s1).real < 0 or complex(s2).real < 0:
        raise DomainError(f"({s1}, {s2}) lies outside H^2")


def point_character(s1: complex, s2: complex = 0) -> Semicharacter:
    """chi(m, n) = m**(-s1) n**(-s2); transforms under it evaluate the series."""
    _check_h2(s1, s2)
    return Semicharacter(default="point", s1=complex(s1), s2=complex(s2), label=f"point:{complex(s1)!r},{complex(s2)!r}")


def line_character(sigma: float, t1: float, t2: float) -> Semicharacter:
    """Point character at (sigma + i t1, sigma + i t2)."""
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    ch = point_character(complex(sigma, t1), complex(sigma, t2))
    return Semicharacter(default="point", s1=ch.s1, s2=ch.s2, label=f"line:{sigma!r},{t1!r},{t2!r}")


def trivial_character() -> Semicharacter:
    return Semicharacter(default="one", label="trivial")


def random_character(sigma: float, seed: int, primes: int = 16) -> Semicharacter:
    """|chi(p_i)| = p_i**(-sigma) with independent uniform phases on the first ``primes`` primes."""
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    th = rng.uniform(0.0, 2 * math.pi, size=(2, primes))
    s = {i: nth_prime(i) ** (-sigma) * cmath.exp(1j * th[0, i - 1]) for i in range(1, primes + 1)}
    t = {i: nth_prime(i) ** (-sigma) * cmath.exp(1j * th[1, i - 1]) for i in range(1, primes + 1)}
    return Semicharacter(s, t, default="point", s1=complex(sigma), s2=complex(sigma),
                         label=f"rand:{sigma!r},{seed}")


def load_character_file(path) -> Semicharacter:
    """Lines ``axis i re im``; unlisted primes take the value 1."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise SpecParseError(f"cannot read character file: {exc.strerror}", source=str(path)) from exc
    s, t = {}, {}
    for ln, line in enumerate(lines, 1):
        body = line.split("#", 1)[0]
        toks = body.split()
        if not toks:
            continue
        col = len(line) - len(line.lstrip()) + 1
        if len(toks) not in (3, 4) or toks[0] not in ("1", "2") or not toks[1].isdigit() or int(toks[1]) < 1:
            raise SpecParseError("expected 'axis i re [im]'", ln, col, str(path))
        try:
            v = complex(*(float(parse_number(x)) for x in toks[2:]))
        except ValueError:
            raise SpecParseError("bad value", ln, col, str(path)) from None
        (s if toks[0] == "1" else t)[int(toks[1])] = v
    return Semicharacter(s, t, default="one", label=f"explicit:{path}")


def parse_complex(tok: str) -> complex:
    tok = tok.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(tok)
    except ValueError:
        raise ValueError(f"not a complex number: {tok!r}") from None


def parse_character(spec: str, base_dir: Path | None = None) -> Semicharacter:
    """``point:<s1>,<s2>`` | ``line:<sigma>,<t1>,<t2>`` | ``rand:<sigma>,<seed>`` | ``explicit:<file>``."""
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise SpecParseError("expected '<kind>:<args>'", 1, 1)
    col = len(kind) + 2
    kind = kind.strip().lower()
    try:
        if kind == "explicit":
            p = Path(arg.strip())
            return load_character_file(p if p.is_absolute() or base_dir is None else base_dir / p)
        args = [a for a in arg.split(",")]
        if kind == "point" and len(args) == 2:
            return point_character(parse_complex(args[0]), parse_complex(args[1]))
        if kind == "line" and len(args) == 3:
            return line_character(*(float(a) for a in args))
        if kind == "rand" and len(args) == 2:
            return random_character(float(args[0]), int(args[1]))
    except (ValueError, DomainError) as exc:
        if isinstance(exc, SpecParseError):
            raise
        raise SpecParseError(str(exc), 1, col) from None
    raise SpecParseError(f"bad character spec {spec!r}", 1, 1)


# ------------------------------------------------------------------ transforms


def gelfand_transform(a: CoeffTable, chi: Semicharacter) -> complex:
    """sum a(m, n) chi(m, n) over the (finite) support, in index order."""
    terms = [complex(c) * chi(m, n) for (m, n), c in a.items()]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


@dataclass
class OmegaBoundReport:
    bounded: bool
    worst_ratio: float  # max |chi(m,n)| / w(m,n) over the trials
    worst_at: tuple
    trials: int
    first_violation: tuple | None = None  # smallest violating trial, with its ratio


def default_trials(primes: int = 6, max_exp: int = 10, n_random: int = 200, seed: int = 0) -> list[tuple[int, int]]:
    """(1,1), pure prime powers on both axes, pairwise mixed powers and random small tuples."""
    ps = [nth_prime(i) for i in range(1, primes + 1)]
    pure = [(p**k, 1) for p in ps for k in range(1, max_exp + 1)]
    pure += [(1, p**k) for p in ps for k in range(1, max_exp + 1)]
    small = [x for x in pure if max(x) <= 64]
    mixed = [(a[0] * b[0], a[1] * b[1]) for a in small for b in small]
    rng = np.random.default_rng(seed)
    rand = []
    for _ in range(n_random):
        e = rng.integers(0, 4, size=(2, primes))
        m = math.prod(p**int(k) for p, k in zip(ps, e[0]))
        n = math.prod(p**int(k) for p, k in zip(ps, e[1]))
        rand.append((m, n))
    return sorted({(1, 1), *pure, *mixed, *rand})


def check_omega_bounded(chi: Semicharacter, w: Weight, trials=None, rtol: float = 1e-12) -> OmegaBoundReport:
    """Evidence that |chi(m, n)| <= w(m, n) on a finite trial set (log domain)."""
    trials = default_trials() if trials is None else list(trials)
    worst, at, first = -math.inf, (1, 1), None
    for m, n in trials:
        c = abs(chi(m, n))
        lr = (math.log(c) if c > 0 else -math.inf) - w.log(m, n)
        if lr > worst:
            worst, at = lr, (m, n)
        if first is None and lr > math.log1p(rtol):
            first = ((m, n), math.exp(lr))
    ratio = math.exp(worst) if worst > -math.inf else 0.0
    return OmegaBoundReport(ratio <= 1 + rtol, ratio, at, len(trials), first)


# ------------------------------------------------------------------ spectral minimum


@dataclass
class SpectralMinReport:
    min_abs_value: float
    argmin: Semicharacter
    samples: int
    method: str  # grid | monte-carlo
    seed: int
    grid_min: float
    mc_min: float
    radii: dict = field(default_factory=dict)
    upper_bound: bool = True
    caveat: str = ("sampled minimum: an upper bound on the infimum over the Gel'fand space; "
                   "the boundary grid is not proven to reach the infimum over H^2")


def _support_primes(a: CoeffTable):
    p1, p2 = set(), set()
    for m, n in a.support:
        p1.update(prime_index(p) for p in factorize(m).primes)
        p2.update(prime_index(p) for p in factorize(n).primes)
    return sorted(p1), sorted(p2)


def _exponent_matrix(a: CoeffTable, coords):
    E = np.zeros((len(a), len(coords)), dtype=np.int64)
    pos = {c: j for j, c in enumerate(coords)}
    for r, (m, n) in enumerate(a.support):
        for axis, x in ((1, m), (2, n)):
            f = factorize(x)
            for p, e in zip(f.primes, f.exponents):
                E[r, pos[(axis, prime_index(p))]] = e
    return E


def spectral_disk_radii(w: Weight, coords, depth: int = 48) -> dict:
    """Per (axis, prime) radius of the disk product searched: rho_i / mu_i of w."""
    if isinstance(w, MultiplicativeFromPrimes):
        return {c: float(w.value(*c)) for c in coords}
    if is_admissible(w, prime_count=max([i for _, i in coords] + [1]), depth=depth).admissible:
        return {c: 1.0 for c in coords}
    return {c: growth_profile(w, c[1], c[0], depth).rho for c in coords}


def spectral_min_estimate(a: CoeffTable, w: Weight | None = None, n_random: int = 4000,
                          grid: int = 4096, seed: int = 0) -> SpectralMinReport:
    """Sampled minimum of |Gel'fand transform of a| over w-bounded characters.

    Two samplers, the smaller result wins:

    * a deterministic boundary grid of line characters (sigma = 0) with t on
      each active axis spanning [0, 2 pi / log p) for the smallest active p;
    * Monte-Carlo characters in the product of disks |z| <= rho on the primes
      touched by supp(a) (half uniform in the disks, half on their rims),
      kept only if they pass an omega-boundedness check.

    The result is an upper bound on the true infimum.
    """
    w = w or Constant(1)
    P1, P2 = _support_primes(a)
    coords = [(1, i) for i in P1] + [(2, i) for i in P2]
    coef = np.array([complex(c) for _, c in a.items()])
    if not coords:
        # only (1,1) in the support: constant transform
        chi = trivial_character()
        val = abs(gelfand_transform(a, chi))
        return SpectralMinReport(val, chi, 1, "grid", seed, val, val)

    # boundary grid
    per_axis = grid if (not P1 or not P2) else max(2, math.isqrt(grid))
    axes = []
    for P in (P1, P2):
        if P:
            T = 2 * math.pi / math.log(nth_prime(P[0]))
            axes.append(np.linspace(0.0, T, per_axis, endpoint=False))
        else:
            axes.append(np.zeros(1))
    T1, T2 = np.meshgrid(axes[0], axes[1], indexing="ij")
    t1, t2 = T1.ravel(), T2.ravel()
    vals = np.abs(evaluate_many(a, 1j * t1, 1j * t2))
    g = int(np.argmin(vals))
    grid_min = float(vals[g])
    grid_arg = line_character(0.0, float(t1[g]), float(t2[g]))

    # Monte-Carlo over the disk product
    radii = spectral_disk_radii(w, coords)
    rng = np.random.default_rng(seed)
    d = len(coords)
    R = np.array([radii[c] for c in coords])
    rad = np.sqrt(rng.uniform(size=(n_random, d)))
    rad[n_random // 2 :] = 1.0
    Z = R * rad * np.exp(1j * rng.uniform(0, 2 * math.pi, size=(n_random, d)))
    E = _exponent_matrix(a, coords)
    chis = np.prod(Z[:, None, :] ** E[None, :, :], axis=2)
    mc_vals = np.abs(chis @ coef)
    if not isinstance(w, MultiplicativeFromPrimes) and any(r > 1 for r in R):
        mc_vals = np.where(_omega_ok(Z, coords, w), mc_vals, np.inf)
    k = int(np.argmin(mc_vals))
    mc_min = float(mc_vals[k])

    if mc_min < grid_min:
        s = {i: Z[k, j] for j, (ax, i) in enumerate(coords) if ax == 1}
        t = {i: Z[k, j] for j, (ax, i) in enumerate(coords) if ax == 2}
        arg, method = Semicharacter(s, t, default="one"), "monte-carlo"
    else:
        arg, method = grid_arg, "grid"
    kval = abs(gelfand_transform(a, arg))
    return SpectralMinReport(kval, arg, len(t1) + n_random, method, seed, grid_min, mc_min,
                             {f"{'s' if ax == 1 else 't'}{i}": r for (ax, i), r in radii.items()})


def _omega_ok(Z: np.ndarray, coords, w: Weight, max_exp: int = 8) -> np.ndarray:
    """Vectorized omega-boundedness of sampled characters on structured trials."""
    trials = []
    for j in range(len(coords)):
        for k in range(1, max_exp + 1):
            e = np.zeros(len(coords), dtype=np.int64)
            e[j] = k
            trials.append(e)
    for j in range(len(coords)):
        for jj in range(j + 1, len(coords)):
            for k in range(1, 4):
                for kk in range(1, 4):
                    e = np.zeros(len(coords), dtype=np.int64)
                    e[j], e[jj] = k, kk
                    trials.append(e)
    Et = np.array(trials)
    logw = []
    for e in Et:
        m = math.prod(nth_prime(i) ** int(x) for (ax, i), x in zip(coords, e) if ax == 1)
        n = math.prod(nth_prime(i) ** int(x) for (ax, i), x in zip(coords, e) if ax == 2)
        logw.append(w.log(m, n))
    with np.errstate(divide="ignore"):
        logz = np.log(np.abs(Z))
    lhs = logz @ Et.T
    return np.all(lhs <= np.array(logw)[None, :] + 1e-12, axis=1)
