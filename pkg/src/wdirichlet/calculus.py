"""Resolvents, circle-contour functional calculus and weight shrinking.

The functional calculus discretizes

    phi(a) = (1 / 2 pi i) * integral over |lam - c| = R of phi(lam) (lam delta - a)^{-1} dlam

with the trapezoidal rule on equispaced nodes.  With lam_k = c + R e^{i theta_k}
and dlam = i (lam - c) dtheta this is

    phi(a) ~ (1/N) sum_k phi(lam_k) (lam_k - c) P_{lam_k}.

All resolvents share the support of the monoid generated by supp(a), so the
node sweep runs the inversion recursion once, vectorized over the nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, NotAUnitError
from .exact import to_exact
from .gelfand import _exponent_matrix, _support_primes, spectral_min_estimate
from .lattice import BoxSpec, make_box, nth_prime, reachable_points
from .series import CoeffTable, basis, box_identity_residual, convolve, invert_formal, weighted_p_norm
from .weights import Constant, MultiplicativeFromPrimes, Weight, growth_profile, is_admissible

ENCLOSURE_MARGIN = 0.01
HALVING_FLOOR = 1e-12  # node-halving estimates below this are roundoff


# ------------------------------------------------------------------ resolvents


@dataclass
class ResolventSample:
    lam: complex
    table: CoeffTable
    residual: float


def resolvent(a: CoeffTable, lam, box: BoxSpec, tol: float = 1e-9) -> ResolventSample:
    """P_lam = (lam delta - a)^{-1} truncated to ``box``.

    In exact mode ``lam`` may be an int, Fraction or Gaussian rational and the
    residual is exactly 0.
    """
    lam = to_exact(lam) if a.mode == "exact" else complex(lam)
    shifted = basis(1, 1, a.mode).scale(lam) - a
    if shifted[(1, 1)] == 0:
        raise NotAUnitError(f"not a unit: lambda = a(1,1) = {lam}, the formal resolvent is undefined")
    P = invert_formal(shifted, box)
    res = box_identity_residual(shifted, P, box)
    if float(res) > tol:
        raise DomainError(f"resolvent residual {float(res):.3e} exceeds tol {tol:g}")
    return ResolventSample(complex(lam), P, float(res))


def _resolvent_stack(a: CoeffTable, lams: np.ndarray, box: BoxSpec):
    """Points of the inverse support and an array B[point, node] of P_{lam_node}."""
    a = a.to_float()
    a00 = complex(a[(1, 1)])
    gens = [(k, complex(v)) for k, v in a.items() if k != (1, 1) and k in box]
    pts = reachable_points([g for g, _ in gens], box)
    order = sorted(pts, key=lambda x: (pts[x], x))
    inv = 1.0 / (lams - a00)
    if not np.all(np.isfinite(inv)):
        raise NotAUnitError("not a unit: a contour node coincides with a(1,1)")
    index = {x: j for j, x in enumerate(order)}
    B = np.zeros((len(order), len(lams)), dtype=np.complex128)
    B[0] = inv
    for j, x in enumerate(order[1:], 1):
        s = np.zeros(len(lams), dtype=np.complex128)
        for (u, v), g in gens:
            if x[0] % u == 0 and x[1] % v == 0:
                y = index.get((x[0] // u, x[1] // v))
                if y is not None:
                    s += g * B[y]
        B[j] = inv * s
    return order, B


# ------------------------------------------------------------------ contours and range


@dataclass(frozen=True)
class ContourSpec:
    center: complex
    radius: float
    node_count: int = 256

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("contour radius must be positive")
        if self.node_count < 8 or self.node_count % 2:
            raise DomainError("node_count must be even and >= 8")

    def nodes(self, count: int | None = None) -> np.ndarray:
        N = count or self.node_count
        th = 2 * np.pi * np.arange(N) / N
        return complex(self.center) + self.radius * np.exp(1j * th)


@dataclass
class RangeEstimate:
    """Sampled values of the transform plus two disks that contain the whole range."""

    samples: np.ndarray
    norm_disk: tuple  # (0, ||a||_1)
    center_disk: tuple  # (a(1,1), ||a - a(1,1) delta||_1)

    def max_distance(self, c: complex) -> float:
        return float(np.max(np.abs(self.samples - c))) if len(self.samples) else 0.0


def range_estimate(a: CoeffTable, n_samples: int = 4096, seed: int = 0) -> RangeEstimate:
    """Sample the closure of {a~(s1, s2) : (s1, s2) in H^2}.

    By Kronecker's theorem the closure is the set of values with
    z_p = p^(-sigma_axis) e^(i theta_p): independent phases per prime and one
    damping exponent per axis.  Half the samples sit on sigma = 0.
    """
    a = a.to_float()
    coef = np.array([complex(c) for _, c in a.items()])
    a00 = complex(a[(1, 1)])
    l1 = float(weighted_p_norm(a))
    rest = float(weighted_p_norm(a - basis(1, 1).scale(a00)))
    P1, P2 = _support_primes(a)
    coords = [(1, i) for i in P1] + [(2, i) for i in P2]
    if not coords:
        return RangeEstimate(np.array([a00]), (0j, l1), (a00, rest))
    rng = np.random.default_rng(seed)
    sig = rng.exponential(1.0, size=(n_samples, 2))
    sig[: n_samples // 2] = 0.0
    axis = np.array([ax - 1 for ax, _ in coords])
    logp = np.log([float(nth_prime(i)) for _, i in coords])
    theta = rng.uniform(0, 2 * math.pi, size=(n_samples, len(coords)))
    Z = np.exp(-sig[:, axis] * logp) * np.exp(1j * theta)
    E = _exponent_matrix(a, coords)
    vals = np.prod(Z[:, None, :] ** E[None, :, :], axis=2) @ coef
    return RangeEstimate(vals, (0j, l1), (a00, rest))


@dataclass
class EnclosureReport:
    ok: bool
    max_sample_distance: float
    allowed: float
    certified: bool  # the center disk itself fits inside the margin


def check_enclosure(contour: ContourSpec, rng_est: RangeEstimate, margin: float = ENCLOSURE_MARGIN) -> EnclosureReport:
    c = complex(contour.center)
    allowed = contour.radius * (1 - margin)
    d = rng_est.max_distance(c)
    c0, r0 = rng_est.center_disk
    return EnclosureReport(d <= allowed, d, allowed, abs(complex(c0) - c) + r0 <= allowed)


# ------------------------------------------------------------------ phi catalog


@dataclass(frozen=True)
class Phi:
    """A named holomorphic function: reciprocal, exp, log (principal) or poly."""

    name: str
    coeffs: tuple = ()  # poly only, constant term first

    def __post_init__(self):
        if self.name not in ("reciprocal", "exp", "log", "poly"):
            raise DomainError(f"unknown phi {self.name!r}")
        if self.name == "poly" and not self.coeffs:
            raise DomainError("poly needs at least one coefficient")

    def __call__(self, z: np.ndarray) -> np.ndarray:
        if self.name == "reciprocal":
            return 1.0 / z
        if self.name == "exp":
            return np.exp(z)
        if self.name == "log":
            return np.log(z)
        out = np.zeros_like(z)
        for c in reversed(self.coeffs):
            out = out * z + complex(c)
        return out

    def check(self, contour: ContourSpec) -> None:
        """Raise unless phi is holomorphic on a neighbourhood of the closed contour disk."""
        c, R = complex(contour.center), contour.radius
        if self.name == "reciprocal" and not abs(c) > R:
            raise DomainError(f"reciprocal needs 0 outside the contour: |c| = {abs(c):.6g} <= R = {R:.6g}")
        if self.name == "log":
            dist = abs(c) if c.real >= 0 else abs(c.imag)
            if not dist > R:
                raise DomainError(f"principal log: branch cut (-inf, 0] meets the contour disk (distance {dist:.6g} <= R = {R:.6g})")

    def describe(self) -> str:
        if self.name != "poly":
            return self.name
        return "poly:" + ",".join(repr(complex(c)) if complex(c).imag else repr(complex(c).real) for c in self.coeffs)


def parse_phi(text: str) -> Phi:
    """``reciprocal`` | ``exp`` | ``log`` | ``identity`` | ``poly:c0,c1,...`` (constant term first)."""
    from .gelfand import parse_complex

    kind, _, arg = text.strip().partition(":")
    kind = kind.lower()
    if kind == "identity":
        return Phi("poly", (0j, 1 + 0j))
    if kind == "poly":
        try:
            return Phi("poly", tuple(parse_complex(t) for t in arg.split(",") if t.strip()))
        except ValueError as exc:
            raise DomainError(str(exc)) from None
    return Phi(kind)


def poly_eval_direct(a: CoeffTable, coeffs, box: BoxSpec) -> CoeffTable:
    """q(a) by Horner's rule with truncated convolution (oracle for the contour sum)."""
    out = CoeffTable({}, a.mode)
    one = basis(1, 1, a.mode)
    for c in reversed(list(coeffs)):
        c = to_exact(c) if a.mode == "exact" else complex(c)
        out = convolve(out, a, box) + one.scale(c)
    return out.restrict(box)


# ------------------------------------------------------------------ functional calculus


@dataclass
class FunCalcResult:
    table: CoeffTable
    halving_error: float  # max entry |S_N - S_{N/2}|
    node_count: int
    enclosure: EnclosureReport
    converged: bool


def _contour_sums(a: CoeffTable, phi: Phi, contour: ContourSpec, box: BoxSpec):
    N = contour.node_count
    lams = contour.nodes()
    order, B = _resolvent_stack(a, lams, box)
    w = phi(lams) * (lams - complex(contour.center))
    full = B @ w / N
    half = B[:, ::2] @ w[::2] / (N // 2)
    return order, full, half


def functional_calculus(a: CoeffTable, phi: Phi, contour: ContourSpec, box: BoxSpec,
                        tol: float | None = None, range_est: RangeEstimate | None = None) -> FunCalcResult:
    """phi(a) on ``box`` by the trapezoidal contour sum, plus a node-halving error estimate."""
    phi.check(contour)
    rng_est = range_est or range_estimate(a)
    enc = check_enclosure(contour, rng_est)
    if not enc.ok:
        raise DomainError(
            f"contour does not enclose the sampled range: max |a~ - c| = {enc.max_sample_distance:.6g}"
            f" > {enc.allowed:.6g} (radius less {ENCLOSURE_MARGIN:.0%} margin)")
    order, full, half = _contour_sums(a, phi, contour, box)
    err = float(np.max(np.abs(full - half))) if len(order) else 0.0
    table = CoeffTable(dict(zip(order, full.tolist())), "float")
    return FunCalcResult(table, err, contour.node_count, enc, tol is None or err <= tol)


# ------------------------------------------------------------------ growth scans


@dataclass
class GrowthReport:
    depths: list
    sums: list  # weighted p-norm partial sums of the inverse, one per depth
    increments: list
    classification: str  # bounded-evidence | divergent-evidence | inconclusive
    rate: float  # least-squares slope of sums against log2(depth) over the window
    p: float = 1
    weight: str = ""


def _fit_slope(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        return 0.0
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def parse_depths(text: str) -> list[int]:
    """``2,4,8`` or the octave range ``2^1..2^40``."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..")
        b1, _, e1 = lo.partition("^")
        b2, _, e2 = hi.partition("^")
        if not (e1 and e2) or b1 != b2:
            raise DomainError(f"bad depth range {text!r}; expected b^i..b^j")
        return [int(b1) ** k for k in range(int(e1), int(e2) + 1)]
    return [int(t) for t in text.split(",") if t.strip()]


def growth_scan(a: CoeffTable, w: Weight, p=1, depths=(), slope_tol: float = 0.1,
                bounded_tol: float = 1e-9, window: int = 4) -> GrowthReport:
    """Weighted p-norm partial sums of the formal inverse on square boxes of each depth.

    The inverse is computed once on the largest box; its restriction to a
    smaller box is the inverse there, since the recursion only looks at divisors.
    """
    depths = [int(d) for d in depths]
    if not depths or any(d < 1 for d in depths) or any(x >= y for x, y in zip(depths, depths[1:])):
        raise DomainError("depths must be a nonempty increasing list of positive integers")
    if a[(1, 1)] == 0:
        raise NotAUnitError("not a unit: a(1,1) = 0, no formal inverse")
    b = invert_formal(a, make_box(depths[-1]))
    exact = b.mode == "exact" and p == 1 and b.is_real()
    keyed = []
    for (m, n), c in b.items():
        if exact:
            t = abs(Fraction(c)) * to_exact(w(m, n))
        else:
            t = math.exp(p * math.log(abs(complex(c))) + w.log(m, n))
        keyed.append((max(m, n), t))
    keyed.sort(key=lambda kt: kt[0])
    groups, j = [], 0
    for d in depths:
        g = []
        while j < len(keyed) and keyed[j][0] <= d:
            g.append(keyed[j][1])
            j += 1
        groups.append(sum(g, Fraction(0)) if exact else math.fsum(g))
    if exact:
        sums, acc = [], Fraction(0)
        for g in groups:
            acc += g
            sums.append(acc)
    else:
        sums = [math.fsum(groups[: k + 1]) for k in range(len(groups))]
    incs = [sums[0]] + [y - x for x, y in zip(sums, sums[1:])]
    tail = slice(-window, None)
    rate = _fit_slope([math.log2(d) for d in depths[tail]], [float(s) for s in sums[tail]])
    last, total = float(incs[-1]), float(sums[-1])
    if rate >= slope_tol:
        cls = "divergent-evidence"
    elif last <= bounded_tol * (1 + total):
        cls = "bounded-evidence"
    else:
        cls = "inconclusive"
    return GrowthReport(depths, sums, incs, cls, rate, p, w.spec())


# ------------------------------------------------------------------ weight shrinking


@dataclass
class ShrinkCandidate:
    r: float
    eligible: bool  # 1 < r <= rho
    report: GrowthReport


@dataclass
class ShrinkResult:
    nu: Weight | None
    best_r: float | None
    axis: int | None
    prime_index: int | None
    rho: float | None
    candidates: list = field(default_factory=list)
    nu_between_1_and_w: bool | None = None
    nu_constant: bool | None = None
    warnings: list = field(default_factory=list)


DEFAULT_SHRINK_DEPTHS = tuple(2**k for k in range(1, 513))


def shrink_weight_search(a: CoeffTable, w: Weight, r_grid, box: BoxSpec | None = None,
                         depths=DEFAULT_SHRINK_DEPTHS, p=1, prime_count: int = 8,
                         spectral_check: bool = True) -> ShrinkResult:
    """Grid search for the largest r with nu(p_i) = r (all other primes 1) keeping a^{-1} in l^p(nu).

    Only one prime is perturbed: the first (axis, i) whose growth number
    exceeds 1.  Admissible w needs no shrinking and is returned unchanged.
    """
    box = box or make_box(64)
    warnings = []
    if spectral_check:
        rep = spectral_min_estimate(a, Constant(1), n_random=1000, grid=1024)
        if rep.min_abs_value <= 1e-9:
            warnings.append(f"a may not be bounded away from zero: sampled min |a~| = {rep.min_abs_value:.3e}")
    adm = is_admissible(w, prime_count=prime_count)
    if adm.admissible:
        return ShrinkResult(w, None, None, None, 1.0, [], True, w.is_constant, warnings)
    target = None
    for axis in (1, 2):
        for i in range(1, prime_count + 1):
            rho = growth_profile(w, i, axis).rho
            if rho > 1 + 1e-9:
                target = (axis, i, rho)
                break
        if target:
            break
    axis, i, rho = target
    cands = []
    for r in r_grid:
        nu = _one_prime(axis, i, r)
        cands.append(ShrinkCandidate(r, 1 < r <= rho + 1e-12, growth_scan(a, nu, p, depths)))
    good = [c.r for c in cands if c.eligible and c.report.classification == "bounded-evidence"]
    if not good:
        warnings.append("no candidate r gave bounded-evidence")
        return ShrinkResult(None, None, axis, i, rho, cands, None, None, warnings)
    best = max(good)
    nu = _one_prime(axis, i, best)
    M1, M2 = box.bounds
    G_nu, G_w = nu.grid(M1, M2), w.grid(M1, M2)
    mask = _box_mask(box, M1, M2)
    between = bool(np.all(G_nu[mask] >= 1 - 1e-12) and np.all(G_nu[mask] <= G_w[mask] * (1 + 1e-12)))
    return ShrinkResult(nu, best, axis, i, rho, cands, between, nu.is_constant, warnings)


def _one_prime(axis: int, i: int, r) -> MultiplicativeFromPrimes:
    return MultiplicativeFromPrimes(R=((i, r),)) if axis == 1 else MultiplicativeFromPrimes(S=((i, r),))


def _box_mask(box: BoxSpec, M1: int, M2: int) -> np.ndarray:
    if box.kind == "square":
        return np.ones((M1, M2), dtype=bool)
    mask = np.zeros((M1, M2), dtype=bool)
    for m, n in box:
        mask[m - 1, n - 1] = True
    return mask

