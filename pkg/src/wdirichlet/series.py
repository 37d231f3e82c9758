"""Truncated two-variable Dirichlet series as finitely supported tables.

A table ``a`` stands for sum a(m, n) m**(-s1) n**(-s2).  Multiplication of
series is Dirichlet convolution on N x N.  Two scalar modes exist: ``exact``
(Fraction / GaussianRational) and ``float`` (complex128).  Everything computed
on a box is exact on that box; coefficients outside it are simply unknown.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import DomainError, NotAUnitError, PreconditionError, SpecParseError
from .exact import GaussianRational, exact_imag_part, exact_real_part, to_exact
from .lattice import BoxSpec, make_box, reachable_points
from .weights import Constant, Weight, parse_number, parse_weight

FLOAT_PRUNE = 1e-300
# square float boxes up to this side go through the dense kernels
DENSE_MAX_SIDE = 512
MODES = ("exact", "float")


def _is_zero(c, mode):
    return c == 0 if mode == "exact" else abs(c) <= FLOAT_PRUNE


class CoeffTable:
    """Immutable map (m, n) -> coefficient with no stored zeros."""

    __slots__ = ("_e", "mode")

    def __init__(self, entries=None, mode: str = "float"):
        if mode not in MODES:
            raise DomainError(f"mode must be 'exact' or 'float', got {mode!r}")
        conv = to_exact if mode == "exact" else complex
        e = {}
        for (m, n), c in (entries.items() if isinstance(entries, dict) else entries or ()):
            m, n = int(m), int(n)
            if m < 1 or n < 1:
                raise DomainError(f"indices must be >= 1, got ({m}, {n})")
            c = conv(c)
            if not _is_zero(c, mode):
                e[(m, n)] = c
        self._e = e
        self.mode = mode

    @classmethod
    def _raw(cls, e: dict, mode: str) -> "CoeffTable":
        # trusted constructor: keys valid, values converted; still prunes
        t = cls.__new__(cls)
        t._e = {k: v for k, v in e.items() if not _is_zero(v, mode)}
        t.mode = mode
        return t

    def __getitem__(self, idx):
        return self._e.get(tuple(idx), 0 if self.mode == "exact" else 0j)

    def __contains__(self, idx):
        return tuple(idx) in self._e

    def __len__(self):
        return len(self._e)

    def __iter__(self):
        return iter(sorted(self._e))

    def items(self):
        """Entries in lexicographic index order."""
        return sorted(self._e.items())

    def to_dict(self) -> dict:
        return dict(self._e)

    @property
    def support(self) -> list[tuple[int, int]]:
        return sorted(self._e)

    def __eq__(self, other):
        if not isinstance(other, CoeffTable):
            return NotImplemented
        return self.mode == other.mode and self._e == other._e

    def __hash__(self):
        return hash((self.mode, frozenset(self._e.items())))

    def __repr__(self):
        body = ", ".join(f"({m},{n}): {c}" for (m, n), c in self.items()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"CoeffTable[{self.mode}]{{{body}{more}}}"

    # algebra ----------------------------------------------------------------

    def _check_mode(self, other):
        if self.mode != other.mode:
            raise DomainError(f"mixed scalar modes {self.mode}/{other.mode}; cast explicitly")

    def __add__(self, other):
        if not isinstance(other, CoeffTable):
            return NotImplemented
        self._check_mode(other)
        e = dict(self._e)
        for k, v in other._e.items():
            e[k] = e.get(k, 0) + v
        return CoeffTable._raw(e, self.mode)

    def __neg__(self):
        return CoeffTable._raw({k: -v for k, v in self._e.items()}, self.mode)

    def __sub__(self, other):
        if not isinstance(other, CoeffTable):
            return NotImplemented
        return self + (-other)

    def scale(self, c):
        c = to_exact(c) if self.mode == "exact" else complex(c)
        return CoeffTable._raw({k: c * v for k, v in self._e.items()}, self.mode)

    def __mul__(self, other):
        if isinstance(other, CoeffTable):
            return convolve(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        if self.mode == "exact":
            c = to_exact(c)
            return CoeffTable._raw({k: v / c for k, v in self._e.items()}, self.mode)
        return self.scale(1 / complex(c))

    # casts / views ----------------------------------------------------------

    def to_float(self) -> "CoeffTable":
        if self.mode == "float":
            return self
        return CoeffTable({k: complex(v) for k, v in self._e.items()}, "float")

    def to_exact(self) -> "CoeffTable":
        """Exact cast; float coefficients convert via their exact binary value."""
        if self.mode == "exact":
            return self
        return CoeffTable(
            {k: GaussianRational(Fraction(v.real), Fraction(v.imag)) for k, v in self._e.items()},
            "exact",
        )

    def restrict(self, box: BoxSpec) -> "CoeffTable":
        return CoeffTable._raw({k: v for k, v in self._e.items() if k in box}, self.mode)

    def to_dense(self, M: int, N: int | None = None) -> np.ndarray:
        N = M if N is None else N
        A = np.zeros((M, N), dtype=np.complex128)
        for (m, n), c in self._e.items():
            if m <= M and n <= N:
                A[m - 1, n - 1] = complex(c)
        return A

    @classmethod
    def from_dense(cls, A: np.ndarray) -> "CoeffTable":
        mm, nn = np.nonzero(np.abs(A) > FLOAT_PRUNE)
        return cls._raw({(int(m) + 1, int(n) + 1): complex(A[m, n]) for m, n in zip(mm, nn)}, "float")

    @property
    def bounds(self) -> tuple[int, int]:
        if not self._e:
            return 1, 1
        return max(m for m, _ in self._e), max(n for _, n in self._e)

    def is_real(self) -> bool:
        if self.mode == "exact":
            return all(not isinstance(v, GaussianRational) for v in self._e.values())
        return all(v.imag == 0 for v in self._e.values())


def basis(m: int, n: int, mode: str = "float") -> CoeffTable:
    """delta_(m,n); basis(1, 1) is the unit."""
    if m < 1 or n < 1:
        raise DomainError(f"basis index must lie in N^2, got ({m}, {n})")
    return CoeffTable({(m, n): 1}, mode)


def zero(mode: str = "float") -> CoeffTable:
    return CoeffTable({}, mode)


# ------------------------------------------------------------------ convolution


def _dense_ok(box: BoxSpec | None) -> bool:
    return box is not None and box.kind == "square" and box.M <= DENSE_MAX_SIDE


def _all_fraction(t: CoeffTable) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in t._e.values())


def _convolve_fraction(a: CoeffTable, b: CoeffTable, box) -> CoeffTable:
    # common denominators turn the double loop into pure int arithmetic
    da = math.lcm(*(v.denominator for v in a._e.values())) if a._e else 1
    db = math.lcm(*(v.denominator for v in b._e.values())) if b._e else 1
    na = [(k, v.numerator * (da // v.denominator)) for k, v in sorted(a._e.items())]
    nb = [(k, v.numerator * (db // v.denominator)) for k, v in sorted(b._e.items())]
    acc: dict = {}
    for (m1, n1), x in na:
        for (m2, n2), y in nb:
            z = (m1 * m2, n1 * n2)
            if box is not None and z not in box:
                continue
            acc[z] = acc.get(z, 0) + x * y
    d = da * db
    return CoeffTable._raw({k: Fraction(v, d) for k, v in acc.items()}, "exact")


def convolve(a: CoeffTable, b: CoeffTable, box: BoxSpec | None = None) -> CoeffTable:
    """Dirichlet convolution (a * b)(m, n) = sum a(u1, v1) b(u2, v2), u1 u2 = m, v1 v2 = n.

    With ``box`` the product is truncated to the box (exact on it).  Float
    results use a fixed summation order, so they are reproducible.
    """
    a._check_mode(b)
    if a.mode == "exact":
        if _all_fraction(a) and _all_fraction(b):
            return _convolve_fraction(a, b, box)
    elif _dense_ok(box):
        M = box.M
        return CoeffTable.from_dense(_kernels.dense_convolve(a.to_dense(M), b.to_dense(M)))
    acc: dict = {}
    ib = sorted(b._e.items())
    for (m1, n1), x in sorted(a._e.items()):
        for (m2, n2), y in ib:
            z = (m1 * m2, n1 * n2)
            if box is not None and z not in box:
                continue
            acc[z] = acc.get(z, 0) + x * y
    return CoeffTable._raw(acc, a.mode)


def power(a: CoeffTable, k: int, box: BoxSpec | None = None) -> CoeffTable:
    out = basis(1, 1, a.mode)
    for _ in range(k):
        out = convolve(out, a, box)
    return out


# ------------------------------------------------------------------ inversion


def invert_formal(a: CoeffTable, box: BoxSpec) -> CoeffTable:
    """Convolution inverse of ``a`` on a divisor-closed box.

    b(1,1) = 1/a(1,1) and for (m,n) != (1,1)
    b(m,n) = -(1/a(1,1)) * sum over (u,v) != (1,1), u|m, v|n of a(u,v) b(m/u, n/v).

    Only points of the monoid generated by supp(a) can carry nonzero
    coefficients, so only those are visited; square boxes may be huge.
    """
    a00 = a[(1, 1)]
    if a00 == 0:
        raise NotAUnitError("not a unit: a(1,1) = 0, no formal inverse")
    if a.mode == "float" and _dense_ok(box):
        M = box.M
        return CoeffTable.from_dense(_kernels.dense_invert(a.to_dense(M)))
    gens = [(k, v) for k, v in sorted(a._e.items()) if k != (1, 1) and k in box]
    pts = reachable_points([g for g, _ in gens], box)
    order = sorted(pts, key=lambda x: (pts[x], x))
    inv = (Fraction(1) / a00) if a.mode == "exact" else 1 / a00
    b = {(1, 1): inv}
    for x in order[1:]:
        s = 0
        for (u, v), c in gens:
            if x[0] % u == 0 and x[1] % v == 0:
                y = b.get((x[0] // u, x[1] // v))
                if y is not None:
                    s = s + c * y
        if s != 0:
            b[x] = -inv * s
    return CoeffTable._raw(b, a.mode)


@dataclass
class NeumannResult:
    table: CoeffTable
    terms: int
    increment: float
    contraction: float  # l1 norm of delta - a/a(1,1) on the box


def neumann_inverse(a: CoeffTable, box: BoxSpec, tol: float = 1e-12, max_terms: int = 10_000) -> NeumannResult:
    """Inverse by the geometric series (1/a00) sum_k (delta - a/a00)**k on the box.

    An oracle for ``invert_formal`` built only from truncated convolution.
    Stops at the first power whose l1 norm is <= tol (that power is not added).
    """
    a = a.to_float().restrict(box)
    a00 = a[(1, 1)]
    if a00 == 0:
        raise NotAUnitError("not a unit: a(1,1) = 0")
    d = basis(1, 1) - a / a00
    q = weighted_p_norm(d)
    if q >= 1:
        raise PreconditionError(f"Neumann series needs ||delta - a/a(1,1)||_1 < 1 on the box, measured {q:.6g}")
    total = basis(1, 1)
    term = basis(1, 1)
    inc = 0.0
    k = 1
    while k <= max_terms:
        term = convolve(term, d, box)
        inc = weighted_p_norm(term)
        if inc <= tol:
            break
        total = total + term
        k += 1
    return NeumannResult(total / a00, k, inc, q)


# ------------------------------------------------------------------ norms and evaluation


def weighted_p_norm(a: CoeffTable, weight: Weight | None = None, p=1):
    """sum |a(m,n)|**p w(m,n).

    Exact mode with p = 1 and a real table gives an exact Fraction; everything
    else is a float summed with ``math.fsum`` in index order.
    """
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    w = weight or Constant(1)
    if a.mode == "exact" and p == 1 and a.is_real():
        return sum((abs(Fraction(c)) * to_exact(w(m, n)) for (m, n), c in a.items()), Fraction(0))
    terms = []
    for (m, n), c in a.items():
        mag = abs(complex(c))
        terms.append(math.exp(p * math.log(mag) + w.log(m, n)))
    return math.fsum(terms)


def _check_h2(s1: complex, s2: complex):
    if complex(s1).real < 0 or complex(s2).real < 0:
        raise DomainError(f"point ({s1}, {s2}) lies outside the closed right half-plane squared")


def evaluate(a: CoeffTable, s1: complex, s2: complex = 0) -> complex:
    """Finite Dirichlet polynomial sum a(m,n) m**(-s1) n**(-s2) on H^2."""
    _check_h2(s1, s2)
    s1, s2 = complex(s1), complex(s2)
    terms = [complex(c) * cmath.exp(-s1 * math.log(m) - s2 * math.log(n)) for (m, n), c in a.items()]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def evaluate_many(a: CoeffTable, s1: Iterable[complex], s2: Iterable[complex] | complex = 0) -> np.ndarray:
    """Vectorized evaluation at many points (kernel-backed)."""
    s1 = np.atleast_1d(np.asarray(s1, dtype=np.complex128))
    s2 = np.broadcast_to(np.asarray(s2, dtype=np.complex128), s1.shape)
    if (s1.real < 0).any() or (s2.real < 0).any():
        raise DomainError("evaluation points must lie in H^2 (real parts >= 0)")
    items = a.items()
    if not items:
        return np.zeros(s1.shape, dtype=np.complex128)
    logm = np.log([float(m) for (m, _), _ in items])
    logn = np.log([float(n) for (_, n), _ in items])
    coef = np.array([complex(c) for _, c in items])
    return _kernels.eval_points(logm, logn, coef, s1, np.ascontiguousarray(s2))


# ------------------------------------------------------------------ file format


def _fmt_exact(x: Fraction) -> str:
    return str(x)


def _fmt_float(x: float) -> str:
    return repr(float(x))


def format_series(a: CoeffTable, p=None, weight: Weight | str | None = None, extra: dict | None = None) -> str:
    """Serialize: ``# key value`` headers then ``m n re [im]`` lines."""
    lines = [f"# mode {a.mode}"]
    if p is not None:
        lines.append(f"# p {p}")
    if weight is not None:
        lines.append(f"# weight {weight if isinstance(weight, str) else weight.spec()}")
    for k, v in (extra or {}).items():
        lines.append(f"# {k} {v}")
    for (m, n), c in a.items():
        if a.mode == "exact":
            re_, im_ = exact_real_part(c), exact_imag_part(c)
            row = f"{m} {n} {_fmt_exact(re_)}" + (f" {_fmt_exact(im_)}" if im_ else "")
        else:
            row = f"{m} {n} {_fmt_float(c.real)}" + (f" {_fmt_float(c.imag)}" if c.imag else "")
        lines.append(row)
    return "\n".join(lines) + "\n"


def write_series(path, a: CoeffTable, **kw) -> None:
    Path(path).write_text(format_series(a, **kw), encoding="utf-8")


_HEADER_RE = re.compile(r"#\s*(mode|p|weight|box)\s+(.*\S)\s*$")


def parse_series(text: str, source: str = "<series>", base_dir: Path | None = None):
    """Parse a series file; returns ``(table, meta)``.

    ``meta`` holds ``mode``, and when present ``p`` (number), ``weight``
    (parsed Weight) and ``weight_spec`` (its text).  Unknown ``#`` lines are
    comments.
    """
    meta: dict = {"mode": "float"}
    rows = []
    for ln, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            h = _HEADER_RE.match(stripped)
            if not h:
                continue
            key, val = h.groups()
            col = line.index(val) + 1
            if key == "mode":
                if val not in MODES:
                    raise SpecParseError(f"unknown mode {val!r}", ln, col, source)
                meta["mode"] = val
            elif key == "p":
                try:
                    meta["p"] = parse_number(val)
                except ValueError:
                    raise SpecParseError(f"bad p {val!r}", ln, col, source) from None
            elif key == "weight":
                try:
                    meta["weight"] = parse_weight(val, base_dir)
                except SpecParseError as exc:
                    raise SpecParseError(f"bad weight spec: {exc}", ln, col + exc.col - 1, source) from None
                meta["weight_spec"] = val
            else:
                meta["box"] = val
            continue
        toks = [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]
        if len(toks) not in (3, 4):
            raise SpecParseError("expected 'm n re [im]'", ln, toks[0][1], source)
        rows.append((ln, toks))
    mode = meta["mode"]
    entries: dict = {}
    for ln, toks in rows:
        (ms, mc), (ns, nc) = toks[0], toks[1]
        if not ms.isdigit() or int(ms) < 1:
            raise SpecParseError(f"bad index {ms!r}", ln, mc, source)
        if not ns.isdigit() or int(ns) < 1:
            raise SpecParseError(f"bad index {ns!r}", ln, nc, source)
        parts = []
        for tok, col in toks[2:]:
            try:
                parts.append(Fraction(tok) if mode == "exact" else float(tok))
            except (ValueError, ZeroDivisionError):
                raise SpecParseError(f"bad coefficient {tok!r}", ln, col, source) from None
        if mode == "exact":
            val = to_exact(GaussianRational(*parts)) if len(parts) == 2 else parts[0]
        else:
            val = complex(*parts)
        key = (int(ms), int(ns))
        if key in entries:
            raise SpecParseError(f"duplicate index {key}", ln, mc, source)
        entries[key] = val
    return CoeffTable(entries, mode), meta


def read_series(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecParseError(f"cannot read series file: {exc.strerror}", source=str(path)) from exc
    return parse_series(text, str(path), path.parent)


def box_identity_residual(a: CoeffTable, b: CoeffTable, box: BoxSpec):
    """l1 norm of (a * b - delta) restricted to the box (0 exactly when b inverts a there)."""
    r = convolve(a, b, box) - basis(1, 1, a.mode)
    return weighted_p_norm(r.restrict(box)) if r.mode == "float" or r.is_real() else weighted_p_norm(r.to_float())


def axis_box(depth_exponent: int, prime: int = 2, axis: int = 1) -> BoxSpec:
    """Divisor closure of (prime**k, 1) (or (1, prime**k)): a one-prime chain box."""
    x = prime**depth_exponent
    return make_box(members=[(x, 1) if axis == 1 else (1, x)])
