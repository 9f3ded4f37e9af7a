"""Fourier-coefficient algebra for bounded functions on the unit circle.

A :class:`Symbol` is described by its two-sided Fourier coefficients

    c(n) = (1/2pi) int f(e^{it}) e^{-int} dt,

given either as a finite table (trigonometric polynomials) or as a
vectorised generator rule (arc indicators, Mobius maps, power-decay
symbols).  Every symbol carries a certified sup-norm bound and a decay
envelope ``|c(n)| <= C rate^|n| / |n|^p`` valid for ``|n| >= start``, which
is what lets downstream code put honest error bars on truncated sums.

Inner products are conjugate-linear in the second slot, so that the rank
one operator ``x (x) y`` maps ``h`` to ``<h, y> x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy import signal, special

TWO_PI = 2.0 * math.pi

# Coefficient tails below this are treated as numerically exact.
MACHINE_TAIL = 1e-17
# Truncation degree used when a power-decay factor has to be cut to a polynomial.
DEFAULT_PRODUCT_BAND = 4096


class SymbolError(ValueError):
    """Raised for malformed symbol data."""


class UncertifiableSymbolError(SymbolError):
    """Raised when no certified bound is available for a requested operation."""


@dataclass(frozen=True)
class Envelope:
    """Coefficient bound ``|c(n)| <= const * rate**|n| / |n|**power`` for ``|n| >= start``.

    ``const == 0`` means the coefficients vanish outside the stored band
    (trigonometric polynomials).
    """

    const: float = 0.0
    power: float = math.inf
    rate: float = 1.0
    start: int = 1

    def __post_init__(self):
        if self.const < 0 or self.rate <= 0 or self.rate > 1 or self.start < 1:
            raise SymbolError(f"invalid envelope {self}")

    @property
    def vanishing(self) -> bool:
        return self.const == 0.0

    def bound(self, n) -> np.ndarray:
        n = np.abs(np.asarray(n, dtype=float))
        if self.vanishing:
            return np.zeros_like(n)
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            out = self.const * self.rate ** n / n ** self.power
        return np.where(n >= self.start, out, np.inf)

    def _power_sum(self, m0: int, q: float) -> float:
        # sum_{n >= m0} rate**(q n) / n**(q p), one-sided
        p = q * self.power
        rho = self.rate ** q
        if rho < 1.0:
            return rho ** m0 / m0 ** p / (1.0 - rho)
        if p <= 1.0:
            return math.inf
        return m0 ** (-p) + m0 ** (1.0 - p) / (p - 1.0)

    def tail_l2(self, m0: int) -> float:
        """One-sided bound on ``sqrt(sum_{n >= m0} |c(n)|^2)``."""
        if self.vanishing:
            return 0.0
        m0 = max(int(m0), self.start)
        s = self._power_sum(m0, 2.0)
        return self.const * math.sqrt(s) if math.isfinite(s) else math.inf

    def tail_l1(self, m0: int) -> float:
        """One-sided bound on ``sum_{n >= m0} |c(n)|``."""
        if self.vanishing:
            return 0.0
        m0 = max(int(m0), self.start)
        return self.const * self._power_sum(m0, 1.0)

    def effective_degree(self, tol: float = MACHINE_TAIL, cap: int = 10**7) -> int | None:
        """Smallest ``m`` with two-sided l1 tail beyond ``m`` at most ``tol``."""
        if self.vanishing:
            return self.start - 1
        m = self.start
        while 2.0 * self.tail_l1(m + 1) > tol:
            if m > cap:
                return None
            m *= 2
        lo, hi = max(self.start, m // 2), m
        while lo < hi:
            mid = (lo + hi) // 2
            if 2.0 * self.tail_l1(mid + 1) > tol:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def combine(self, other: "Envelope", scale: float = 1.0, other_scale: float = 1.0) -> "Envelope":
        # max-dominance: smaller power and larger rate dominate for |n| >= 1
        if self.vanishing and other.vanishing:
            return Envelope(start=max(self.start, other.start))
        parts = [(e, s) for e, s in ((self, scale), (other, other_scale)) if not e.vanishing]
        const = sum(abs(s) * e.const for e, s in parts)
        power = min(e.power for e, _ in parts)
        rate = max(e.rate for e, _ in parts)
        if power == math.inf:
            power = 0.0
        return Envelope(const, power, rate, max(self.start, other.start))


@dataclass(frozen=True)
class StepData:
    """Piecewise-constant function ``const + sum w * 1_[alpha, beta)``."""

    const: complex
    arcs: tuple[tuple[float, float, complex], ...]

    def breakpoints(self) -> np.ndarray:
        pts = [a % TWO_PI for a, _, _ in self.arcs] + [b % TWO_PI for _, b, _ in self.arcs]
        return np.unique(np.round(np.array(pts, dtype=float), 15))

    def value_at(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, complex(self.const))
        for a, b, w in self.arcs:
            out = out + w * (((theta - a) % TWO_PI) < (b - a))
        return out

    def segments(self) -> list[tuple[float, float, complex]]:
        """Maximal constant pieces as ``(start, end, value)`` covering the circle."""
        pts = self.breakpoints()
        if len(pts) == 0:
            return [(0.0, TWO_PI, complex(self.const))]
        ends = np.append(pts[1:], pts[0] + TWO_PI)
        mids = 0.5 * (pts + ends)
        vals = self.value_at(mids % TWO_PI)
        return [(float(a), float(b), complex(v)) for a, b, v in zip(pts, ends, vals)]

    def coef(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n)
        out = np.zeros(n.shape, dtype=complex)
        zero = n == 0
        nz = n[~zero].astype(float)
        acc = np.zeros(nz.shape, dtype=complex)
        c0 = complex(self.const)
        for a, b, w in self.arcs:
            c0 += w * (b - a) / TWO_PI
            acc += w * (np.exp(-1j * nz * a) - np.exp(-1j * nz * b)) / (TWO_PI * 1j * nz)
        out[zero] = c0
        out[~zero] = acc
        return out

    @staticmethod
    def from_segments(segs: Iterable[tuple[float, float, complex]]) -> "StepData":
        arcs = tuple((a, b, v) for a, b, v in segs if v != 0)
        return StepData(0j, arcs)


Rule = Callable[[np.ndarray], np.ndarray]


class Symbol:
    """A bounded function on the circle, known through its Fourier coefficients.

    Parameters
    ----------
    rule : callable
        Vectorised map from integer degrees to complex coefficients.
    band : (int, int)
        Stored degree range.  For polynomials this is the exact support.
    sup_norm_bound : float
        Certified upper bound for the essential supremum of ``|f|``.
    envelope : Envelope
        Decay bound valid for ``|n| >= envelope.start``.
    polynomial : bool
        True when the coefficients vanish outside ``band``.
    analytic, coanalytic : bool
        Known support in ``n >= 0`` / ``n <= 0``.
    approx_error : float
        Sup-norm distance between the represented coefficients and the
        intended function (nonzero only for truncated products).
    """

    def __init__(
        self,
        rule: Rule,
        *,
        band: tuple[int, int],
        sup_norm_bound: float,
        envelope: Envelope,
        exact: bool = True,
        polynomial: bool = False,
        analytic: bool = False,
        coanalytic: bool = False,
        jumps: Iterable[float] = (),
        steps: StepData | None = None,
        approx_error: float = 0.0,
        label: str | None = None,
    ):
        if sup_norm_bound < 0 or not math.isfinite(sup_norm_bound):
            raise UncertifiableSymbolError(f"sup-norm bound {sup_norm_bound!r} is not certified")
        self._rule = rule
        self.band = (int(band[0]), int(band[1]))
        self.sup_norm_bound = float(sup_norm_bound)
        self.envelope = envelope
        self.exact = exact
        self.polynomial = polynomial
        self.analytic = analytic or (polynomial and self.band[0] >= 0)
        self.coanalytic = coanalytic or (polynomial and self.band[1] <= 0)
        self.jumps = tuple(sorted({round(float(t) % TWO_PI, 15) for t in jumps}))
        self.steps = steps
        self.approx_error = float(approx_error)
        self.label = label
        self._cache: dict[tuple[int, int], np.ndarray] = {}

    def __repr__(self):
        name = self.label or "Symbol"
        return f"<{name} band={self.band} bound={self.sup_norm_bound:.4g}>"

    # -- coefficient access -------------------------------------------------
    def coef(self, n):
        arr = np.asarray(n)
        out = np.asarray(self._rule(np.atleast_1d(arr).astype(np.int64)), dtype=complex)
        if arr.ndim == 0:
            return complex(out[0])
        return out.reshape(arr.shape)

    def coef_range(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients at degrees ``lo..hi`` inclusive (cached, read-only)."""
        key = (int(lo), int(hi))
        cached = self._cache.get(key)
        if cached is None:
            cached = self.coef(np.arange(lo, hi + 1))
            cached.setflags(write=False)
            if len(self._cache) > 16:
                self._cache.clear()
            self._cache[key] = cached
        return cached

    @property
    def coeffs(self) -> dict[int, complex]:
        lo, hi = self.band
        vals = self.coef_range(lo, hi)
        return {n: complex(v) for n, v in zip(range(lo, hi + 1), vals) if v != 0}

    @property
    def decay_envelope(self) -> tuple[float, float]:
        return (self.envelope.const, self.envelope.power)

    @property
    def is_zero(self) -> bool:
        return self.polynomial and not np.any(self.coef_range(*self.band))

    def negative_degree(self) -> int | None:
        """Largest ``d`` with ``c(-d) != 0`` (Hankel rank bound); None if unbounded."""
        if self.analytic:
            return 0
        if self.polynomial:
            return max(0, -self.band[0])
        return None

    def spill_degree(self, tol: float = MACHINE_TAIL) -> int | None:
        """Degree beyond which coefficients are negligible at ``tol``."""
        if self.polynomial:
            return max(abs(self.band[0]), abs(self.band[1]))
        eff = self.envelope.effective_degree(tol)
        if eff is None:
            return None
        return max(eff, abs(self.band[0]), abs(self.band[1]))

    def l1_bound(self, limit: int = 200_000) -> float:
        """Certified bound on ``sum |c(n)|`` or ``inf``."""
        if self.polynomial:
            return float(np.abs(self.coef_range(*self.band)).sum())
        s = self.envelope.start
        if s > limit:
            return math.inf
        tail = self.envelope.tail_l1(s)
        if not math.isfinite(tail):
            return math.inf
        head = float(np.abs(self.coef_range(-(s - 1), s - 1)).sum())
        return head + 2.0 * tail

    def evaluate(self, theta, degree: int | None = None) -> np.ndarray:
        """Partial Fourier sum at angles ``theta`` (exact for polynomials)."""
        theta = np.asarray(theta, dtype=float)
        if self.polynomial:
            lo, hi = self.band
        else:
            d = degree if degree is not None else max(abs(self.band[0]), abs(self.band[1]), 256)
            lo, hi = -d, d
        c = self.coef_range(lo, hi)
        n = np.arange(lo, hi + 1)
        return np.exp(1j * np.multiply.outer(theta, n)) @ c

    def on_grid(self, size: int) -> np.ndarray:
        """Values on ``size`` equispaced circle points (polynomials only, via FFT)."""
        if not self.polynomial:
            raise SymbolError("grid evaluation by FFT requires a polynomial symbol")
        lo, hi = self.band
        if hi - lo + 1 > size:
            raise SymbolError("grid too small for polynomial band")
        buf = np.zeros(size, dtype=complex)
        for n, v in zip(range(lo, hi + 1), self.coef_range(lo, hi)):
            buf[n % size] += v
        return np.fft.ifft(buf) * size

    # -- arithmetic sugar ---------------------------------------------------
    def __add__(self, other):
        return linear_combine([(1.0, self), (1.0, as_symbol(other))])

    __radd__ = __add__

    def __sub__(self, other):
        return linear_combine([(1.0, self), (-1.0, as_symbol(other))])

    def __rsub__(self, other):
        return linear_combine([(1.0, as_symbol(other)), (-1.0, self)])

    def __neg__(self):
        return linear_combine([(-1.0, self)])

    def __mul__(self, other):
        if isinstance(other, Symbol):
            return multiply(self, other)
        return linear_combine([(complex(other), self)])

    def __rmul__(self, other):
        return linear_combine([(complex(other), self)])

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise SymbolError("only nonnegative integer powers are supported")
        out = constant(1.0)
        base = self
        while k:
            if k & 1:
                out = multiply(out, base)
            k >>= 1
            if k:
                base = multiply(base, base)
        return out


def as_symbol(x) -> Symbol:
    return x if isinstance(x, Symbol) else constant(complex(x))


# -- constructors -------------------------------------------------------------

def trigpoly(coeffs: Mapping[int, complex] | Sequence[complex], lo: int = 0, label: str | None = None) -> Symbol:
    """Trigonometric polynomial from ``{degree: value}`` or a dense list starting at ``lo``."""
    if isinstance(coeffs, Mapping):
        if not coeffs:
            return _poly_from_array(0, np.zeros(1, dtype=complex), label)
        degs = sorted(int(k) for k in coeffs)
        lo = degs[0]
        arr = np.zeros(degs[-1] - lo + 1, dtype=complex)
        for k, v in coeffs.items():
            arr[int(k) - lo] += complex(v)
        return _poly_from_array(lo, arr, label)
    return _poly_from_array(int(lo), np.asarray(coeffs, dtype=complex), label)


def _poly_from_array(lo: int, arr: np.ndarray, label: str | None = None) -> Symbol:
    arr = np.array(arr, dtype=complex)
    nz = np.flatnonzero(arr)
    if len(nz) == 0:
        arr, lo = np.zeros(1, dtype=complex), 0
    else:
        arr, lo = arr[nz[0]: nz[-1] + 1], lo + int(nz[0])
    hi = lo + len(arr) - 1
    arr.setflags(write=False)

    def rule(n, arr=arr, lo=lo, hi=hi):
        out = np.zeros(n.shape, dtype=complex)
        inside = (n >= lo) & (n <= hi)
        out[inside] = arr[n[inside] - lo]
        return out

    start = max(abs(lo), abs(hi)) + 1
    return Symbol(
        rule,
        band=(lo, hi),
        sup_norm_bound=float(np.abs(arr).sum()),
        envelope=Envelope(start=start),
        polynomial=True,
        label=label,
    )


def constant(c: complex) -> Symbol:
    return trigpoly({0: c}, label=f"{c}")


def monomial(k: int, c: complex = 1.0) -> Symbol:
    return trigpoly({int(k): c}, label=f"z^{k}")


def random_trigpoly(rng: np.random.Generator, degree: int, scale: float = 1.0) -> Symbol:
    """Trig polynomial with iid complex normal coefficients at degrees -degree..degree."""
    size = 2 * degree + 1
    arr = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) * scale / math.sqrt(2 * size)
    return trigpoly(arr, lo=-degree, label=f"randpoly({degree})")


def step_symbol(steps: StepData, label: str | None = None) -> Symbol:
    segs = steps.segments()
    sup = max(abs(v) for _, _, v in segs)
    wsum = sum(abs(w) for _, _, w in steps.arcs)
    if not steps.arcs:
        return constant(steps.const)
    jumps = []
    for i, (a, _, v) in enumerate(segs):
        if v != segs[i - 1][2]:
            jumps.append(a)
    return Symbol(
        steps.coef,
        band=(0, 0),
        sup_norm_bound=sup,
        envelope=Envelope(wsum / math.pi, 1.0, 1.0, 1),
        jumps=jumps,
        steps=steps,
        label=label,
    )


def arc_indicator(alpha: float, beta: float) -> Symbol:
    """Indicator of the arc ``{e^{it}: alpha <= t < beta}``."""
    alpha, beta = float(alpha), float(beta)
    if beta < alpha:
        raise SymbolError("arc requires alpha <= beta")
    width = beta - alpha
    if width % TWO_PI == 0.0 or math.isclose(width % TWO_PI, 0.0, abs_tol=1e-15) or math.isclose(
        width % TWO_PI, TWO_PI, abs_tol=1e-15
    ):
        raise SymbolError("arc endpoints must be distinct modulo 2*pi")
    if width > TWO_PI:
        raise SymbolError("arc longer than the circle")
    return step_symbol(StepData(0j, ((alpha, beta, 1.0 + 0j),)), label=f"arc({alpha:g},{beta:g})")


def mobius_symbol(z) -> Symbol:
    """Disk automorphism ``phi_z(w) = (z - w) / (1 - conj(z) w)`` as an analytic symbol."""
    z = as_disk_point(z).z
    r = abs(z)
    if r == 0.0:
        return trigpoly({1: -1.0}, label="mobius(0)")
    s = 1.0 - r * r
    zc = np.conj(z)

    def rule(n, z=z, zc=zc, s=s):
        out = np.zeros(n.shape, dtype=complex)
        out[n == 0] = z
        pos = n >= 1
        out[pos] = -s * zc ** (n[pos] - 1)
        return out

    env = Envelope(s / r, 0.0, r, 1)
    eff = env.effective_degree()
    return Symbol(
        rule,
        band=(0, 0 if eff is None else eff),
        sup_norm_bound=1.0,
        envelope=env,
        analytic=True,
        label=f"mobius({z:.6g})",
    )


def decay_symbol(p: float, side: int = -1) -> Symbol:
    """Symbol with ``c(side*n) = n**-p`` for ``n >= 1`` and all other coefficients zero."""
    if p <= 1.0:
        raise SymbolError("decay exponent must exceed 1 for a bounded symbol")
    if side not in (-1, 1):
        raise SymbolError("side must be +1 or -1")

    def rule(n, p=p, side=side):
        m = side * n
        out = np.zeros(n.shape, dtype=complex)
        pos = m >= 1
        out[pos] = m[pos].astype(float) ** (-p)
        return out

    return Symbol(
        rule,
        band=(0, 0),
        sup_norm_bound=float(special.zeta(p)),
        envelope=Envelope(1.0, float(p), 1.0, 1),
        analytic=side > 0,
        coanalytic=side < 0,
        label=f"decay({p:g})",
    )


# -- algebra ------------------------------------------------------------------

def _tighten_bound(bound: float, sym_rule: Rule, band, env: Envelope, polynomial: bool) -> float:
    if polynomial:
        l1 = float(np.abs(sym_rule(np.arange(band[0], band[1] + 1))).sum())
        return min(bound, l1)
    s = env.start
    if s <= 200_000:
        tail = env.tail_l1(s)
        if math.isfinite(tail):
            head = float(np.abs(sym_rule(np.arange(-(s - 1), s))).sum())
            return min(bound, head + 2.0 * tail)
    return bound


def linear_combine(terms: Sequence[tuple[complex, Symbol]]) -> Symbol:
    """Coefficientwise linear combination ``sum a_i f_i``."""
    if not terms:
        raise SymbolError("linear_combine needs at least one term")
    terms = [(complex(a), as_symbol(f)) for a, f in terms]
    if all(f.polynomial for _, f in terms):
        lo = min(f.band[0] for _, f in terms)
        hi = max(f.band[1] for _, f in terms)
        arr = np.zeros(hi - lo + 1, dtype=complex)
        for a, f in terms:
            arr[f.band[0] - lo: f.band[1] - lo + 1] += a * f.coef_range(*f.band)
        return _poly_from_array(lo, arr)

    if all(f.steps is not None or (f.polynomial and f.band == (0, 0)) for _, f in terms):
        const = 0j
        arcs: list[tuple[float, float, complex]] = []
        for a, f in terms:
            if f.steps is None:
                const += a * f.coef(0)
            else:
                const += a * f.steps.const
                arcs.extend((al, be, a * w) for al, be, w in f.steps.arcs)
        steps = StepData(const, tuple(arcs))
        segs = steps.segments()
        if all(abs(v - segs[0][2]) == 0 for _, _, v in segs):
            return constant(segs[0][2])
        return step_symbol(StepData.from_segments(segs) if const != 0 else steps)

    coefs = tuple(a for a, _ in terms)
    rules = tuple(f._rule for _, f in terms)

    def rule(n, coefs=coefs, rules=rules):
        out = np.zeros(n.shape, dtype=complex)
        for a, r in zip(coefs, rules):
            if a != 0:
                out += a * r(n)
        return out

    env = Envelope()
    start = 1
    for a, f in terms:
        if f.polynomial:
            start = max(start, abs(f.band[0]) + 1, abs(f.band[1]) + 1)
        else:
            env = env.combine(f.envelope, other_scale=abs(a))
    env = Envelope(env.const, env.power, env.rate, max(start, env.start))
    lo = min(f.band[0] for _, f in terms)
    hi = max(f.band[1] for _, f in terms)
    bound = sum(abs(a) * f.sup_norm_bound for a, f in terms)
    bound = _tighten_bound(bound, rule, (lo, hi), env, False)
    return Symbol(
        rule,
        band=(lo, hi),
        sup_norm_bound=bound,
        envelope=env,
        exact=all(f.exact for _, f in terms),
        analytic=all(f.analytic for _, f in terms),
        coanalytic=all(f.coanalytic for _, f in terms),
        jumps=[t for _, f in terms for t in f.jumps],
        approx_error=sum(abs(a) * f.approx_error for a, f in terms),
    )


def _truncate(f: Symbol, degree: int) -> tuple[Symbol, float]:
    """Polynomial part of ``f`` on ``|n| <= degree`` and the l1 mass dropped."""
    lo = -degree if not f.analytic else 0
    hi = degree if not f.coanalytic else 0
    poly = _poly_from_array(lo, f.coef_range(lo, hi))
    dropped = 2.0 * f.envelope.tail_l1(degree + 1)
    return poly, dropped


def _poly_times(p: Symbol, g: Symbol) -> Symbol:
    """Lazy product of a polynomial with an arbitrary symbol."""
    lo, hi = p.band
    pc = np.array(p.coef_range(lo, hi))
    degs = np.arange(lo, hi + 1)[pc != 0]
    pc = pc[pc != 0]
    grule = g._rule
    dense = np.array(p.coef_range(lo, hi))

    def rule(n, degs=degs, pc=pc, grule=grule, dense=dense, lo=lo, hi=hi):
        if len(pc) <= 64 or n.size == 0:
            out = np.zeros(n.shape, dtype=complex)
            for j, a in zip(degs, pc):
                out += a * grule(n - j)
            return out
        g0 = int(n.min()) - hi
        gvals = grule(np.arange(g0, int(n.max()) - lo + 1))
        conv = signal.fftconvolve(dense, gvals)
        return conv[n - lo - g0]

    w = max(abs(lo), abs(hi))
    genv = g.envelope
    a1 = float(np.abs(pc).sum())
    power = genv.power if math.isfinite(genv.power) else 0.0
    env = Envelope(
        a1 * genv.const * 2.0 ** power * genv.rate ** (-w),
        power,
        genv.rate,
        max(genv.start + w, 2 * w, 1),
    )
    band = (g.band[0] + lo, g.band[1] + hi)
    bound = p.sup_norm_bound * g.sup_norm_bound
    bound = _tighten_bound(bound, rule, band, env, False)
    return Symbol(
        rule,
        band=band,
        sup_norm_bound=bound + p.sup_norm_bound * g.approx_error,
        envelope=env,
        exact=False,
        analytic=p.analytic and g.analytic,
        coanalytic=p.coanalytic and g.coanalytic,
        jumps=g.jumps,
        approx_error=p.sup_norm_bound * g.approx_error,
    )


def _step_product(f: Symbol, g: Symbol) -> Symbol:
    pts = np.unique(np.concatenate([f.steps.breakpoints(), g.steps.breakpoints()]))
    if len(pts) == 0:
        return constant(f.steps.const * g.steps.const)
    ends = np.append(pts[1:], pts[0] + TWO_PI)
    mids = (0.5 * (pts + ends)) % TWO_PI
    vals = f.steps.value_at(mids) * g.steps.value_at(mids)
    segs = [(float(a), float(b), complex(v)) for a, b, v in zip(pts, ends, vals)]
    if all(v == segs[0][2] for _, _, v in segs):
        return constant(segs[0][2])
    return step_symbol(StepData.from_segments(segs))


def multiply(f: Symbol, g: Symbol, band: int = DEFAULT_PRODUCT_BAND) -> Symbol:
    """Pointwise product, i.e. convolution of coefficient sequences.

    Polynomial factors and pairs of step functions are handled exactly.
    Otherwise the faster-decaying factor is truncated to a polynomial; the
    dropped l1 mass times the other factor's bound is recorded as
    ``approx_error``.  Two factors with ``p <= 1`` decay are rejected.
    """
    f, g = as_symbol(f), as_symbol(g)
    if f.is_zero or g.is_zero:
        return constant(0.0)
    if f.polynomial and g.polynomial:
        arr = np.convolve(f.coef_range(*f.band), g.coef_range(*g.band))
        return _poly_from_array(f.band[0] + g.band[0], arr)
    if f.steps is not None and g.steps is not None:
        return _step_product(f, g)
    if f.polynomial:
        return _poly_times(f, g)
    if g.polynomial:
        return _poly_times(g, f)

    def decay_key(s: Symbol):
        e = s.envelope
        return (e.rate < 1.0, e.power if e.rate == 1.0 else math.inf, -e.rate)

    fast, slow = (f, g) if decay_key(f) >= decay_key(g) else (g, f)
    fe = fast.envelope
    if fe.rate == 1.0 and fe.power <= 1.0:
        raise UncertifiableSymbolError(
            "product of two symbols with coefficient decay p <= 1 has no certified tail"
        )
    deg = fe.effective_degree(MACHINE_TAIL, cap=band)
    if deg is None or deg > band:
        deg = band
    poly, dropped = _truncate(fast, deg)
    out = _poly_times(poly, slow)
    err = dropped * slow.sup_norm_bound + out.approx_error + fast.approx_error * slow.sup_norm_bound
    return Symbol(
        out._rule,
        band=out.band,
        sup_norm_bound=max(out.sup_norm_bound, 0.0) + err,
        envelope=out.envelope,
        exact=False,
        analytic=f.analytic and g.analytic,
        coanalytic=f.coanalytic and g.coanalytic,
        jumps=tuple(f.jumps) + tuple(g.jumps),
        approx_error=err,
    )


def conj_family(f: Symbol, mode: str) -> Symbol:
    """``conj``: the complex conjugate function; ``tilde``: ``f(conj z)``; ``star``: ``conj f(conj z)``."""
    rule0 = f._rule
    if mode == "conj":
        def rule(n):
            return np.conj(rule0(-n))
        analytic, coanalytic = f.coanalytic, f.analytic
        band = (-f.band[1], -f.band[0])
        jumps = f.jumps
        steps = None if f.steps is None else StepData(
            np.conj(f.steps.const), tuple((a, b, np.conj(w)) for a, b, w in f.steps.arcs)
        )
    elif mode == "tilde":
        def rule(n):
            return rule0(-n)
        analytic, coanalytic = f.coanalytic, f.analytic
        band = (-f.band[1], -f.band[0])
        jumps = [-t for t in f.jumps]
        steps = None if f.steps is None else StepData(
            f.steps.const, tuple((-b, -a, w) for a, b, w in f.steps.arcs)
        )
    elif mode == "star":
        def rule(n):
            return np.conj(rule0(n))
        analytic, coanalytic = f.analytic, f.coanalytic
        band = f.band
        jumps = [-t for t in f.jumps]
        steps = None if f.steps is None else StepData(
            np.conj(f.steps.const), tuple((-b, -a, np.conj(w)) for a, b, w in f.steps.arcs)
        )
    else:
        raise SymbolError(f"unknown conjugation mode {mode!r}")
    if f.polynomial:
        lo, hi = band
        return _poly_from_array(lo, rule(np.arange(lo, hi + 1)))
    return Symbol(
        rule,
        band=band,
        sup_norm_bound=f.sup_norm_bound,
        envelope=f.envelope,
        exact=f.exact,
        analytic=analytic,
        coanalytic=coanalytic,
        jumps=jumps,
        steps=steps,
        approx_error=f.approx_error,
        label=f"{mode}({f.label})" if f.label else None,
    )


def analytic_part(f: Symbol) -> Symbol:
    """Polynomial symbol keeping the nonnegative degrees of a polynomial ``f``."""
    if not f.polynomial:
        raise SymbolError("analytic_part is only defined here for polynomials")
    lo, hi = f.band
    if hi < 0:
        return constant(0.0)
    return _poly_from_array(max(lo, 0), f.coef_range(max(lo, 0), hi))


# -- Hardy space vectors ---------------------------------------------------------

@dataclass(frozen=True)
class DiskPoint:
    z: complex

    def __post_init__(self):
        if not abs(self.z) < 1.0:
            raise SymbolError(f"point {self.z!r} is not inside the unit disk")


def as_disk_point(z) -> DiskPoint:
    if isinstance(z, DiskPoint):
        return z
    return DiskPoint(complex(z))


@dataclass(frozen=True)
class CoeffVector:
    """Element of H^2 truncated to degrees ``0..N-1``; ``tail_bound`` bounds the rest in l2."""

    entries: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        if self.tail_bound < 0:
            raise SymbolError("tail_bound must be nonnegative")
        arr = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", arr)

    def __len__(self):
        return len(self.entries)

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def norm_interval(self) -> tuple[float, float]:
        n = self.norm()
        return max(n - self.tail_bound, 0.0), n + self.tail_bound

    def padded(self, size: int) -> np.ndarray:
        """Entries zero-padded or cut to ``size`` (cutting does not update tails)."""
        out = np.zeros(size, dtype=complex)
        m = min(size, len(self.entries))
        out[:m] = self.entries[:m]
        return out

    def inner(self, other: "CoeffVector") -> complex:
        m = min(len(self), len(other))
        return complex(np.vdot(other.entries[:m], self.entries[:m]))


@dataclass(frozen=True)
class Laurent:
    """Finitely supported two-sided coefficient data ``values[i]`` at degree ``lo + i``."""

    lo: int
    values: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    def coef(self, n) -> np.ndarray:
        n = np.asarray(n)
        out = np.zeros(n.shape, dtype=complex)
        inside = (n >= self.lo) & (n <= self.hi)
        out[inside] = self.values[n[inside] - self.lo]
        return out

    def times(self, other: "Laurent") -> "Laurent":
        return Laurent(self.lo + other.lo, np.convolve(self.values, other.values))

    @staticmethod
    def from_vector(v) -> "Laurent":
        entries = v.entries if isinstance(v, CoeffVector) else np.asarray(v, dtype=complex)
        return Laurent(0, entries)

    @staticmethod
    def from_symbol(f: Symbol, lo: int | None = None, hi: int | None = None) -> "Laurent":
        lo = f.band[0] if lo is None else lo
        hi = f.band[1] if hi is None else hi
        return Laurent(lo, f.coef_range(lo, hi))


def positive_tail_l2(f: Symbol, N: int) -> float:
    """Bound on ``sqrt(sum_{n >= N} |c(n)|^2)``."""
    if f.coanalytic and N >= 1:
        return 0.0
    if f.polynomial:
        return float(np.linalg.norm(f.coef_range(N, f.band[1]))) if f.band[1] >= N else 0.0
    s = f.envelope.start
    head = float(np.linalg.norm(f.coef_range(N, s - 1))) if s - 1 >= N else 0.0
    return math.hypot(head, f.envelope.tail_l2(max(N, s)))


def negative_tail_l2(f: Symbol, N: int) -> float:
    """Bound on ``sqrt(sum_{n >= N} |c(-n)|^2)``."""
    if f.analytic:
        return 0.0
    if f.polynomial:
        return float(np.linalg.norm(f.coef_range(f.band[0], -N))) if -f.band[0] >= N else 0.0
    s = f.envelope.start
    head = float(np.linalg.norm(f.coef_range(-(s - 1), -N))) if s - 1 >= N else 0.0
    return math.hypot(head, f.envelope.tail_l2(max(N, s)))


def riesz_project(h, N: int) -> CoeffVector:
    """Orthogonal projection onto H^2, kept at degrees ``0..N-1``."""
    if N < 1:
        raise SymbolError("window must be at least 1")
    if isinstance(h, Symbol):
        return CoeffVector(h.coef_range(0, N - 1).copy(), positive_tail_l2(h, N))
    if isinstance(h, CoeffVector):
        h = Laurent.from_vector(h)
    entries = h.coef(np.arange(N))
    tail = float(np.linalg.norm(h.values[max(N - h.lo, 0):])) if h.hi >= N else 0.0
    return CoeffVector(entries, tail)


def flip_u(h: Laurent) -> Laurent:
    """The flip ``(Uh)(z) = conj(z) h(conj z)``: degree ``m`` receives degree ``-m-1``."""
    if isinstance(h, CoeffVector):
        h = Laurent.from_vector(h)
    return Laurent(-h.hi - 1, h.values[::-1].copy())


def kernel_size(z, eps: float) -> int:
    r = abs(as_disk_point(z).z)
    if not 0.0 < eps < 1.0:
        raise SymbolError("eps must lie in (0, 1)")
    if r == 0.0:
        return 1
    return max(1, math.ceil(math.log(eps) / math.log(r)))


def kernel_vector(z, eps: float = 1e-12, size: int | None = None) -> CoeffVector:
    """Normalized reproducing kernel ``k_z(w) = sqrt(1-|z|^2) / (1 - conj(z) w)``.

    The truncation length comes from ``eps`` unless ``size`` is given; the
    discarded l2 mass is exactly ``|z|**N``.
    """
    z = as_disk_point(z).z
    N = kernel_size(z, eps) if size is None else int(size)
    r = abs(z)
    s = math.sqrt(1.0 - r * r)
    zc = np.conj(z)
    if r == 0.0:
        entries = np.zeros(N, dtype=complex)
        entries[0] = 1.0
        return CoeffVector(entries, 0.0)
    entries = s * zc ** np.arange(N)
    return CoeffVector(entries, r ** N)
