"""Compactness evidence from radial sweeps of reproducing-kernel quantities.

Boundary behaviour of a symbol is probed along rays ``z = r e^{it}`` with
``r -> 1``: a quantity such as ``||H_f k_z||`` *vanishes* at an angle when its
log-log slope against ``1 - r`` is at least ``slope_min`` (or it is below
``zero_floor``), and *plateaus* when it varies by less than
``plateau_factor`` over the last third of the radii with a flat slope.
Verdicts are evidence with recorded thresholds, not proofs.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import operators as ops
from .symbols import (
    CoeffVector,
    Symbol,
    TWO_PI,
    conj_family,
    kernel_size,
    kernel_vector,
    linear_combine,
    mobius_symbol,
    multiply,
)

TAGS = ("Hf_kz", "Hg_kz", "Hfg_kz", "HfTg_kz", "Hstar", "product", "tz")


@dataclass(frozen=True)
class Thresholds:
    slope_min: float = 0.4
    fit_points: int = 6
    plateau_factor: float = 2.0
    plateau_slope: float = 0.2
    zero_floor: float = 1e-10
    t_spread: float = 0.25

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RadialNet:
    """Rays toward ``boundary_angles`` sampled at radii ``r_1 < ... < r_J < 1``."""

    boundary_angles: tuple
    radii: tuple
    kernel_eps: float = 1e-12
    out_factor: int = 8

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if len(r) == 0 or np.any(np.diff(r) <= 0) or r[0] < 0 or r[-1] >= 1:
            raise ValueError("radii must be strictly increasing in [0, 1)")
        if not 0 < self.kernel_eps < 1:
            raise ValueError("kernel_eps must lie in (0, 1)")
        object.__setattr__(self, "boundary_angles", tuple(float(t) for t in self.boundary_angles))
        object.__setattr__(self, "radii", tuple(float(x) for x in self.radii))

    @classmethod
    def default(
        cls,
        jumps: Iterable[float] = (),
        n_angles: int = 64,
        levels: Sequence[int] = range(1, 13),
        kernel_eps: float = 1e-12,
        out_factor: int = 8,
    ) -> "RadialNet":
        """``n_angles`` uniform angles plus declared jump angles; radii ``1 - 2^-j``."""
        angles = {round(TWO_PI * i / n_angles, 12) for i in range(n_angles)} if n_angles else set()
        angles |= {round(float(t) % TWO_PI, 12) for t in jumps}
        return cls(tuple(sorted(angles)), tuple(1.0 - 2.0 ** -j for j in levels), kernel_eps, out_factor)

    def with_angles(self, angles: Iterable[float]) -> "RadialNet":
        return RadialNet(tuple(angles), self.radii, self.kernel_eps, self.out_factor)

    def to_dict(self) -> dict:
        return {
            "boundary_angles": list(self.boundary_angles),
            "radii": list(self.radii),
            "kernel_eps": self.kernel_eps,
            "out_factor": self.out_factor,
        }


def jump_angles(*symbols: Symbol) -> list[float]:
    return sorted({t for s in symbols for t in s.jumps})


# -- per-point kernel quantities ------------------------------------------------

class _Point:
    """Kernel vectors at one disk point plus memoised Hankel images."""

    def __init__(self, z: complex, eps: float, out_factor: int):
        self.z = z
        self.k = kernel_vector(z, eps)
        self.kbar = kernel_vector(np.conj(z), eps)
        self.L = max(out_factor * len(self.k), 64)
        self._hk: dict[int, CoeffVector] = {}

    def hankel_k(self, f: Symbol) -> CoeffVector:
        key = id(f)
        if key not in self._hk:
            self._hk[key] = ops.hankel_apply(f, self.k, self.L)
        return self._hk[key]


def _norm(v: CoeffVector) -> tuple[float, float]:
    return v.norm(), v.tail_bound


def hankel_kernel_norm(f: Symbol, z, eps: float = 1e-12, out_factor: int = 8) -> tuple[float, float]:
    """``(||H_f k_z||, error_bar)`` with the kernel truncated at ``eps``.

    The error bar adds ``||f||_inf |z|^N`` for the kernel tail to the
    envelope bound on the Hankel output beyond the computed window.
    """
    z = complex(z)
    k = kernel_vector(z, eps)
    return _norm(ops.hankel_apply(f, k, max(out_factor * len(k), 64)))


@dataclass
class PointDiagnostic:
    z: complex
    quantities: dict = field(default_factory=dict)  # tag -> (value, error_bar)
    complex_values: dict = field(default_factory=dict)

    def value(self, tag: str) -> float:
        return self.quantities[tag][0]

    def error(self, tag: str) -> float:
        return self.quantities[tag][1]


@dataclass
class SweepCurve:
    """Quantities on every (angle, radius) of a net, with per-angle trend fits."""

    angles: tuple
    radii: tuple
    tags: tuple
    points: list  # [angle][radius] -> PointDiagnostic
    thresholds: Thresholds = field(default_factory=Thresholds)
    trend: dict = field(default_factory=dict)     # tag -> [slope per angle]
    plateau: dict = field(default_factory=dict)   # tag -> [last-third mean per angle]
    status: dict = field(default_factory=dict)    # tag -> ["vanishing"|"plateau"|"unclear"]
    minimum: dict = field(default_factory=dict)   # tag -> [min along the ray]

    def values(self, tag: str) -> np.ndarray:
        return np.array([[p.value(tag) for p in row] for row in self.points])

    def errors(self, tag: str) -> np.ndarray:
        return np.array([[p.error(tag) for p in row] for row in self.points])

    def rows(self) -> list[tuple]:
        out = []
        for i, th in enumerate(self.angles):
            for j, r in enumerate(self.radii):
                p = self.points[i][j]
                for tag in self.tags:
                    if tag in p.quantities:
                        v, e = p.quantities[tag]
                        out.append((th, r, tag, v, e))
        return out

    def to_dict(self) -> dict:
        return {
            "angles": list(self.angles),
            "radii": list(self.radii),
            "tags": list(self.tags),
            "trend": self.trend,
            "plateau": self.plateau,
            "status": self.status,
            "minimum": self.minimum,
            "thresholds": self.thresholds.to_dict(),
        }


def classify(values: Sequence[float], radii: Sequence[float], th: Thresholds) -> tuple[str, float, float]:
    """``(status, slope, last_third_mean)`` for one quantity along one ray."""
    v = np.asarray(values, dtype=float)
    r = np.asarray(radii, dtype=float)
    third = max(1, len(v) // 3)
    tail_mean = float(v[-third:].mean())
    if v[-1] <= th.zero_floor:
        return "vanishing", math.inf, tail_mean
    m = min(th.fit_points, len(v))
    x = np.log(1.0 - r[-m:])
    y = np.log(np.maximum(v[-m:], th.zero_floor))
    slope = float(np.polyfit(x, y, 1)[0]) if m >= 2 else 0.0
    if slope >= th.slope_min:
        return "vanishing", slope, tail_mean
    last = v[-third:]
    if last.min() > 0 and last.max() / last.min() <= th.plateau_factor and slope < th.plateau_slope:
        return "plateau", slope, tail_mean
    return "unclear", slope, tail_mean


def _finalise(curve: SweepCurve) -> SweepCurve:
    for tag in curve.tags:
        if tag == "tz":
            continue
        vals = curve.values(tag)
        st, sl, pl, mn = [], [], [], []
        for row in vals:
            s, slope, plat = classify(row, curve.radii, curve.thresholds)
            st.append(s)
            sl.append(slope)
            pl.append(plat)
            mn.append(float(row.min()))
        curve.status[tag], curve.trend[tag], curve.plateau[tag], curve.minimum[tag] = st, sl, pl, mn
    return curve


def _sweep(net: RadialNet, tags: Sequence[str], compute, thresholds: Thresholds) -> SweepCurve:
    points = [[None] * len(net.radii) for _ in net.boundary_angles]
    for j, r in enumerate(net.radii):
        for i, th in enumerate(net.boundary_angles):
            z = r * complex(math.cos(th), math.sin(th))
            pt = _Point(z, net.kernel_eps, net.out_factor)
            diag = PointDiagnostic(z)
            compute(pt, diag)
            points[i][j] = diag
    return _finalise(SweepCurve(net.boundary_angles, net.radii, tuple(tags), points, thresholds))


def _product_err(a, ea, b, eb):
    return a * eb + b * ea + ea * eb


def radial_sweep(
    tags: Sequence[str],
    symbols: dict,
    net: RadialNet,
    thresholds: Thresholds | None = None,
) -> SweepCurve:
    """Evaluate the requested kernel quantities along every ray of ``net``.

    ``symbols`` holds ``f`` and ``g`` (``f1``/``f2`` for ``tz``).  Tags:
    ``Hf_kz`` ``||H_f k_z||``; ``Hg_kz``; ``Hfg_kz`` ``||H_{fg} k_z||``;
    ``HfTg_kz`` ``||H_f T_g k_z||``; ``Hstar`` ``||H_f^* k_{conj z}||``;
    ``product`` ``||H_{conj f} k_z|| ||H_g k_z||``; ``tz`` the ratio
    ``<H_{f1} k_z, H_{f2} k_z> / ||H_{f1} k_z||^2``.
    """
    thresholds = thresholds or Thresholds()
    unknown = set(tags) - set(TAGS)
    if unknown:
        raise ValueError(f"unknown sweep tags {sorted(unknown)}")
    f = symbols.get("f")
    g = symbols.get("g")
    derived = {}
    if "Hfg_kz" in tags:
        derived["fg"] = multiply(f, g)
    if "product" in tags:
        derived["fbar"] = conj_family(f, "conj")
    if "Hstar" in tags:
        derived["fstar"] = conj_family(f, "star")

    def compute(pt: _Point, diag: PointDiagnostic):
        q = diag.quantities
        for tag in tags:
            if tag == "Hf_kz":
                q[tag] = _norm(pt.hankel_k(f))
            elif tag == "Hg_kz":
                q[tag] = _norm(pt.hankel_k(g))
            elif tag == "Hfg_kz":
                q[tag] = _norm(pt.hankel_k(derived["fg"]))
            elif tag == "HfTg_kz":
                tg = ops.toeplitz_apply(g, pt.k, pt.L)
                q[tag] = _norm(ops.hankel_apply(f, tg, pt.L))
            elif tag == "Hstar":
                q[tag] = _norm(ops.hankel_apply(derived["fstar"], pt.kbar, pt.L))
            elif tag == "product":
                a, ea = _norm(pt.hankel_k(derived["fbar"]))
                b, eb = _norm(pt.hankel_k(g))
                q[tag] = (a * b, _product_err(a, ea, b, eb))
            elif tag == "tz":
                t, err = _t_estimate(pt, symbols["f1"], symbols["f2"])
                diag.complex_values[tag] = t
                q[tag] = (abs(t), err)

    return _sweep(net, tags, compute, thresholds)


def _t_estimate(pt: _Point, f1: Symbol, f2: Symbol) -> tuple[complex, float]:
    a = pt.hankel_k(f1)
    b = pt.hankel_k(f2)
    na = a.norm()
    if na == 0.0:
        return complex("nan"), math.inf
    t = complex(np.vdot(b.entries, a.entries)) / na**2  # <x, y> = y^H x
    err = (b.norm() * a.tail_bound * 2 + na * b.tail_bound) / na**2
    return t, err


def norm_curve(f: Symbol, net: RadialNet, thresholds: Thresholds | None = None) -> SweepCurve:
    """Sweep of ``||H_f k_z||`` alone (tag ``Hf_kz``)."""
    return radial_sweep(("Hf_kz",), {"f": f}, net, thresholds)


# -- verdicts -------------------------------------------------------------------

COMPACT, NONCOMPACT, INCONCLUSIVE = "compact", "noncompact", "inconclusive"


@dataclass
class Verdict:
    outcome: str
    per_angle_case: list = field(default_factory=list)
    evidence: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    tags: tuple = ()

    def to_dict(self) -> dict:
        ev = {}
        for k, v in self.evidence.items():
            ev[k] = v.to_dict() if hasattr(v, "to_dict") else v
        return {
            "outcome": self.outcome,
            "per_angle_case": self.per_angle_case,
            "evidence": jsonable(ev),
            "thresholds": self.thresholds,
            "tags": list(self.tags),
        }

    def curves(self) -> dict:
        return {k: v for k, v in self.evidence.items() if isinstance(v, SweepCurve)}


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    return x


def assemble(per_angle: list[dict]) -> str:
    """compact iff every angle passed; noncompact iff some angle decisively failed."""
    states = [a["state"] for a in per_angle]
    if states and all(s == "pass" for s in states):
        return COMPACT
    if any(s == "fail" for s in states):
        return NONCOMPACT
    return INCONCLUSIVE


def _trivial(reason: str, thresholds: Thresholds) -> Verdict:
    return Verdict(COMPACT, [], {"reason": reason}, thresholds.to_dict(), ("trivial",))


def hartman_verdict(
    f: Symbol,
    sizes: Sequence[int] = (256, 512, 1024),
    ks: Sequence[int] = (10, 25, 50),
    tau_compact: float = 1e-3,
    tau_noncompact: float = 1e-2,
    stable: float = 0.10,
) -> Verdict:
    """Compactness of ``H_f`` from growing finite sections.

    The decision statistic is the Hankel tail ``||H_{z^{N/2} f}||_N``, which
    tends to the essential norm of ``H_f``: compact when it is below
    ``tau_compact`` at the largest size and still falling, noncompact when
    it is stable within ``stable`` across the two largest sizes and above
    ``tau_noncompact``.  Leading singular values ``sigma_k(N)`` are recorded
    alongside.
    """
    sizes = sorted(int(n) for n in sizes)
    th = {"tau_compact": tau_compact, "tau_noncompact": tau_noncompact, "stability": stable,
          "ks": list(ks), "sizes": sizes, "statistic": "||H_{z^(N/2) f}|| on N x N sections"}
    if f.analytic or f.is_zero:
        return Verdict(COMPACT, [{"state": "pass", "case": "H_f = 0"}], {"reason": "analytic symbol"}, th, ("trivial",))
    sigma = {}
    tail = {}
    for N in sizes:
        s = ops.hankel_svd(f, N)
        sigma[N] = {k: float(s[k - 1]) if k <= len(s) else 0.0 for k in ks}
        tail[N] = ops.shifted_hankel_norm(f, N // 2, N)
    t_last = tail[sizes[-1]]
    evidence = {"sigma": sigma, "tail_norm": tail, "sigma_rule": _sigma_rule(sigma, sizes, ks, tau_compact, tau_noncompact, stable)}
    d = f.negative_degree()
    if d is not None:
        evidence["finite_rank"] = d
    falling = len(sizes) < 2 or t_last < tail[sizes[-2]] or t_last == 0.0
    if t_last <= tau_compact and falling:
        outcome = COMPACT
    elif (
        len(sizes) >= 2
        and t_last >= tau_noncompact
        and abs(t_last - tail[sizes[-2]]) <= stable * max(t_last, tail[sizes[-2]])
    ):
        outcome = NONCOMPACT
    else:
        outcome = INCONCLUSIVE
    return Verdict(outcome, [{"state": {COMPACT: "pass", NONCOMPACT: "fail"}.get(outcome, "unclear")}], evidence, th)


def _sigma_rule(sigma, sizes, ks, tau_c, tau_n, stable) -> dict:
    """The same thresholds applied to ``sigma_k(N)`` directly, per ``k``."""
    out = {}
    for k in ks:
        seq = [sigma[N][k] for N in sizes]
        if seq[-1] <= tau_c and (len(seq) < 2 or seq[-1] < seq[-2] or seq[-1] == 0.0):
            out[k] = COMPACT
        elif len(seq) >= 2 and seq[-1] >= tau_n and abs(seq[-1] - seq[-2]) <= stable * max(seq[-1], seq[-2]):
            out[k] = NONCOMPACT
        else:
            out[k] = INCONCLUSIVE
    return out


def zheng_pair_verdict(f: Symbol, g: Symbol, net: RadialNet | None = None,
                       thresholds: Thresholds | None = None) -> Verdict:
    """Evidence for compactness of ``H_{f~} H_g`` from ``||H_{conj f} k_z|| ||H_g k_z||``."""
    th = thresholds or Thresholds()
    fbar = conj_family(f, "conj")
    if fbar.analytic or g.analytic or f.is_zero or g.is_zero:
        return _trivial("one Hankel factor vanishes", th)
    net = net or RadialNet.default(jump_angles(f, g))
    curve = radial_sweep(("product", "Hg_kz"), {"f": f, "g": g}, net, th)
    per_angle = []
    for i, ang in enumerate(net.boundary_angles):
        s = curve.status["product"][i]
        state = {"vanishing": "pass", "plateau": "fail"}.get(s, "unclear")
        per_angle.append({"angle": ang, "state": state, "case": "product -> 0" if state == "pass" else None,
                          "slope": curve.trend["product"][i]})
    return Verdict(assemble(per_angle), per_angle, {"sweep": curve, "net": net.to_dict()}, th.to_dict())


def product_verdict(f: Symbol, g: Symbol, net: RadialNet | None = None,
                    thresholds: Thresholds | None = None) -> Verdict:
    """Evidence for compactness of ``H_f T_g``.

    At each probed angle, case 1 holds when ``||H_f k_z||`` vanishes; case 2
    when both ``||H_g k_z||`` and ``||H_{fg} k_z||`` vanish.  The direct
    quantity ``||H_f T_g k_z||`` is swept as supporting evidence.
    """
    th = thresholds or Thresholds()
    if f.analytic or f.is_zero or g.is_zero:
        return _trivial("H_f T_g = 0", th)
    fg = multiply(f, g)
    net = net or RadialNet.default(jump_angles(f, g))
    curve = radial_sweep(("Hf_kz", "Hg_kz", "Hfg_kz", "HfTg_kz"), {"f": f, "g": g}, net, th)
    st = curve.status
    per_angle = []
    for i, ang in enumerate(net.boundary_angles):
        c1 = st["Hf_kz"][i] == "vanishing"
        c2 = st["Hg_kz"][i] == "vanishing" and st["Hfg_kz"][i] == "vanishing"
        if c1 or c2:
            state, case = "pass", 1 if c1 else 2
        elif st["Hf_kz"][i] == "plateau" and "plateau" in (st["Hg_kz"][i], st["Hfg_kz"][i]):
            state, case = "fail", None
        else:
            state, case = "unclear", None
        per_angle.append({
            "angle": ang, "state": state, "case": case,
            "Hf_kz": st["Hf_kz"][i], "Hg_kz": st["Hg_kz"][i], "Hfg_kz": st["Hfg_kz"][i],
            "HfTg_kz": st["HfTg_kz"][i],
        })
    hf = curve.values("Hf_kz")
    hk = curve.values("HfTg_kz")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(hf > th.zero_floor, hk / hf, 0.0)
    evidence = {
        "sweep": curve,
        "net": net.to_dict(),
        "lemma46_min": {"Hf_kz": curve.minimum["Hf_kz"], "Hg_kz": curve.minimum["Hg_kz"],
                        "Hfg_kz": curve.minimum["Hfg_kz"]},
        "covanishing_constant": float(ratio.max()) if ratio.size else 0.0,
        "fg_bound": fg.sup_norm_bound,
    }
    return Verdict(assemble(per_angle), per_angle, evidence, th.to_dict())


# -- dilation residual -------------------------------------------------------------

def _pairs(spec) -> list[tuple[Symbol, Symbol]]:
    if isinstance(spec, tuple) and len(spec) == 2 and isinstance(spec[0], Symbol):
        return [spec]
    return [tuple(p) for p in spec]


def dilation_residual(
    spec,
    z,
    N: int | None = None,
    form: str = "gram",
    method: str = "lowrank",
    eps: float = 1e-13,
    out_factor: int = 8,
) -> float:
    """Residual of the Mobius dilation test for ``K = sum H_{f_i} T_{g_i}``.

    ``form="gram"``: ``||K^*K - T_phi^* K^*K T_phi||``;
    ``form="direct"``: ``||K - T_{phi~} K T_{conj phi}||``, with ``phi = phi_z``.

    ``method="dense"`` forms the sections on a padded ``N``-window and reads
    the leading block.  ``method="lowrank"`` uses the finite-rank expansion
    of ``K T_phi - T_{phi~} K`` (rank one per product), so it runs at any
    ``|z| < 1`` on vectors of length proportional to ``1/(1-|z|)``.
    """
    pairs = _pairs(spec)
    z = complex(z)
    if form not in ("gram", "direct"):
        raise ValueError(f"unknown form {form!r}")
    if method == "dense":
        return _dilation_dense(pairs, z, N or 64, form)
    if method != "lowrank":
        raise ValueError(f"unknown method {method!r}")
    return _dilation_lowrank(pairs, z, form, eps, out_factor, N)


def _dilation_dense(pairs, z, N, form) -> float:
    phi = mobius_symbol(z)
    syms = [phi, phi]
    for f, g in pairs:
        syms += [f, g, conj_family(f, "star"), conj_family(g, "conj")]
    pad = 0
    for s in syms:
        d = s.spill_degree()
        if d is None:
            raise ops.WindowError("dense dilation residual needs symbols with finite spill")
        pad += d
    W = N + pad + 1
    K = sum(ops.hankel_window(f, W).matrix @ ops.toeplitz_window(g, W).matrix for f, g in pairs)
    Tphi = ops.toeplitz_window(phi, W).matrix
    if form == "gram":
        G = K.conj().T @ K
        D = G - Tphi.conj().T @ G @ Tphi
    else:
        Tt = ops.toeplitz_window(conj_family(phi, "tilde"), W).matrix
        Tb = ops.toeplitz_window(conj_family(phi, "conj"), W).matrix
        D = K - Tt @ K @ Tb
    return ops.operator_norm(D[:N, :N])


def _dilation_lowrank(pairs, z, form, eps, out_factor, N) -> float:
    k = kernel_vector(z, eps, size=N)
    kb = kernel_vector(np.conj(z), eps, size=N)
    L = max(out_factor * len(k), 64)
    phi = mobius_symbol(z)

    def K_apply(v):
        out = np.zeros(L, dtype=complex)
        for f, g in pairs:
            out += ops.hankel_apply(f, ops.toeplitz_apply(g, v, L), L).entries
        return CoeffVector(out)

    def Kstar_apply(v):
        out = np.zeros(L, dtype=complex)
        for f, g in pairs:
            h = ops.hankel_apply(conj_family(f, "star"), v, L)
            out += ops.toeplitz_apply(conj_family(g, "conj"), h, L).entries
        return CoeffVector(out)

    a = [ops.hankel_apply(f, k, L).entries for f, _ in pairs]
    b = [ops.hankel_apply(conj_family(g, "star"), kb, L).entries for _, g in pairs]
    if form == "direct":
        Tphi = lambda v: ops.toeplitz_apply(phi, CoeffVector(v), L).entries  # noqa: E731
        lefts = [K_apply(k).entries] + [-ai for ai in a]
        rights = [k.padded(L)] + [Tphi(bi) for bi in b]
        return ops.rank_sum_norm(lefts, rights)

    phi_t_conj = conj_family(conj_family(phi, "tilde"), "conj")
    u = Kstar_apply(kb).entries
    w = [Kstar_apply(ops.toeplitz_apply(phi_t_conj, CoeffVector(ai), L)).entries for ai in a]
    n = len(pairs)
    vectors = [u] + w + b
    C = np.zeros((1 + 2 * n, 1 + 2 * n), dtype=complex)
    C[0, 0] = -1.0
    for i in range(n):
        C[1 + i, 1 + n + i] = -1.0
        C[1 + n + i, 1 + i] = -1.0
        for j in range(n):
            C[1 + n + i, 1 + n + j] = np.vdot(a[i], a[j])
    return ops.low_rank_norm(vectors, C)


def dilation_curve(spec, angle: float, levels: Sequence[int], **kw) -> list[float]:
    return [dilation_residual(spec, (1 - 2.0 ** -j) * np.exp(1j * angle), **kw) for j in levels]


# -- sums of two products ------------------------------------------------------------

def sum_product_verdict(
    f1: Symbol, g1: Symbol, f2: Symbol, g2: Symbol,
    net: RadialNet | None = None, thresholds: Thresholds | None = None,
) -> Verdict:
    """Evidence for compactness of ``H_{f1} T_{g1} + H_{f2} T_{g2}``.

    Conditions (1)-(4) are tested with the same vanishing proxies as
    :func:`product_verdict`.  Where none holds and ``||H_{f1} k_z||`` stays
    away from zero, ``t_z`` is averaged over the last three radii, ``c`` is
    set to ``-conj(t)`` and condition (5) is tested through the sweeps of
    ``c f1 + f2``, ``g1 - c g2`` and ``f1 (g1 - c g2)``.
    """
    th = thresholds or Thresholds()
    f1g1 = multiply(f1, g1)
    f2g2 = multiply(f2, g2)
    net = net or RadialNet.default(jump_angles(f1, g1, f2, g2))
    named = {"f1": f1, "f2": f2, "g1": g1, "g2": g2, "f1g1": f1g1, "f2g2": f2g2}
    curves = {name: norm_curve(s, net, th) for name, s in named.items()}
    tcurve = radial_sweep(("tz",), {"f1": f1, "f2": f2}, net, th)

    def V(name, i):
        return curves[name].status["Hf_kz"][i] == "vanishing"

    def P(name, i):
        return curves[name].status["Hf_kz"][i] == "plateau"

    conds = {
        1: ("f1", "f2"),
        2: ("f1", "g2", "f2g2"),
        3: ("g1", "f1g1", "f2"),
        4: ("g1", "g2", "f1g1", "f2g2"),
    }
    per_angle = []
    extra_curves = {}
    for i, ang in enumerate(net.boundary_angles):
        entry = {"angle": ang, "status": {n: curves[n].status["Hf_kz"][i] for n in named}}
        held = [c for c, names in conds.items() if all(V(n, i) for n in names)]
        if held:
            entry.update(state="pass", case=held[0])
            per_angle.append(entry)
            continue
        decisive = all(any(P(n, i) for n in names) for names in conds.values())
        state = "fail" if decisive else "unclear"
        case = None
        if not V("f1", i):
            tz = np.array([p.complex_values["tz"] for p in tcurve.points[i]])
            hf1 = curves["f1"].values("Hf_kz")[i]
            delta = float(hf1.min())
            last = tz[-3:]
            t = complex(last.mean())
            cap = f2.sup_norm_bound / delta if delta > 0 else math.inf
            if abs(t) > cap:
                t = t / abs(t) * cap
            spread = float(np.max(np.abs(last - t)) / abs(t)) if abs(t) > 0 else math.inf
            entry.update(t=t, t_history=[complex(x) for x in tz], t_unstable=spread > th.t_spread, delta=delta)
            if abs(t) > th.zero_floor:
                c = -np.conj(t)
                h1 = linear_combine([(c, f1), (1.0, f2)])
                h2 = linear_combine([(1.0, g1), (-c, g2)])
                h3 = multiply(f1, h2)
                sub = net.with_angles([ang])
                c5 = {}
                for name, s in (("cf1+f2", h1), ("g1-cg2", h2), ("f1(g1-cg2)", h3)):
                    cv = norm_curve(s, sub, th)
                    c5[name] = cv.status["Hf_kz"][0]
                    extra_curves[f"{name}@{ang:.6f}"] = cv
                entry.update(c=complex(c), condition5=c5)
                if all(s == "vanishing" for s in c5.values()):
                    state, case = "pass", 5
                elif any(s == "plateau" for s in c5.values()) and decisive:
                    state = "fail"
                elif not decisive:
                    state = "unclear"
        entry.update(state=state, case=case)
        per_angle.append(entry)
    evidence = {"net": net.to_dict(), "t_sweep": tcurve}
    evidence.update({f"sweep_{k}": v for k, v in curves.items()})
    evidence.update({f"sweep_{k}": v for k, v in extra_curves.items()})
    return Verdict(assemble(per_angle), per_angle, evidence, th.to_dict())
