"""Machine-precision checks of the Toeplitz/Hankel operator identities.

Each identity is evaluated as ``LHS - RHS`` on finite sections.  The
sections are built on a working window ``N + pad`` where ``pad`` is the
summed spill degree of every symbol in the composition; the residual is the
largest singular value of the difference restricted to the leading
``N x N`` block, where finite-section products agree with the true ones.

Two identities are stated in two readings (``P3A``/``P3B`` and
``ML2A``/``ML2B``); :func:`adjudicate` runs both and reports which holds.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .operators import WindowError, hankel_window, operator_norm, toeplitz_window
from .symbols import (
    Laurent,
    Symbol,
    analytic_part,
    conj_family,
    flip_u,
    kernel_vector,
    mobius_symbol,
    random_trigpoly,
)

MAX_PAD = 8192
CERTIFIED_TOL = 1e-12


class IdentityId(str, enum.Enum):
    P1 = "P1"      # T_{fg} = T_f T_g + H_{f~} H_g
    P2 = "P2"      # H_{fg} = H_f T_g + T_{f~} H_g
    P3A = "P3A"    # g analytic: H_f T_g = T_{f~} H_g   (as printed)
    P3B = "P3B"    # g analytic: H_f T_g = T_{g~} H_f
    I1 = "I1"      # T_phi T_{conj phi} = 1 - k_z (x) k_z
    I2 = "I2"      # T*_{phi~} T_{phi~} = 1 - k_{zbar} (x) k_{zbar}
    I3 = "I3"      # H_{conj phi} = -k_{zbar} (x) k_z
    ADJ = "ADJ"    # H_f^* = H_{f*}
    UREL = "UREL"  # H_f = U (I - P) M_f
    ML2A = "ML2A"  # T_{phi~} K T_{conj phi} = K - (K k_z)(x)k_z + (H_f k_z)(x)(T_phi H_f^* k_zbar)
    ML2B = "ML2B"  # same with H_g^* in the last factor
    ML3 = "ML3"    # K T_phi = T_{phi~} K - (H_f k_z) (x) (H_g^* k_zbar)


ADJUDICATED = {"P3": (IdentityId.P3A, IdentityId.P3B), "ML2": (IdentityId.ML2A, IdentityId.ML2B)}


@dataclass(frozen=True)
class ResidualReport:
    identity: str
    window: int
    working_window: int
    residual: float
    certified: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _spill_total(symbols) -> int | None:
    total = 0
    for s in symbols:
        d = s.spill_degree()
        if d is None:
            return None
        total += d
    return total


def _outer(x, y):
    return np.outer(x, np.conj(y))


def _kernels(z, W):
    return kernel_vector(z, size=W).entries, kernel_vector(np.conj(z), size=W).entries


def _hankel_definition(f: Symbol, W: int) -> np.ndarray:
    """``U (I - P) M_f`` built column by column from the definitions."""
    out = np.zeros((W, W), dtype=complex)
    for k in range(W):
        # (f e_k) has coefficient c(n - k) at degree n; keep degrees -W..-1
        neg = Laurent(-W, f.coef(np.arange(-W, 0) - k))
        flipped = flip_u(neg)
        out[:, k] = flipped.coef(np.arange(W))
    return out


def _sides(ident: IdentityId, f, g, z, W):
    T = lambda s: toeplitz_window(s, W).matrix  # noqa: E731
    H = lambda s: hankel_window(s, W).matrix  # noqa: E731
    eye = np.eye(W, dtype=complex)
    if ident is IdentityId.P1:
        return T(f * g), T(f) @ T(g) + H(conj_family(f, "tilde")) @ H(g)
    if ident is IdentityId.P2:
        return H(f * g), H(f) @ T(g) + T(conj_family(f, "tilde")) @ H(g)
    if ident is IdentityId.P3A:
        return H(f) @ T(g), T(conj_family(f, "tilde")) @ H(g)
    if ident is IdentityId.P3B:
        return H(f) @ T(g), T(conj_family(g, "tilde")) @ H(f)
    if ident is IdentityId.ADJ:
        return H(f).conj().T, H(conj_family(f, "star"))
    if ident is IdentityId.UREL:
        return H(f), _hankel_definition(f, W)

    phi = mobius_symbol(z)
    kz, kzb = _kernels(z, W)
    phi_bar = conj_family(phi, "conj")
    phi_t = conj_family(phi, "tilde")
    if ident is IdentityId.I1:
        return T(phi) @ T(phi_bar), eye - _outer(kz, kz)
    if ident is IdentityId.I2:
        Tt = T(phi_t)
        return Tt.conj().T @ Tt, eye - _outer(kzb, kzb)
    if ident is IdentityId.I3:
        return H(phi_bar), -_outer(kzb, kz)

    K = H(f) @ T(g)
    Hf_k = H(f) @ kz
    if ident in (IdentityId.ML2A, IdentityId.ML2B):
        other = f if ident is IdentityId.ML2A else g
        last = T(phi) @ (H(other).conj().T @ kzb)
        lhs = T(phi_t) @ K @ T(phi_bar)
        rhs = K - _outer(K @ kz, kz) + _outer(Hf_k, last)
        return lhs, rhs
    if ident is IdentityId.ML3:
        return K @ T(phi), T(phi_t) @ K - _outer(Hf_k, H(g).conj().T @ kzb)
    raise ValueError(f"unknown identity {ident}")


def _symbols_for(ident: IdentityId, f, g, z):
    phi = mobius_symbol(z) if z is not None else None
    table = {
        IdentityId.P1: [f, g, f],
        IdentityId.P2: [f, g, f],
        IdentityId.P3A: [f, g],
        IdentityId.P3B: [f, g],
        IdentityId.ADJ: [f],
        IdentityId.UREL: [f],
        IdentityId.I1: [phi, phi],
        IdentityId.I2: [phi, phi],
        IdentityId.I3: [phi],
        IdentityId.ML2A: [phi, f, g, phi, f],
        IdentityId.ML2B: [phi, f, g, phi, g],
        IdentityId.ML3: [f, g, phi, phi],
    }
    needed = table[ident]
    if any(s is None for s in needed):
        raise ValueError(f"identity {ident.value} needs inputs that were not supplied")
    return needed


def identity_residual(
    ident: IdentityId | str,
    f: Symbol | None = None,
    g: Symbol | None = None,
    z: complex | None = None,
    N: int = 64,
) -> ResidualReport:
    """Operator-norm residual of one identity on the certified ``N x N`` block."""
    ident = IdentityId(ident)
    if N < 1:
        raise WindowError("window must be at least 1")
    pad = _spill_total(_symbols_for(ident, f, g, z))
    certified = pad is not None and pad <= MAX_PAD
    if pad is None:
        pad = N
    if pad > MAX_PAD:
        raise WindowError(
            f"identity {ident.value} needs padding {pad} > {MAX_PAD}; increase decay or shrink |z|"
        )
    W = N + pad + 1
    lhs, rhs = _sides(ident, f, g, z, W)
    res = operator_norm((lhs - rhs)[:N, :N])
    return ResidualReport(ident.value, N, W, res, certified)


@dataclass(frozen=True)
class Adjudication:
    name: str
    residuals: dict
    winner: str | None
    loser_residual: float

    def to_dict(self) -> dict:
        return asdict(self)


def adjudicate(
    name: str, f: Symbol, g: Symbol, z: complex | None = None, N: int = 64,
    win_tol: float = 1e-10, lose_tol: float = 1e-2,
) -> Adjudication:
    """Evaluate both readings of ``P3`` or ``ML2``; the winner is the unique one below ``win_tol``."""
    a, b = ADJUDICATED[name]
    if name == "P3":
        g = analytic_part(g) if g.polynomial else g
    ra = identity_residual(a, f, g, z, N).residual
    rb = identity_residual(b, f, g, z, N).residual
    residuals = {a.value: ra, b.value: rb}
    winner = None
    loser = max(ra, rb)
    if ra <= win_tol and rb >= lose_tol:
        winner = a.value
    elif rb <= win_tol and ra >= lose_tol:
        winner = b.value
    return Adjudication(name, residuals, winner, loser)


SUITE = (
    IdentityId.P1, IdentityId.P2, IdentityId.I1, IdentityId.I2, IdentityId.I3,
    IdentityId.ADJ, IdentityId.UREL, IdentityId.ML3,
)


def random_instance(rng: np.random.Generator, degree: int = 8, max_radius: float = 0.7):
    """A pair of random trig polynomials of degree ``<= degree`` and a disk point."""
    f = random_trigpoly(rng, int(rng.integers(1, degree + 1)), scale=3.0)
    g = random_trigpoly(rng, int(rng.integers(1, degree + 1)), scale=3.0)
    z = max_radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    return f, g, complex(z)


def run_suite(
    seed: int = 0, count: int = 100, degree: int = 8, N: int = 64,
    progress: Callable[[int], None] | None = None,
) -> list[dict]:
    """Every identity plus both adjudications on ``count`` seeded random instances."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        f, g, z = random_instance(rng, degree)
        for ident in SUITE:
            rep = identity_residual(ident, f, g, z, N)
            rows.append({"instance": i, "z": z, **rep.to_dict()})
        for name in ADJUDICATED:
            adj = adjudicate(name, f, g, z, N)
            for ident, res in adj.residuals.items():
                rows.append({
                    "instance": i, "z": z, "identity": ident, "window": N,
                    "working_window": None, "residual": res, "certified": True,
                    "adjudication": name, "winner": adj.winner,
                })
        if progress:
            progress(i)
    return rows
