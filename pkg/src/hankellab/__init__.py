"""Numerical lab for Hankel and Toeplitz operators on the Hardy space."""

__version__ = "0.1.0"

from .symbols import (  # noqa: E402
    CoeffVector,
    DiskPoint,
    Envelope,
    Laurent,
    Symbol,
    SymbolError,
    UncertifiableSymbolError,
    analytic_part,
    arc_indicator,
    conj_family,
    constant,
    decay_symbol,
    flip_u,
    kernel_vector,
    linear_combine,
    mobius_symbol,
    monomial,
    multiply,
    riesz_project,
    trigpoly,
)
from .operators import (  # noqa: E402
    WindowError,
    WindowedOperator,
    fast_apply,
    hankel_svd,
    hankel_window,
    rank_one,
    toeplitz_window,
)
from .identities import IdentityId, adjudicate, identity_residual, run_suite  # noqa: E402
from .lang import LoweringError, SymbolSyntaxError, lower, parse, to_text  # noqa: E402
from .diagnostics import (  # noqa: E402
    PointDiagnostic,
    RadialNet,
    SweepCurve,
    Thresholds,
    Verdict,
    dilation_residual,
    hankel_kernel_norm,
    hartman_verdict,
    product_verdict,
    radial_sweep,
    sum_product_verdict,
    zheng_pair_verdict,
)
