"""Operator-valued free probability transforms over B = M_d(C).

Evaluation and certified inversion of the Cauchy, reciprocal Cauchy, and
Voiculescu transforms of B-valued distributions, free additive convolution,
infinite-divisibility tests, and regularized spectral density tables. Thin
wrapper over the C++ core; matrices are complex numpy arrays.
"""

try:
    from ._freeprob import *  # noqa: F401,F403
    from ._freeprob import __doc__ as _core_doc  # noqa: F401
except ImportError:
    # Build-tree layout: the extension sits on sys.path, not in the package.
    from _freeprob import *  # type: ignore # noqa: F401,F403

__all__ = [
    "Distribution",
    "Series",
    "CauchyReport",
    "CauchyCertification",
    "Sigma0Report",
    "VoiculescuReport",
    "VoiculescuCertification",
    "DivisibilityReport",
    "fixture",
    "cauchy",
    "f_transform",
    "voiculescu",
    "density",
    "h_series",
    "r_series",
    "counterexample_series",
    "certify_cauchy",
    "certify_voiculescu",
    "convolve",
    "convolution_root",
    "semigroup_apply",
    "is_infinitely_divisible",
    "certify_sigma0",
]
