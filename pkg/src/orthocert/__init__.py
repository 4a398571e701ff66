"""Certificates of orthogonal equivalence of real polynomials via
polynomial-weighted principal component analysis (PW-PCA)."""
from .certificate import (
    Certificate,
    CertificationError,
    DegenerateSpectrum,
    NoSignflipFound,
    NotEquivalent,
    ResidualTooLarge,
    SpectraMismatch,
    certify,
    check_equivalence_partial,
)
from .polyalg import Polynomial, act_linear, format_polynomial, homogenize, parse_polynomial
from .pwcov import pw_covariance
from .spectra import PwPca, pw_pca

__version__ = "0.1.0"
