"""Thin wrappers around scipy special functions for real/complex arrays."""

from __future__ import annotations

import numpy as np
from scipy import special


def as_complex(z):
    return np.asarray(z, dtype=complex)


def loggamma(z):
    """Principal-branch log-gamma for real or complex input (complex output)."""
    return special.loggamma(as_complex(z))


def gamma_ratio(a, b):
    """``Gamma(a) / Gamma(b)`` evaluated through log-gamma.

    Real inputs return real output; poles of the denominator give 0.
    """
    a_arr = np.asarray(a)
    b_arr = np.asarray(b)
    real = not (np.iscomplexobj(a_arr) or np.iscomplexobj(b_arr))
    if real:
        a_arr = a_arr.astype(float)
        b_arr = b_arr.astype(float)
        small = (np.abs(a_arr) < 150) & (np.abs(b_arr) < 150)
        if np.all(small):
            with np.errstate(invalid="ignore", over="ignore"):
                return special.gamma(a_arr) * special.rgamma(b_arr)
    out = np.exp(loggamma(a_arr) - loggamma(b_arr))
    if real:
        # loggamma on the negative axis carries the sign as i*pi
        return out.real
    return out


def rgamma(z):
    return special.rgamma(z)
