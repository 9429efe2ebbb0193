"""Companion-matrix root finding for complex polynomials.

Roots come from the balanced companion matrix, then up to five Newton steps
on the original polynomial. Every root must pass a backward-error residual
certificate before it is returned.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import RootFindingFailure

#: relative backward error accepted for a root
RESIDUAL_TOL = 1e-10

NEWTON_STEPS = 5


def polyval(coeffs: np.ndarray, z) -> np.ndarray:
    """Evaluate a polynomial with ascending coefficients by Horner's rule."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def polyder(coeffs: np.ndarray) -> np.ndarray:
    """Ascending-coefficient derivative."""
    n = len(coeffs)
    if n <= 1:
        return np.zeros(1, dtype=complex)
    return coeffs[1:] * np.arange(1, n)


def backward_error(coeffs: np.ndarray, root: complex) -> float:
    """|p(r)| scaled by sum |c_i| |r|^i, the relative backward error of r."""
    r = abs(root)
    scale = 0.0
    power = 1.0
    for c in coeffs:
        scale += abs(c) * power
        power *= r
    if scale == 0.0:
        return np.inf
    return abs(polyval(coeffs, root)) / scale


def companion_roots(coeffs: np.ndarray, residual_tol: float = RESIDUAL_TOL) -> np.ndarray:
    """All roots of the polynomial with ascending complex coefficients.

    Raises RootFindingFailure when any refined root fails the residual
    certificate |p(r)| / sum |c_i||r|^i < residual_tol.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    # trim trailing (leading-degree) zeros
    nz = np.nonzero(np.abs(coeffs) > 0)[0]
    if len(nz) == 0:
        raise RootFindingFailure("zero polynomial has no well-defined roots")
    coeffs = coeffs[: nz[-1] + 1]
    # deflate exact roots at the origin (identically zero low-order coefficients),
    # where a relative backward error is meaningless
    deflated = int(nz[0])
    coeffs = coeffs[deflated:]
    n = len(coeffs) - 1
    zeros = np.zeros(deflated, dtype=complex)
    if n == 0:
        return zeros
    if n == 1:
        return np.concatenate([zeros, [-coeffs[0] / coeffs[1]]])

    monic = coeffs / coeffs[-1]
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -monic[:-1]
    roots = scipy.linalg.eigvals(comp)  # geev balances internally

    deriv = polyder(coeffs)
    for _ in range(NEWTON_STEPS):
        pv = polyval(coeffs, roots)
        dv = polyval(deriv, roots)
        ok = np.abs(dv) > 0
        step = np.zeros_like(roots)
        step[ok] = pv[ok] / dv[ok]
        # damp steps that would jump across the root spacing
        step = np.where(np.abs(step) < 1.0 + np.abs(roots), step, 0.0)
        roots = roots - step

    errs = np.array([backward_error(coeffs, r) for r in roots])
    if np.any(errs > residual_tol):
        worst = float(errs.max())
        raise RootFindingFailure(
            f"root residual certificate failed: max backward error {worst:.3e}"
        )
    return np.concatenate([zeros, roots])
