"""Time propagation of per-wavenumber states and band-wise decay envelopes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.integrate

from .errors import BandViolation, NonPositiveRate, NotDiagonalizable
from .medium import LorentzMedium
from .operators import PerpOperator, PerpState, build_perp_operator

#: local tolerances of the explicit integration oracle
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12


@dataclass
class PropagatorResult:
    k: float
    t_grid: np.ndarray
    norms: np.ndarray  # weighted norms |U(k, t)|
    states: Optional[np.ndarray]  # (len(t_grid), dim) when kept
    method: str  # "Eigen" or "Oracle"


def propagate(
    op: PerpOperator,
    initial: PerpState | np.ndarray,
    t_grid: Sequence[float],
    method: str = "eigen",
    keep_states: bool = True,
) -> PropagatorResult:
    """Evolve the state through exp(-i A t) on the sorted nonnegative grid.

    The eigen path expands the state over the spectral projectors; when the
    operator is not cleanly diagonalizable it falls back to the integration
    oracle and tags the result accordingly.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) < 0) or np.any(t_grid < 0):
        raise ValueError("t_grid must be sorted and nonnegative")
    u0 = initial.data if isinstance(initial, PerpState) else np.asarray(initial, complex)

    if method == "eigen":
        try:
            dec = op.eigen
        except NotDiagonalizable:
            result = propagate(op, u0, t_grid, method="oracle", keep_states=keep_states)
            result.method = "Oracle"
            return result
        comps = np.stack([p @ u0 for p in dec.projectors])  # (n_eigs, dim)
        phases = np.exp(-1j * np.outer(t_grid, dec.eigenvalues))  # (nt, n_eigs)
        states = phases @ comps
        tag = "Eigen"
    elif method == "oracle":
        a = op.matrix

        def rhs(_, y):
            return -1j * (a @ y)

        sol = scipy.integrate.solve_ivp(
            rhs,
            (0.0, float(t_grid[-1]) if len(t_grid) else 0.0),
            u0,
            t_eval=t_grid,
            method="DOP853",
            rtol=ODE_RTOL,
            atol=ODE_ATOL,
        )
        if not sol.success:
            raise RuntimeError(f"integration oracle failed: {sol.message}")
        states = sol.y.T.astype(complex)
        tag = "Oracle"
    else:
        raise ValueError(f"unknown method {method!r}")

    norms = np.array([op.norm(s) for s in states])
    return PropagatorResult(
        k=op.k,
        t_grid=t_grid,
        norms=norms,
        states=states if keep_states else None,
        method=tag,
    )


def tail_rate(t: np.ndarray, norms: np.ndarray) -> float:
    """Exponential decay rate from the tail of log-norm against time.

    The fit window starts at the first time the norm halves, which skips the
    non-modal transient of a non-normal operator.
    """
    norms = np.asarray(norms, float)
    below = np.nonzero(norms < 0.5 * norms[0])[0]
    start = int(below[0]) if len(below) else len(norms) // 2
    tt, nn = t[start:], norms[start:]
    good = nn > 0
    if good.sum() < 3:
        raise BandViolation("norm trace too short or vanished for a rate fit")
    slope = np.polyfit(tt[good], np.log(nn[good]), 1)[0]
    return float(-slope)


@dataclass
class EnvelopeFit:
    band: str  # "HF", "LF" or "Mid"
    exponent: float  # power of k in the rate law (0 for Mid)
    rate_constant: float  # C: per-k rate ~ C * k^(-exponent) or C * k^exponent
    prefactor: float  # smallest admissible envelope constant
    per_k: list  # (k, fitted rate) samples
    residual: float


def _spectral_abscissa(medium, k) -> float:
    from .dispersion import solve_dispersion

    return float(np.max(solve_dispersion(medium, k).imag))


def _rate_samples(medium, k_list, t_grid, seed):
    rng = np.random.default_rng(seed)
    out = []
    for k in k_list:
        op = build_perp_operator(medium, float(k))
        u0 = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
        u0 = u0 / op.norm(u0)
        res = propagate(op, u0, t_grid, keep_states=False)
        out.append((float(k), tail_rate(res.t_grid, res.norms), res))
    return out


def hf_envelope_check(
    medium: LorentzMedium,
    k_list: Sequence[float],
    t_grid: Sequence[float],
    critical: Optional[bool] = None,
    seed: int = 0,
) -> EnvelopeFit:
    """Fit the high-band envelope |U| <= prefactor * exp(-C t / k^e).

    e is 2 in the non-critical configuration and 4 in the critical one.
    """
    if critical is None:
        from .medium import Criticality

        critical = medium.check_assumptions().criticality is Criticality.CRITICAL
    power = 4.0 if critical else 2.0
    t_grid = np.asarray(t_grid, float)
    samples = _rate_samples(medium, k_list, t_grid, seed)
    rates = [(k, r) for k, r, _ in samples]
    if any(r <= 0 for _, r in rates):
        raise BandViolation("nonpositive decay rate in the high band")
    c = min(r * k**power for k, r in rates)
    pref = 1.0
    for k, _, res in samples:
        env = np.exp(-c * t_grid / k**power)
        ok = env > 1e-290
        pref = max(pref, float(np.max(res.norms[ok] / (res.norms[0] * env[ok]))))
    resid = float(np.std([np.log(r * k**power / c) for k, r in rates]))
    return EnvelopeFit("HF", power, c, pref, rates, resid)


def lf_envelope_check(
    medium: LorentzMedium,
    k_list: Sequence[float],
    t_grid: Sequence[float],
    seed: int = 0,
) -> EnvelopeFit:
    """Fit the low-band envelope |U| <= prefactor * exp(-C k^2 t)."""
    t_grid = np.asarray(t_grid, float)
    samples = _rate_samples(medium, k_list, t_grid, seed)
    rates = [(k, r) for k, r, _ in samples]
    if any(r <= 0 for _, r in rates):
        raise BandViolation("nonpositive decay rate in the low band")
    c = min(r / k**2 for k, r in rates)
    pref = 1.0
    for k, _, res in samples:
        env = np.exp(-c * k**2 * t_grid)
        ok = env > 1e-290
        pref = max(pref, float(np.max(res.norms[ok] / (res.norms[0] * env[ok]))))
    resid = float(np.std([np.log(r / (c * k**2)) for k, r in rates]))
    return EnvelopeFit("LF", 2.0, c, pref, rates, resid)


def midband_rate(
    medium: LorentzMedium,
    k_band: tuple[float, float],
    samples: int = 20,
    t_grid: Optional[Sequence[float]] = None,
    seed: int = 0,
) -> EnvelopeFit:
    """Uniform exponential rate over the compact band [k_minus, k_plus].

    The reported rate is the minimum fitted per-k rate over the sampled band;
    it must be positive and is cross-checked against the sampled spectral
    abscissa by the caller.
    """
    k_lo, k_hi = k_band
    if k_lo <= 0:
        raise ValueError("mid band must start at a positive wavenumber")
    ks = np.geomspace(k_lo, k_hi, samples)
    if t_grid is None:
        # long enough to resolve the slowest expected rate in the band
        worst = min(-_spectral_abscissa(medium, k) for k in ks)
        if worst <= 0:
            raise NonPositiveRate("spectrum reaches the real axis inside the band")
        t_grid = np.linspace(0.0, 20.0 / worst, 400)
    fits = _rate_samples(medium, ks, np.asarray(t_grid, float), seed)
    rates = [(k, r) for k, r, _ in fits]
    beta = min(r for _, r in rates)
    if beta <= 0:
        raise NonPositiveRate(f"fitted mid-band rate {beta:.3e} is not positive")
    abscissa = min(-_spectral_abscissa(medium, k) for k, _ in rates)
    resid = abs(beta - abscissa) / abscissa
    return EnvelopeFit("Mid", 0.0, beta, 1.0, rates, resid)
