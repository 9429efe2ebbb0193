"""Radial Plancherel quadrature of the total energy and polynomial decay fits.

The squared norm of the solution is a radial integral of per-wavenumber decay
traces against an initial radial profile.  Composite Gauss-Legendre panels
(log-spaced edges, plain Gauss nodes inside each panel) integrate it; the
number of panels doubles until the energy at the final time settles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .dispersion import (
    MinusInf,
    PlusInf,
    Pole,
    Zero0,
    ZeroSimple,
    hf_expansion,
    lf_expansion,
    solve_dispersion,
)
from .errors import (
    ExponentMismatch,
    NonPolynomialDecay,
    QuadratureNonconvergent,
    WindowTooShort,
)
from .medium import CoefficientTable, Criticality, LorentzMedium
from .operators import build_perp_operator, eigenvector_columns
from .evolution import propagate

QUAD_TOL = 1e-6
NODES_PER_PANEL = 32
MAX_PANEL_DOUBLINGS = 8

#: default construction slack above the sharp Sobolev tail exponent
DEFAULT_EPS = 0.1


# --- radial profiles --------------------------------------------------------------


@dataclass(frozen=True)
class RadialProfile:
    """phi(k) supported on [k_min, k_max]."""

    k_min: float
    k_max: float
    shape: Callable[[np.ndarray], np.ndarray]
    tag: str

    def __post_init__(self):
        if not (0 < self.k_min < self.k_max):
            raise ValueError("profile band must satisfy 0 < k_min < k_max")

    def __call__(self, k):
        return self.shape(np.asarray(k, dtype=float))


def power_law(p: float, k_min: float, k_max: float) -> RadialProfile:
    """phi(k) = k^p on the band: the low-frequency datum class."""
    if p < 0:
        raise ValueError("power-law exponent must be nonnegative")
    return RadialProfile(k_min, k_max, lambda k: k**p, f"PowerLaw({p:g})")


def sobolev_tail(m: float, s: float, k_min: float, k_max: float) -> RadialProfile:
    """phi(k) = (1+k^2)^(-s/2): a datum of Sobolev regularity m needs s > 3/2 + m."""
    if not s > 1.5 + m:
        raise ValueError(f"need s > 3/2 + m, got s={s}, m={m}")
    return RadialProfile(
        k_min, k_max, lambda k: (1.0 + k * k) ** (-s / 2.0), f"SobolevTail({m:g},{s:g})"
    )


def tabulated(k_values, phi_values) -> RadialProfile:
    k_values = np.asarray(k_values, float)
    phi_values = np.asarray(phi_values, float)
    return RadialProfile(
        float(k_values[0]),
        float(k_values[-1]),
        lambda k: np.interp(k, k_values, phi_values),
        "Tabulated",
    )


# --- direction rules ---------------------------------------------------------------


@dataclass(frozen=True)
class OptimalBranch:
    """Initial direction: the unit eigenvector of a named slow branch."""

    label: object  # a dispersion branch label (PlusInf, Zero0, Pole, ...)


@dataclass(frozen=True)
class FixedRandomUnit:
    """Initial direction: one seed-determined random state, shared by every k.

    Keeping the direction independent of k makes the radial integrand smooth,
    so the panel-doubling quadrature actually converges; per-node redraws
    would turn the integrand into noise.
    """

    seed: int = 0


def branch_eigenvalue(
    medium: LorentzMedium, table: CoefficientTable, label, k: float
) -> complex:
    """The dispersion root at k belonging to the labeled branch.

    Matches roots against the branch's asymptotic anchor, so k must lie in
    the label's validity band.
    """
    if isinstance(label, (PlusInf, MinusInf, Pole)):
        anchor, _ = hf_expansion(label, table)
    elif isinstance(label, (Zero0, ZeroSimple)):
        anchor, _ = lf_expansion(label, table)
    else:
        raise ValueError(f"cannot anchor branch label {label}")
    roots = solve_dispersion(medium, k)
    return complex(roots[np.argmin(np.abs(roots - anchor(k)))])


def _direction(medium, table, rule, op, k):
    if isinstance(rule, OptimalBranch):
        omega = branch_eigenvalue(medium, table, rule.label, k)
        v = eigenvector_columns(medium, k, omega)[:, 0]
        return v / op.norm(v)
    if isinstance(rule, FixedRandomUnit):
        rng = np.random.default_rng(rule.seed)
        v = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
        return v / op.norm(v)
    raise ValueError(f"unknown direction rule {rule!r}")


# --- the energy integral -------------------------------------------------------------


@dataclass
class DecayRecord:
    t_grid: np.ndarray
    energy: np.ndarray
    tag: str
    panels: int
    gamma: Optional[float] = None
    gamma_confidence: Optional[float] = None
    fit_window: Optional[tuple] = None

    def positive(self) -> bool:
        return bool(np.all(self.energy > 0))


def gauss_panels(k_min: float, k_max: float, n_panels: int, nodes: int = NODES_PER_PANEL):
    """Nodes and weights: log-spaced panel edges, Gauss-Legendre inside each."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.geomspace(k_min, k_max, n_panels + 1)
    ks, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        ks.append(0.5 * (b - a) * x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(ks), np.concatenate(ws)


def simulate_energy(
    medium: LorentzMedium,
    profile: RadialProfile,
    direction_rule,
    t_grid: Sequence[float],
    tag: str = "",
    threads: Optional[int] = None,
) -> DecayRecord:
    """E(t) = 4*pi * integral of k^2 phi(k)^2 |exp(-iAt) v(k)|^2 over the band."""
    from .parallel import parallel_map

    t_grid = np.asarray(t_grid, dtype=float)
    table = medium.asymptotic_coefficients()

    def node_trace(k):
        op = build_perp_operator(medium, float(k))
        v = _direction(medium, table, direction_rule, op, float(k))
        res = propagate(op, v, t_grid, keep_states=False)
        return res.norms**2

    decades = max(math.log10(profile.k_max / profile.k_min), 0.3)
    n_panels = max(1, int(math.ceil(decades)))
    prev_ref = None
    for _ in range(MAX_PANEL_DOUBLINGS + 1):
        ks, ws = gauss_panels(profile.k_min, profile.k_max, n_panels)
        phi2 = profile(ks) ** 2
        traces = parallel_map(node_trace, list(ks), threads)
        energy = 4.0 * math.pi * np.einsum(
            "i,ij->j", ws * ks**2 * phi2, np.stack(traces)
        )
        ref = float(energy[-1])
        if prev_ref is not None and abs(ref - prev_ref) <= QUAD_TOL * abs(prev_ref):
            return DecayRecord(t_grid=t_grid, energy=energy, tag=tag, panels=n_panels)
        prev_ref = ref
        n_panels *= 2
    raise QuadratureNonconvergent(
        f"energy quadrature not settled after {n_panels // 2} panels"
    )


# --- exponent fitting ----------------------------------------------------------------


def fit_exponent(record: DecayRecord, window: tuple[float, float]):
    """Least-squares power-law exponent of the energy on the time window.

    Returns (gamma, confidence) where the confidence is the largest deviation
    of local two-point slopes from the global slope.  Monotone local-slope
    drift beyond 0.3 means the decay is not a power law.
    """
    t_lo, t_hi = window
    if t_lo < 1e2 * (1 - 1e-12):
        raise WindowTooShort("fit window must start inside the asymptotic regime")
    sel = (record.t_grid >= t_lo) & (record.t_grid <= t_hi)
    t = record.t_grid[sel]
    e = record.energy[sel]
    if len(t) < 3:
        raise WindowTooShort(f"only {len(t)} samples inside {window}")
    if np.any(e <= 0):
        raise WindowTooShort("energy vanished inside the fit window")
    logt, loge = np.log(t), np.log(e)
    slope = np.polyfit(logt, loge, 1)[0]
    local = np.diff(loge) / np.diff(logt)
    drift = local[-1] - local[0]
    monotone = np.all(np.diff(local) >= -1e-12) or np.all(np.diff(local) <= 1e-12)
    if monotone and abs(drift) > 0.3:
        raise NonPolynomialDecay(
            f"local slopes drift monotonically by {drift:.3f}; not a power law"
        )
    gamma = float(-slope)
    confidence = float(np.max(np.abs(local - slope)))
    record.gamma = gamma
    record.gamma_confidence = confidence
    record.fit_window = (float(t_lo), float(t_hi))
    return gamma, confidence


# --- exponent verification -------------------------------------------------------------


@dataclass
class GammaReport:
    target: float
    fitted: float
    tolerance: float
    record: DecayRecord
    window: tuple[float, float]

    @property
    def ok(self) -> bool:
        return abs(self.fitted - self.target) <= self.tolerance * self.target

    def text(self) -> str:
        status = "ok" if self.ok else "MISMATCH"
        return (
            f"tag={self.record.tag} fitted_gamma={self.fitted:.4f} "
            f"target={self.target:.4f} tol={self.tolerance:.0%} "
            f"window=[{self.window[0]:g},{self.window[1]:g}] {status}\n"
            "note: the fitted exponent certifies the constructed optimal family "
            "up to fit tolerance; the theorem supremum is over all admissible data."
        )


def _log_time_grid(t_max: float, per_decade: int = 20) -> np.ndarray:
    n = int(round(per_decade * math.log10(t_max))) + 1
    return np.geomspace(1.0, t_max, n)


def verify_gamma_hf(
    medium: LorentzMedium,
    m: float,
    s: Optional[float] = None,
    eps: float = DEFAULT_EPS,
    k_plus: Optional[float] = None,
    tolerance: float = 0.10,
    threads: Optional[int] = None,
) -> GammaReport:
    """Reproduce the optimal high-frequency exponent: m, or m/2 when critical.

    The initial datum follows the optimality construction: the slowest
    high-band branch eigenvector under the sharpest admissible Sobolev tail
    for class m (exponent 3/4 + m/2 + eps/2, so the observable exponent is
    m + eps up to fit tolerance).  A caller-supplied s only declares the tail
    class and must be admissible for m.
    """
    if s is not None and not s > 1.5 + m:
        raise ValueError(f"declared tail class needs s > 3/2 + m, got {s}")
    report = medium.check_assumptions()
    critical = report.criticality is Criticality.CRITICAL
    table = medium.asymptotic_coefficients()
    if k_plus is None:
        k_plus = diagnosed_bands(medium)[1]

    if critical:
        pole = next(
            (p for p in table.simple_poles if abs(p.second_order.imag) < 1e-12),
            None,
        )
        if pole is None:
            raise ExponentMismatch("critical medium has no lossless-at-order-2 pole")
        label = Pole(pole.pole, 1, 1, pole.second_order)
        sigma = 2.0 * abs(pole.fourth_order.imag)
        power = 4.0
        target = m / 2.0
    else:
        label = PlusInf()
        sigma = table.damped_coupling / table.vacuum_speed**2
        power = 2.0
        target = m

    s_run = 1.5 + m + eps
    # the dominant wavenumber (sigma*t)^(1/power) must sit deep inside the band
    t_onset = (8.0 * k_plus) ** power / sigma
    t_max = max(1e4, 100.0 * t_onset)
    k_star = (sigma * t_max) ** (1.0 / power)
    profile = sobolev_tail(m, s_run, k_plus, 30.0 * k_star)
    t_grid = _log_time_grid(t_max)
    record = simulate_energy(
        medium,
        profile,
        OptimalBranch(label),
        t_grid,
        tag=f"hf(m={m:g},{'critical' if critical else 'non-critical'})",
        threads=threads,
    )
    window = (max(1e2, t_onset), t_max)
    fitted, _ = fit_exponent(record, window)
    out = GammaReport(target, fitted, tolerance, record, window)
    if not out.ok:
        raise ExponentMismatch(out.text())
    return out


def verify_gamma_lf(
    medium: LorentzMedium,
    p: float,
    k_minus: Optional[float] = None,
    tolerance: float = 0.10,
    threads: Optional[int] = None,
) -> GammaReport:
    """Reproduce the optimal low-frequency exponent p + 3/2."""
    table = medium.asymptotic_coefficients()
    if k_minus is None:
        k_minus = diagnosed_bands(medium)[0]
    sigma = 2.0 * abs(table.lf_second_order.imag)
    if sigma == 0:
        raise ExponentMismatch("no dissipation reaches the low band")

    t_onset = 30.0 / (sigma * k_minus**2)
    t_max = max(1e4, 100.0 * t_onset)
    k_floor = math.sqrt(1.0 / (sigma * t_max)) / 20.0
    profile = power_law(p, k_floor, k_minus)
    t_grid = _log_time_grid(t_max)
    record = simulate_energy(
        medium,
        profile,
        OptimalBranch(Zero0(1)),
        t_grid,
        tag=f"lf(p={p:g})",
        threads=threads,
    )
    window = (max(1e2, t_onset), t_max)
    fitted, _ = fit_exponent(record, window)
    out = GammaReport(p + 1.5, fitted, tolerance, record, window)
    if not out.ok:
        raise ExponentMismatch(out.text())
    return out


def convergence_to_zero(
    medium: LorentzMedium,
    t_list: Sequence[float],
    k_band: Optional[tuple[float, float]] = None,
    seed: int = 0,
    threads: Optional[int] = None,
) -> DecayRecord:
    """Full-band energy run demonstrating monotone decay toward zero."""
    if k_band is None:
        k_minus, k_plus = diagnosed_bands(medium)
        k_band = (k_minus / 10.0, 10.0 * k_plus)
    profile = power_law(0.0, *k_band)
    record = simulate_energy(
        medium,
        profile,
        FixedRandomUnit(seed),
        np.asarray(t_list, float),
        tag="full-band",
        threads=threads,
    )
    return record


_BAND_CACHE: dict = {}


def diagnosed_bands(medium: LorentzMedium) -> tuple[float, float]:
    """(k_minus, k_plus) from tracked branches, cached per medium."""
    key = medium
    if key not in _BAND_CACHE:
        from .dispersion import classify_branches, default_k_grid, diagnose_bands, track_branches

        branches = classify_branches(
            track_branches(medium, default_k_grid(medium)), medium
        )
        _BAND_CACHE[key] = diagnose_bands(branches, medium.asymptotic_coefficients())
    return _BAND_CACHE[key]
