"""Dispersion relation: polynomial form, root branches over wavenumber, asymptotics.

The eigenvalue equation at wavenumber k is a degree-N polynomial equation.
This module solves it per k, continues the N roots into labeled branches over
a k grid, classifies each branch by its small-k and large-k limit object, and
verifies the closed-form expansion coefficients against the tracked data.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.optimize

from .errors import (
    AsymptoticMismatch,
    BranchCollision,
    DegenerateLeadingCoefficient,
    UnclassifiableBranch,
)
from .medium import CoefficientTable, LorentzMedium, ZeroClass
from .polyroots import companion_roots, polyval

#: relative trim tolerance for polynomial leading coefficients
TRIM_TOL = 1e-14

#: scaled dispersion residual allowed for any tracked sample
SAMPLE_RESIDUAL_TOL = 1e-8

#: roots closer than this (scaled) collide for continuation purposes
MATCH_TOL = 1e-10

MAX_REFINEMENTS = 10


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with ascending complex coefficients, trimmed on construction."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        scale = np.max(np.abs(c)) if len(c) else 0.0
        if scale > 0:
            nz = np.nonzero(np.abs(c) > TRIM_TOL * scale)[0]
            c = c[: nz[-1] + 1] if len(nz) else c[:1]
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, omega):
        return polyval(self.coefficients, omega)

    def derivative(self) -> "ComplexPolynomial":
        n = len(self.coefficients)
        if n <= 1:
            return ComplexPolynomial(np.zeros(1))
        return ComplexPolynomial(self.coefficients[1:] * np.arange(1, n))

    def roots(self) -> np.ndarray:
        return companion_roots(self.coefficients)


# --- branch labels -------------------------------------------------------------


@dataclass(frozen=True)
class PlusInf:
    def __str__(self):
        return "PlusInf"


@dataclass(frozen=True)
class MinusInf:
    def __str__(self):
        return "MinusInf"


@dataclass(frozen=True)
class Pole:
    location: complex
    index: int  # 1-based within the pole's branch fan
    multiplicity: int
    leading: complex  # coefficient of k^(-2/multiplicity)

    def __str__(self):
        return f"Pole({_fmt(self.location)},n={self.index})"


@dataclass(frozen=True)
class Zero0:
    index: int  # 1 or 2; slope is (-1)^index * static_speed

    def __str__(self):
        return f"Zero0(r={self.index})"


@dataclass(frozen=True)
class ZeroSimple:
    location: complex

    def __str__(self):
        return f"ZeroSimple({_fmt(self.location)})"


@dataclass(frozen=True)
class ZeroMinus:
    location: complex
    index: int
    multiplicity: int
    leading: complex  # coefficient of k^(2/multiplicity)

    def __str__(self):
        return f"ZeroMinus({_fmt(self.location)},n={self.index})"


def _fmt(z: complex) -> str:
    return f"{z.real:.6g}{z.imag:+.6g}j"


@dataclass
class BranchFamily:
    """One continuous root branch sampled on the k grid.

    hf_label / lf_label name the large-k and small-k limit objects; both are
    None until classify_branches has run.
    """

    k: np.ndarray
    omega: np.ndarray
    hf_label: object = None
    lf_label: object = None
    asymptotic: Optional[CoefficientTable] = None

    def omega_at(self, k_value: float) -> complex:
        i = int(np.argmin(np.abs(self.k - k_value)))
        if not math.isclose(self.k[i], k_value, rel_tol=1e-9):
            raise KeyError(f"{k_value} is not a grid point of this branch")
        return complex(self.omega[i])

    def label_text(self) -> str:
        hf = str(self.hf_label) if self.hf_label is not None else "?"
        lf = str(self.lf_label) if self.lf_label is not None else "?"
        return f"{hf}|{lf}"


# --- per-k solving ---------------------------------------------------------------


def dispersion_polynomial(medium: LorentzMedium, k: float) -> ComplexPolynomial:
    """Degree-N polynomial whose roots are the eigenvalues at wavenumber k."""
    num, den = medium.numerator_denominator()
    n = num.coefficients
    d = (k * k) * den.coefficients
    out = n.copy()
    out[: len(d)] -= d
    return ComplexPolynomial(out)


def solve_dispersion(medium: LorentzMedium, k: float) -> np.ndarray:
    """All N roots at wavenumber k, certified by the residual check."""
    return dispersion_polynomial(medium, k).roots()


def default_k_grid(medium: LorentzMedium, points_per_decade: int = 200) -> np.ndarray:
    """Log-spaced grid covering both asymptotic regimes of the medium."""
    catalog = medium.catalog
    p_max = max(abs(p.location) for p in catalog.poles)
    z_nonzero = [abs(z.location) for z in catalog.zeros if abs(z.location) > 0]
    k_max = max(1e3, 10.0 * p_max)
    k_min = min(1e-3, 0.01 * min(z_nonzero)) if z_nonzero else 1e-3
    decades = math.log10(k_max / k_min)
    n = max(2, int(round(points_per_decade * decades)) + 1)
    return np.geomspace(k_min, k_max, n)


# --- continuation ------------------------------------------------------------------


def _match(prev: np.ndarray, new: np.ndarray):
    """Permutation pairing previous roots with new roots.

    Greedy nearest-neighbour assignment, falling back to the optimal bipartite
    matching when any pairing is contested or a near tie.
    """
    dist = np.abs(prev[:, None] - new[None, :])
    order = np.argmin(dist, axis=1)
    ambiguous = len(set(order.tolist())) != len(order)
    if not ambiguous:
        # greedy succeeded; check it is not a near tie anywhere
        part = np.partition(dist, 1, axis=1)
        ambiguous = bool(np.any(part[:, 1] < 2.0 * part[:, 0]))
    if ambiguous:
        _, order = scipy.optimize.linear_sum_assignment(dist)
    return np.asarray(order)


def _min_pairwise(roots: np.ndarray) -> float:
    d = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _continue_step(medium, k0, roots0, k1, depth=0):
    roots1 = solve_dispersion(medium, k1)
    d = np.abs(roots1[:, None] - roots1[None, :])
    np.fill_diagonal(d, np.inf)
    pair_scale = 1.0 + np.minimum(
        np.abs(roots1)[:, None], np.abs(roots1)[None, :]
    )
    if np.any(d < MATCH_TOL * pair_scale):
        raise BranchCollision(f"roots indistinguishable at k={k1:g}")
    order = _match(roots0, roots1)
    new = roots1[order]
    # per-branch step control: each jump stays small against that branch's own
    # gap to its nearest neighbour (a global max-jump criterion cannot settle
    # when one fast branch coexists with a tight pole fan)
    gaps = np.abs(new[:, None] - new[None, :])
    np.fill_diagonal(gaps, np.inf)
    gaps = gaps.min(axis=1)
    safe = bool(np.all(np.abs(new - roots0) <= 0.2 * gaps))
    if safe or depth >= MAX_REFINEMENTS:
        if not safe:
            raise BranchCollision(
                f"continuation step k={k0:g}->{k1:g} still ambiguous after "
                f"{MAX_REFINEMENTS} refinements"
            )
        return new
    mid = math.sqrt(k0 * k1)
    roots_mid = _continue_step(medium, k0, roots0, mid, depth + 1)
    return _continue_step(medium, mid, roots_mid, k1, depth + 1)


def track_branches(medium: LorentzMedium, k_grid: Sequence[float]) -> list[BranchFamily]:
    """Continue the N dispersion roots across the sorted positive grid."""
    k_grid = np.asarray(k_grid, dtype=float)
    if np.any(np.diff(k_grid) <= 0) or np.any(k_grid <= 0):
        raise ValueError("k_grid must be strictly increasing and positive")
    roots = solve_dispersion(medium, k_grid[0])
    # deterministic start ordering
    roots = roots[np.lexsort((roots.imag, roots.real))]
    n = len(roots)
    path = np.empty((len(k_grid), n), dtype=complex)
    path[0] = roots
    for i in range(1, len(k_grid)):
        path[i] = _continue_step(medium, k_grid[i - 1], path[i - 1], k_grid[i])
    return [BranchFamily(k=k_grid.copy(), omega=path[:, j].copy()) for j in range(n)]


# --- classification ------------------------------------------------------------------


def _fan_indices(directions, m, base_angle):
    """Assign fan index n in 1..m by angular match against e^(i(base+2*pi*n/m))."""
    targets = [(base_angle + 2.0 * math.pi * n / m) for n in range(1, m + 1)]
    cost = np.zeros((len(directions), m))
    for a, d in enumerate(directions):
        ang = cmath.phase(d)
        for b, t in enumerate(targets):
            diff = (ang - t + math.pi) % (2.0 * math.pi) - math.pi
            cost[a, b] = abs(diff)
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    out = np.empty(len(directions), dtype=int)
    out[rows] = cols + 1
    return out


def classify_branches(
    branches: list[BranchFamily], medium: LorentzMedium
) -> list[BranchFamily]:
    """Attach the large-k and small-k limit labels to every branch."""
    catalog = medium.catalog
    table = medium.asymptotic_coefficients()
    n = len(branches)
    end = np.array([b.omega[-1] for b in branches])
    start = np.array([b.omega[0] for b in branches])

    hf_labels: list = [None] * n
    # the two unbounded branches dominate in modulus at the far end
    by_mod = np.argsort(-np.abs(end))
    cone = sorted(by_mod[:2], key=lambda i: end[i].real)
    if end[cone[0]].real >= 0 or end[cone[1]].real <= 0:
        raise UnclassifiableBranch("could not identify the two unbounded branches")
    hf_labels[cone[0]] = MinusInf()
    hf_labels[cone[1]] = PlusInf()

    groups: dict[complex, list[int]] = {}
    for i in by_mod[2:]:
        entry = catalog.nearest_pole(end[i])
        groups.setdefault(entry.location, []).append(i)
    for loc, members in groups.items():
        entry = next(p for p in catalog.poles if p.location == loc)
        if len(members) != entry.multiplicity:
            raise UnclassifiableBranch(
                f"{len(members)} branches converge to pole {loc} "
                f"of multiplicity {entry.multiplicity}"
            )
        m = entry.multiplicity
        mod = abs(entry.residue) ** (1.0 / m)
        base = cmath.phase(entry.residue) / m
        dirs = [end[i] - loc for i in members]
        for i, nn in zip(members, _fan_indices(dirs, m, base)):
            a = mod * cmath.exp(1j * (base + 2.0 * math.pi * nn / m))
            hf_labels[i] = Pole(loc, int(nn), m, a)

    lf_labels: list = [None] * n
    by_mod0 = np.argsort(np.abs(start))
    origin_pair = sorted(by_mod0[:2], key=lambda i: start[i].real)
    if start[origin_pair[0]].real >= 0 or start[origin_pair[1]].real <= 0:
        raise UnclassifiableBranch("could not identify the two branches through 0")
    lf_labels[origin_pair[0]] = Zero0(1)
    lf_labels[origin_pair[1]] = Zero0(2)

    zgroups: dict[complex, list[int]] = {}
    for i in by_mod0[2:]:
        entry = catalog.nearest_zero(start[i])
        if entry.klass is ZeroClass.ORIGIN:
            raise UnclassifiableBranch(f"extra branch near the origin: {start[i]}")
        zgroups.setdefault(entry.location, []).append(i)
    for loc, members in zgroups.items():
        entry = next(z for z in catalog.zeros if z.location == loc)
        if len(members) != entry.multiplicity:
            raise UnclassifiableBranch(
                f"{len(members)} branches converge to zero {loc} "
                f"of multiplicity {entry.multiplicity}"
            )
        m = entry.multiplicity
        if entry.klass is ZeroClass.SIMPLE_REAL:
            lf_labels[members[0]] = ZeroSimple(loc)
            continue
        # branch coefficient is 1/a_n where a_n are the m-th roots of the residue
        mod = abs(entry.residue) ** (1.0 / m)
        base = cmath.phase(entry.residue) / m
        dirs = [start[i] - loc for i in members]
        inv_dirs = [1.0 / d for d in dirs]  # direction of a_n itself
        for i, nn in zip(members, _fan_indices(inv_dirs, m, base)):
            a = mod * cmath.exp(1j * (base + 2.0 * math.pi * nn / m))
            lf_labels[i] = ZeroMinus(loc, int(nn), m, 1.0 / a)

    out = []
    for b, hf, lf in zip(branches, hf_labels, lf_labels):
        out.append(replace(b, hf_label=hf, lf_label=lf, asymptotic=table))
    return out


# --- expansions and their verification -------------------------------------------------


def hf_expansion(label, table: CoefficientTable):
    """(expansion(k), next omitted power) for a large-k label."""
    c = table.vacuum_speed
    if isinstance(label, PlusInf):
        return (
            lambda k: c * k
            + table.total_coupling / (2 * c) / k
            - 1j * table.damped_coupling / (2 * c * c) / k**2,
            -3.0,
        )
    if isinstance(label, MinusInf):
        return (
            lambda k: -c * k
            - table.total_coupling / (2 * c) / k
            - 1j * table.damped_coupling / (2 * c * c) / k**2,
            -3.0,
        )
    if isinstance(label, Pole):
        try:
            coef = table.for_pole(label.location)
        except KeyError:
            # branch into a non-real pole: only the leading fan term is known
            m = label.multiplicity
            return (
                lambda k: label.location + label.leading * k ** (-2.0 / m),
                -4.0 / m,
            )
        if label.multiplicity == 1:
            return (
                lambda k: label.location
                + coef.second_order / k**2
                + coef.fourth_order / k**4,
                -6.0,
            )
        sign = -1.0 if label.index == 1 else 1.0
        # fan order n=1,2 corresponds to -+ the positive split for real residue
        s = sign * coef.split
        return (
            lambda k, s=s: label.location + s / k + coef.second_order / k**2,
            -3.0,
        )
    raise ValueError(f"not a large-k label: {label}")


def lf_expansion(label, table: CoefficientTable):
    """(expansion(k), next omitted power) for a small-k label."""
    if isinstance(label, Zero0):
        sign = -1.0 if label.index == 1 else 1.0
        return (
            lambda k: sign * table.static_speed * k + table.lf_second_order * k**2,
            3.0,
        )
    if isinstance(label, ZeroSimple):
        coef = table.for_zero(label.location)
        return (lambda k: label.location + coef.curvature * k**2, 4.0)
    if isinstance(label, ZeroMinus):
        m = label.multiplicity
        return (
            lambda k: label.location + label.leading * k ** (2.0 / m),
            4.0 / m,
        )
    raise ValueError(f"not a small-k label: {label}")


@dataclass(frozen=True)
class ConvergenceReport:
    label: object
    k_probe: np.ndarray
    residuals: np.ndarray
    expected_order: float
    fitted_order: float

    @property
    def ok(self) -> bool:
        return abs(self.fitted_order - self.expected_order) <= 0.2 * abs(
            self.expected_order
        )


def verify_asymptotics(
    branch: BranchFamily, table: CoefficientTable, k_probe: Sequence[float],
    regime: str = "hf",
) -> ConvergenceReport:
    """Check that branch residuals against the expansion decay at the right order.

    The fitted order comes from least squares on the 3 extreme probes (largest
    k for the high-frequency regime, smallest for the low-frequency one).
    """
    label = branch.hf_label if regime == "hf" else branch.lf_label
    expansion, expected = (
        hf_expansion(label, table) if regime == "hf" else lf_expansion(label, table)
    )
    k_probe = np.asarray(sorted(k_probe), dtype=float)
    res = np.array(
        [abs(branch.omega_at(k) - expansion(k)) for k in k_probe], dtype=float
    )
    if np.any(res == 0):
        fitted = expected
    else:
        sel = slice(-3, None) if regime == "hf" else slice(None, 3)
        fitted = float(
            np.polyfit(np.log(k_probe[sel]), np.log(res[sel]), 1)[0]
        )
    report = ConvergenceReport(
        label=label,
        k_probe=k_probe,
        residuals=res,
        expected_order=expected,
        fitted_order=fitted,
    )
    if not report.ok:
        raise AsymptoticMismatch(
            f"{label}: fitted residual order {fitted:.3f}, expected {expected:.3f}"
        )
    return report


# --- band diagnosis -----------------------------------------------------------------


def _within_leading(branch: BranchFamily, table, idx: int, regime: str) -> bool:
    k = branch.k[idx]
    w = branch.omega[idx]
    if regime == "hf":
        label = branch.hf_label
        c = table.vacuum_speed
        if isinstance(label, (PlusInf, MinusInf)):
            lead = c * k if isinstance(label, PlusInf) else -c * k
            return abs(w - lead) <= 0.25 * abs(lead)
        lead = label.leading * k ** (-2.0 / label.multiplicity)
        return abs(w - label.location - lead) <= 0.25 * abs(lead)
    label = branch.lf_label
    if isinstance(label, Zero0):
        lead = (-1.0 if label.index == 1 else 1.0) * table.static_speed * k
        return abs(w - lead) <= 0.25 * abs(lead)
    if isinstance(label, ZeroSimple):
        lead = table.for_zero(label.location).curvature * k**2
        return abs(w - label.location - lead) <= 0.25 * abs(lead)
    lead = label.leading * k ** (2.0 / label.multiplicity)
    return abs(w - label.location - lead) <= 0.25 * abs(lead)


def diagnose_bands(branches: list[BranchFamily], table: CoefficientTable):
    """(k_minus, k_plus): outermost grid points where asymptopia is reached.

    A grid point is inside the high band when all roots are simple (pairwise
    separation above ten times the clustering tolerance) and every branch sits
    within 25 percent of its leading asymptotic term; the low band is
    symmetric.  Raises when no grid point qualifies.
    """
    k = branches[0].k
    npts = len(k)
    roots = np.stack([b.omega for b in branches], axis=1)

    def simple(i):
        r = roots[i]
        d = np.abs(r[:, None] - r[None, :])
        np.fill_diagonal(d, np.inf)
        # ten times the clustering tolerance, scaled per pair
        scale = 1.0 + np.maximum(np.abs(r)[:, None], np.abs(r)[None, :])
        return bool(np.all(d > 1e-6 * scale))

    k_plus = None
    for i in range(npts - 1, -1, -1):
        if simple(i) and all(
            _within_leading(b, table, i, "hf") for b in branches
        ):
            k_plus = k[i]
        else:
            break
    k_minus = None
    for i in range(npts):
        if simple(i) and all(
            _within_leading(b, table, i, "lf") for b in branches
        ):
            k_minus = k[i]
        else:
            break
    if k_plus is None or k_minus is None:
        raise UnclassifiableBranch("no grid point reaches the asymptotic regime")
    return float(k_minus), float(k_plus)


# --- Puiseux engine -----------------------------------------------------------------


@dataclass(frozen=True)
class PuiseuxResult:
    """Local solution fans of fun(omega) = zeta^m around an m-fold zero.

    roots holds the m-th roots a_n of the leading coefficient, ordered by the
    principal-argument convention; the n-th branch behaves like
    center + first_order[n] * zeta + second_order[n] * zeta^2.
    """

    center: complex
    multiplicity: int
    roots: tuple[complex, ...]
    first_order: tuple[complex, ...]
    second_order: tuple[complex, ...]


def puiseux_expand(
    fun: Callable[[complex], complex],
    center: complex,
    multiplicity: int,
    radius: float = 1e-3,
    nodes: int = 64,
) -> PuiseuxResult:
    """Extract the two leading Puiseux coefficients of fun at an m-fold zero.

    fun must factor as (omega - center)^m * g(omega) with g analytic and
    nonzero at the center; g and g' are recovered from trapezoidal contour
    sums on circles of radius and half radius (Richardson-combined).
    """
    m = int(multiplicity)

    def taylor(r):
        theta = 2.0 * math.pi * np.arange(nodes) / nodes
        ring = center + r * np.exp(1j * theta)
        vals = np.array([fun(w) for w in ring])
        gz = np.mean(vals * np.exp(-1j * m * theta)) / r**m
        gp = np.mean(vals * np.exp(-1j * (m + 1) * theta)) / r ** (m + 1)
        return gz, gp, float(np.max(np.abs(vals))) / r**m

    g1, gp1, _ = taylor(radius)
    g2, gp2, size = taylor(radius / 2)
    w = 2.0**nodes
    g = (w * g2 - g1) / (w - 1.0)
    g_prime = (w * gp2 - gp1) / (w - 1.0)

    # size is the natural magnitude of g inferred from the ring values
    if size == 0.0 or abs(g) <= 1e-10 * size:
        raise DegenerateLeadingCoefficient(
            f"leading coefficient ~ {abs(g):.3e} at {center}"
        )

    mod = abs(g) ** (1.0 / m)
    base = cmath.phase(g) / m
    roots = tuple(
        mod * cmath.exp(1j * (base + 2.0 * math.pi * n / m)) for n in range(1, m + 1)
    )
    first = tuple(1.0 / a for a in roots)
    second = tuple(-g_prime / (m * g * a * a) for a in roots)
    return PuiseuxResult(
        center=complex(center),
        multiplicity=m,
        roots=roots,
        first_order=first,
        second_order=second,
    )
