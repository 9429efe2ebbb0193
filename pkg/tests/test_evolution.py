"""Propagation, contraction, and band-wise decay envelopes."""

import numpy as np
import pytest
import scipy.linalg

from lorentzmodes import dispersion as dsp
from lorentzmodes import evolution as evo
from lorentzmodes import operators as ops


@pytest.fixture()
def rng():
    return np.random.default_rng(17)


def unit_state(op, rng):
    u = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
    return u / op.norm(u)


class TestPropagate:
    def test_initial_state_returned_exactly(self, reference_medium, rng):
        op = ops.build_perp_operator(reference_medium, 1.0)
        u0 = unit_state(op, rng)
        res = evo.propagate(op, u0, [0.0, 1.0])
        np.testing.assert_allclose(res.states[0], u0, atol=1e-12)

    def test_undamped_norm_constant(self, undamped_medium, rng):
        op = ops.build_perp_operator(undamped_medium, 0.7)
        u0 = unit_state(op, rng)
        res = evo.propagate(op, u0, np.linspace(0, 100, 40))
        assert np.max(np.abs(res.norms - 1.0)) < 1e-9

    def test_eigen_vs_oracle(self, reference_medium, rng):
        op = ops.build_perp_operator(reference_medium, 1.0)
        u0 = unit_state(op, rng)
        t = np.array([0.0, 1.0, 10.0, 100.0])
        eig = evo.propagate(op, u0, t)
        ode = evo.propagate(op, u0, t, method="oracle")
        assert eig.method == "Eigen" and ode.method == "Oracle"
        assert np.max(np.abs(eig.states - ode.states)) < 1e-8

    def test_norms_nonincreasing(self, reference_medium, rng):
        op = ops.build_perp_operator(reference_medium, 2.0)
        u0 = unit_state(op, rng)
        res = evo.propagate(op, u0, np.linspace(0, 50, 200))
        assert np.all(np.diff(res.norms) <= 1e-10)

    def test_semigroup_property(self, reference_medium, rng):
        op = ops.build_perp_operator(reference_medium, 0.9)
        u0 = unit_state(op, rng)
        t1, t2 = 3.0, 4.5
        once = evo.propagate(op, u0, [t1 + t2]).states[-1]
        part = evo.propagate(op, u0, [t1]).states[-1]
        twice = evo.propagate(op, part, [t2]).states[-1]
        np.testing.assert_allclose(once, twice, atol=1e-9)

    def test_contraction_of_matrix_exponential(self, reference_medium):
        # independent route: dense expm, measured in the weighted norm
        op = ops.build_perp_operator(reference_medium, 1.3)
        for t in (0.1, 1.0, 5.0, 25.0):
            e = scipy.linalg.expm(-1j * op.matrix * t)
            assert op.operator_norm(e) <= 1.0 + 1e-10

    def test_long_time_rate_is_spectral_abscissa(self, reference_medium, rng):
        # probe where rate*t ~ 30..60: deep in the modal regime but still
        # far above the double-precision underflow floor
        op = ops.build_perp_operator(reference_medium, 1.0)
        u0 = unit_state(op, rng)
        abscissa = float(np.max(op.eigen.eigenvalues.imag))
        t_ref = 30.0 / abs(abscissa)
        res = evo.propagate(op, u0, np.linspace(t_ref, 2 * t_ref, 20), keep_states=False)
        slope = np.polyfit(res.t_grid, np.log(res.norms), 1)[0]
        assert slope == pytest.approx(abscissa, rel=0.02)


class TestEnvelopes:
    def test_hf_rate_ratio_noncritical(self, reference_medium):
        t_grid = np.linspace(0, 8e5, 400)
        fit = evo.hf_envelope_check(reference_medium, [50.0, 100.0], t_grid)
        rates = dict(fit.per_k)
        assert rates[50.0] / rates[100.0] == pytest.approx(4.0, rel=0.2)
        assert fit.rate_constant > 0
        assert fit.exponent == 2.0

    def test_hf_rate_ratio_critical(self, critical_medium):
        t_grid = np.linspace(0, 5e7, 400)
        fit = evo.hf_envelope_check(critical_medium, [10.0, 20.0], t_grid)
        rates = dict(fit.per_k)
        assert rates[10.0] / rates[20.0] == pytest.approx(16.0, rel=0.2)
        assert fit.exponent == 4.0

    def test_lf_rate_ratio(self, reference_medium):
        t_grid = np.linspace(0, 3e6, 500)
        fit = evo.lf_envelope_check(reference_medium, [0.01, 0.02], t_grid)
        rates = dict(fit.per_k)
        assert rates[0.01] / rates[0.02] == pytest.approx(0.25, rel=0.2)

    def test_envelope_holds_on_samples(self, reference_medium, rng):
        t_grid = np.linspace(0, 2e5, 300)
        fit = evo.hf_envelope_check(reference_medium, [30.0, 60.0], t_grid)
        op = ops.build_perp_operator(reference_medium, 30.0)
        u0 = unit_state(op, rng)
        res = evo.propagate(op, u0, t_grid, keep_states=False)
        bound = fit.prefactor * np.exp(-fit.rate_constant * t_grid / 30.0**2)
        assert np.all(res.norms <= bound * (1 + 1e-9))

    def test_optimal_data_saturates_bound(self, reference_medium):
        k = 100.0
        roots = dsp.solve_dispersion(reference_medium, k)
        w = roots[np.argmax(roots.real)]
        state = ops.optimal_initial_data(reference_medium, k, w)
        op = ops.build_perp_operator(reference_medium, k)
        t_grid = np.linspace(0, 5e5, 100)
        res = evo.propagate(op, state, t_grid, keep_states=False)
        rate = evo.tail_rate(t_grid, res.norms)
        ratio = res.norms / np.exp(-rate * t_grid)
        assert 0.5 < ratio.min() and ratio.max() < 2.0


class TestMidBand:
    def test_positive_uniform_rate(self, reference_medium):
        fit = evo.midband_rate(reference_medium, (0.5, 5.0), samples=12)
        assert fit.rate_constant > 0
        assert fit.residual <= 0.10  # against the sampled spectral abscissa

    def test_nested_band_monotonicity(self, reference_medium):
        wide = evo.midband_rate(reference_medium, (0.5, 5.0), samples=12)
        narrow = evo.midband_rate(reference_medium, (1.0, 3.0), samples=12)
        assert narrow.rate_constant >= wide.rate_constant - 1e-12

    def test_beta_close_to_abscissa(self, reference_medium):
        fit = evo.midband_rate(reference_medium, (0.8, 2.0), samples=8)
        abscissa = min(
            -float(np.max(dsp.solve_dispersion(reference_medium, k).imag))
            for k, _ in fit.per_k
        )
        assert fit.rate_constant == pytest.approx(abscissa, rel=0.10)
