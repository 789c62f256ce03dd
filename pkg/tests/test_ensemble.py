"""Ensemble moment checks: exact controls, moment consistency against an
independent integration route, selectivity/information functionals and the
concentration-bound machinery."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from telefid.ensemble import (MeritTriple, RobustObjective, binary_entropy,
                              cantelli_guarantee, conditional_moments,
                              effective_prior_density,
                              heralding_mutual_information, robust_objective,
                              selectivity_divergence, selectivity_indices,
                              throughput_bound)
from telefid.model import MbNla, SurrogateParams
from telefid.oracle import OracleConfig, sample_effective_prior
from telefid.profile import Protocol, profile_table, success_probability
from telefid.quadrature import gauss_legendre, radial_prior_average


class TestConditionalMoments:
    def test_accept_all_exact(self, proto_aa, prior, qcfg):
        merit = conditional_moments(proto_aa, prior, qcfg)
        assert merit == MeritTriple(0.78125, 0.0, 1.0)

    def test_futility_flat(self, prior, qcfg):
        proto = Protocol(SurrogateParams(0.5, 0.1, 0.0), MbNla(1.2, 3.0))
        merit = conditional_moments(proto, prior, qcfg)
        assert merit.F == pytest.approx(1 / 1.1, abs=1e-10)
        assert merit.D == pytest.approx(0.0, abs=1e-10)
        assert 0.0 < merit.P_succ < 1.0

    def test_pinned_oracle_run(self, proto_mild, prior, qcfg):
        """Frozen nested-MC pin: seed 20260811, 2000 outer, 1e4 inner."""
        mc = {"F": (0.7798347236628556, 0.0006641908619378723),
              "D": (0.02746231176826654, 0.0003593366150034504),
              "P": (0.19035297673356613, 0.00242689524075976)}
        merit = conditional_moments(proto_mild, prior, qcfg)
        assert abs(merit.F - mc["F"][0]) < 3 * mc["F"][1]
        assert abs(merit.D - mc["D"][0]) < 3 * mc["D"][1]
        assert abs(merit.P_succ - mc["P"][0]) < 3 * mc["P"][1]

    def test_quadrature_regression_anchor(self, proto_mild, prior, qcfg):
        merit = conditional_moments(proto_mild, prior, qcfg)
        assert merit.F == pytest.approx(0.77965041957354, rel=1e-9)
        assert merit.D == pytest.approx(0.02759957295540, rel=1e-6)
        assert merit.P_succ == pytest.approx(0.19041979207975, rel=1e-9)

    def test_moment_consistency_independent_route(self, proto_mild, prior,
                                                  qcfg):
        """D^2 + F^2 equals the second moment computed through the generic
        radial prior average on its own grid."""
        merit = conditional_moments(proto_mild, prior, qcfg)
        cache = {}

        def pf(powers):
            def g(rr):
                out = np.empty_like(rr)
                for i, r in enumerate(rr):
                    r = float(r)
                    if r not in cache:
                        prof = profile_table(np.array([max(r, 1e-14)]),
                                             proto_mild, qcfg)
                        cache[r] = (prof.p_succ[0], prof.f_succ[0])
                    p, f = cache[r]
                    out[i] = p * f ** powers
                return out
            return g

        hint = 3.0 + 6.0 * math.sqrt(0.5) + prior.sigma * math.sqrt(
            2.0 * math.log(1e12))
        p_bar = radial_prior_average(pf(0), prior, hint, qcfg)
        m2 = radial_prior_average(pf(2), prior, hint, qcfg) / p_bar
        assert merit.D ** 2 + merit.F ** 2 == pytest.approx(m2, abs=1e-10)

    def test_radial_reduction_equals_2d_polar_grid(self, proto_mild, prior,
                                                   qcfg):
        """The 1-D radial route agrees with an explicit 2-D polar-grid
        evaluation of the ensemble integrals."""
        merit = conditional_moments(proto_mild, prior, qcfg)
        xr, wr = gauss_legendre(64)
        r_hi = 14.0
        r = 0.5 * r_hi * (xr + 1.0)
        w_r = 0.5 * r_hi * wr
        xp, wp = gauss_legendre(32)
        w_phi = float(np.sum(math.pi * wp))  # integrates dphi over [0, 2pi]
        p = np.empty_like(r)
        f = np.empty_like(r)
        for i, ri in enumerate(r):
            prof = profile_table(np.array([float(ri)]), proto_mild, qcfg)
            p[i], f[i] = prof.p_succ[0], prof.f_succ[0]
        dens = np.exp(-r * r / prior.sigma ** 2) / (math.pi * prior.sigma ** 2)
        base = w_phi * w_r * r * dens
        p_bar = float(np.sum(base * p))
        f_bar = float(np.sum(base * p * f)) / p_bar
        m2 = float(np.sum(base * p * f * f)) / p_bar
        assert p_bar == pytest.approx(merit.P_succ, abs=1e-7)
        assert f_bar == pytest.approx(merit.F, abs=1e-7)
        assert math.sqrt(m2 - f_bar ** 2) == pytest.approx(merit.D, abs=1e-7)


class TestEffectivePrior:
    def test_accept_all_equals_prior(self, proto_aa, prior, qcfg):
        for r in (0.0, 1.3, 4.0):
            assert effective_prior_density(r, proto_aa, prior, qcfg) == \
                pytest.approx(float(prior.density(r)), rel=1e-12)

    def test_normalization(self, proto_mild, prior, qcfg):
        merit = conditional_moments(proto_mild, prior, qcfg)

        def g(rr):
            out = np.empty_like(rr)
            for i, r in enumerate(rr):
                out[i] = success_probability(float(r), proto_mild,
                                             qcfg).value
            return out / merit.P_succ

        hint = 3.0 + 6.0 * math.sqrt(0.5) + prior.sigma * math.sqrt(
            2.0 * math.log(1e12))
        assert radial_prior_average(g, prior, hint, qcfg) == \
            pytest.approx(1.0, abs=1e-8)

    def test_mass_pushed_inward_at_large_radius(self, params, prior, qcfg):
        proto = Protocol(params, MbNla(1.6, 1.8))
        assert effective_prior_density(4.0, proto, prior, qcfg) < \
            float(prior.density(4.0))


class TestSelectivityIndices:
    def test_accept_all_all_zero(self, proto_aa, prior, qcfg):
        rep = selectivity_indices(proto_aa, prior, qcfg)
        assert (rep.S, rep.S1, rep.S2, rep.I_sel, rep.I_alpha_S) == \
            (0.0, 0.0, 0.0, 0.0, 0.0)

    def test_futility_all_zero(self, prior, qcfg):
        proto = Protocol(SurrogateParams(0.5, 0.1, 0.0), MbNla(1.4, 2.2))
        rep = selectivity_indices(proto, prior, qcfg)
        assert rep.S < 1e-8 and rep.S1 < 1e-8 and rep.S2 < 1e-8

    def test_filtered_strictly_positive(self, params, prior, qcfg):
        rep = selectivity_indices(Protocol(params, MbNla(1.4, 2.2)), prior,
                                  qcfg)
        assert rep.S > 1e-3 and rep.S1 > 1e-3 and rep.S2 > 1e-5

    def test_s_equals_deviation(self, proto_tight, prior, qcfg):
        rep = selectivity_indices(proto_tight, prior, qcfg)
        merit = conditional_moments(proto_tight, prior, qcfg)
        assert abs(rep.S - merit.D) < 1e-10

    def test_slope_vanishes_at_origin(self, proto_mild, qcfg):
        """Phase symmetry forces a flat radial derivative at r = 0."""
        h = 1e-3
        f0 = profile_table(np.array([1e-14]), proto_mild, qcfg).f_succ[0]
        fh = profile_table(np.array([h]), proto_mild, qcfg).f_succ[0]
        assert abs(fh - f0) / h < 0.05


class TestInformationFunctionals:
    def test_accept_all_zero(self, proto_aa, prior, qcfg):
        assert heralding_mutual_information(proto_aa, prior, qcfg) == 0.0
        assert selectivity_divergence(proto_aa, prior, qcfg) == 0.0

    def test_nonnegative_on_grid(self, params, prior, light_cfg):
        for g in (1.2, 1.5):
            for m_c in (1.8, 2.6):
                proto = Protocol(params, MbNla(g, m_c))
                assert heralding_mutual_information(proto, prior,
                                                    light_cfg) >= 0.0
                assert selectivity_divergence(proto, prior, light_cfg) >= 0.0

    def test_tight_filter_distorts_more(self, params, prior, qcfg):
        loose = selectivity_divergence(Protocol(params, MbNla(1.2, 3.0)),
                                       prior, qcfg)
        tight = selectivity_divergence(Protocol(params, MbNla(1.6, 1.8)),
                                       prior, qcfg)
        assert 0.0 < loose < tight

    def test_mutual_information_positive_when_filtered(self, proto_mild,
                                                       prior, qcfg):
        assert heralding_mutual_information(proto_mild, prior, qcfg) > 1e-4


class TestBinaryEntropy:
    def test_values(self):
        assert binary_entropy(0.5) == pytest.approx(math.log(2.0), rel=1e-14)
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.1) == pytest.approx(0.325082973391, rel=1e-11)

    def test_domain_enforced(self):
        with pytest.raises(ValueError):
            binary_entropy(-0.01)
        with pytest.raises(ValueError):
            binary_entropy(1.01)

    @given(st.floats(0, 1))
    @settings(max_examples=200)
    def test_symmetry_and_bounds(self, x):
        h = binary_entropy(x)
        assert 0.0 <= h <= math.log(2.0) + 1e-15
        assert h == pytest.approx(binary_entropy(1.0 - x), abs=1e-12)


class TestRobustObjective:
    def test_values(self):
        assert robust_objective(MeritTriple(0.78125, 1e-300, 1.0), 3.0) == \
            pytest.approx(0.78125)
        assert robust_objective(MeritTriple(0.8, 0.05, 0.5), 3.0) == \
            pytest.approx(0.65)

    def test_cantelli_levels(self):
        assert cantelli_guarantee(3.0) == pytest.approx(0.9, rel=1e-14)
        assert cantelli_guarantee(1.0) == pytest.approx(0.5, rel=1e-14)
        eta = 0.99
        lam = math.sqrt(eta / (1.0 - eta))
        assert cantelli_guarantee(lam) == pytest.approx(eta, rel=1e-12)

    def test_eta_identity(self):
        ro = RobustObjective(3.0, 0.1)
        assert ro.eta == 9.0 / 10.0

    def test_throughput(self):
        assert throughput_bound(MeritTriple(0.9, 1e-300, 0.7), 0.1) == \
            pytest.approx(0.7)
        assert throughput_bound(MeritTriple(0.9, 0.1, 0.7), 0.1) == 0.0
        assert throughput_bound(MeritTriple(0.9, 0.02, 0.3), 0.1) == \
            pytest.approx(0.288)

    def test_validation(self):
        with pytest.raises(ValueError):
            cantelli_guarantee(0.0)
        with pytest.raises(ValueError):
            robust_objective(MeritTriple(0.8, 0.05, 0.5), -1.0)
        with pytest.raises(ValueError):
            throughput_bound(MeritTriple(0.8, 0.05, 0.5), 0.0)


@pytest.fixture(scope="module")
def sampled(params, prior, qcfg):
    proto = Protocol(params, MbNla(1.4, 2.2))
    merit = conditional_moments(proto, prior, qcfg)
    alphas = sample_effective_prior(
        proto, prior, OracleConfig(seed=4242, n_outer=100, n_inner=1000),
        4000)
    grid = np.linspace(0.0, float(np.max(np.abs(alphas))) + 0.1, 1501)
    prof = profile_table(grid[1:], proto, qcfg)
    fvals = np.interp(np.abs(alphas), prof.radii, prof.f_succ)
    return merit, fvals


class TestConcentrationEmpirical:
    """Sampled one-sided bounds at a reduced size; the acceptance suite
    repeats this at the contract size."""

    @pytest.mark.parametrize("lam", [1.0, 2.0, 3.0])
    def test_cantelli(self, sampled, lam):
        merit, fvals = sampled
        frac = float(np.mean(fvals >= merit.F - lam * merit.D))
        bound = cantelli_guarantee(lam)
        se = math.sqrt(bound * (1 - bound) / len(fvals))
        assert frac >= bound - 3.0 * se

    def test_chebyshev(self, sampled):
        merit, fvals = sampled
        delta = 2.0 * merit.D
        frac = float(np.mean(fvals >= merit.F - delta))
        bound = 1.0 - merit.D ** 2 / delta ** 2
        se = math.sqrt(bound * (1 - bound) / len(fvals))
        assert frac >= bound - 3.0 * se
