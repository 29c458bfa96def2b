import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from flatpoly.generators import random_littlewood, random_palindromic
from flatpoly.sequences import CosinePolynomial, SignSequence, dirichlet, negate_S, palindromic_decomposition
from flatpoly.spectral import (
    aperiodic_correlation,
    default_grid_size,
    evaluate_on_grid,
    flatness_report,
    flatness_residual,
    l4_norm_exact,
    littlewood_criterion_ratio,
    lp_norm,
    mahler_measure,
    merit_factor,
    mz_divergence_witness,
    sign_autocorrelation,
    sup_norm_estimate,
)

ROOT2 = np.array([1.0, 1.0]) / np.sqrt(2)
signs = st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=120).map(SignSequence)


def S(text):
    return SignSequence([1 if c == "+" else -1 for c in text])


def circle_mean(f, breaks=(1, 2, 3)):
    """Independent quadrature oracle: (1/2pi) * integral of f over [0, 2pi].

    ``breaks`` are interior split points in units of pi/2, placed at kinks.
    """
    mpmath.mp.dps = 30
    pts = [0] + [b * mpmath.pi / 2 for b in breaks] + [2 * mpmath.pi]
    return float(mpmath.quad(f, pts) / (2 * mpmath.pi))


def brute_correlation(e):
    q = len(e)
    return [sum(e[j] * e[j + k] for j in range(q - k)) for k in range(q)]


class TestOracleValues:
    """Frozen closed forms, each confirmed against mpmath quadrature."""

    def test_closed_forms_match_quadrature(self):
        half = lambda t: abs(2 * mpmath.cos(t / 2)) / mpmath.sqrt(2)  # |1 + e^{it}| / sqrt2
        assert circle_mean(lambda t: half(t) ** 4) == pytest.approx(1.5, abs=1e-15)
        assert circle_mean(half) == pytest.approx(2 * math.sqrt(2) / math.pi, abs=1e-15)
        assert circle_mean(lambda t: abs(half(t) - 1)) == pytest.approx((4 - 2 * math.sqrt(2)) / math.pi, abs=1e-12)
        assert math.exp(circle_mean(lambda t: mpmath.log(half(t)))) == pytest.approx(2**-0.5, abs=1e-12)


class TestGrid:
    def test_dirichlet_at_one(self):
        g = evaluate_on_grid(dirichlet(4).coefficients(), 8)
        assert g.values[0] == pytest.approx(2.0)

    def test_constant(self):
        g = evaluate_on_grid([1.0], 8)
        np.testing.assert_allclose(g.values, np.ones(8), atol=1e-15)

    def test_root_at_minus_one(self):
        g = evaluate_on_grid(ROOT2, 16)
        assert abs(g.values[8]) < 1e-15

    def test_matches_direct_evaluation(self):
        c = np.random.default_rng(0).normal(size=13)
        g = evaluate_on_grid(c, 32, shift=0.5)
        z = np.exp(2j * np.pi * (np.arange(32) + 0.5) / 32)
        np.testing.assert_allclose(g.values, np.polyval(c[::-1], z), atol=1e-12)

    def test_rejects_small_or_odd_sizes(self):
        with pytest.raises(ValueError):
            evaluate_on_grid(np.ones(9), 8)
        with pytest.raises(ValueError):
            evaluate_on_grid(np.ones(3), 12)

    def test_default_size(self):
        assert default_grid_size(3) == 4096
        assert default_grid_size(300) == 8192
        assert default_grid_size(4096) == 65536


class TestNorms:
    @settings(max_examples=40, deadline=None)
    @given(signs)
    def test_parseval(self, s):
        g = evaluate_on_grid(s.coefficients(), default_grid_size(s.q))
        assert abs(lp_norm(g, 2) - 1) < 1e-12

    def test_root2_l4(self):
        g = evaluate_on_grid(ROOT2, 4096)
        assert lp_norm(g, 4) == pytest.approx(1.5**0.25, abs=1e-12)

    def test_d2_l1(self):
        g = evaluate_on_grid(dirichlet(2).coefficients(), 4096)
        assert lp_norm(g, 1) == pytest.approx(2 * math.sqrt(2) / math.pi, abs=1e-6)

    def test_rejects_nonpositive_alpha(self):
        g = evaluate_on_grid(ROOT2, 8)
        with pytest.raises(ValueError):
            lp_norm(g, 0)
        with pytest.raises(ValueError):
            flatness_residual(g, -1)

    @settings(max_examples=40, deadline=None)
    @given(signs)
    def test_monotone_in_alpha(self, s):
        g = evaluate_on_grid(s.coefficients(), default_grid_size(s.q))
        norms = [lp_norm(g, a) for a in (0.5, 1, 2, 4)]
        assert all(a <= b + 1e-9 for a, b in zip(norms, norms[1:]))


class TestResiduals:
    def test_monomial(self):
        g = evaluate_on_grid([0, 0, 1.0], 64)
        for a in (0.5, 1, 2, 4):
            assert flatness_residual(g, a) < 1e-15

    def test_root2(self):
        g = evaluate_on_grid(ROOT2, 4096)
        assert flatness_residual(g, 1) == pytest.approx((4 - 2 * math.sqrt(2)) / math.pi, abs=1e-6)

    def test_dirichlet_large_q(self):
        g = evaluate_on_grid(dirichlet(4096).coefficients(), default_grid_size(4096))
        assert 0.9 <= flatness_residual(g, 1) <= 1.0


class TestExactL4:
    @pytest.mark.parametrize("text, l4, mf", [("++", 1.5, 2.0), ("+++-", 1.25, 4.0), ("++-", 11 / 9, 4.5)])
    def test_examples(self, text, l4, mf):
        p = sign_autocorrelation(S(text))
        assert l4_norm_exact(p) == pytest.approx(l4, rel=1e-15)
        assert merit_factor(p) == pytest.approx(mf, rel=1e-14)

    def test_single_entry_is_infinite(self):
        assert merit_factor(sign_autocorrelation(S("+"))) == math.inf

    @given(signs)
    def test_correlation_matches_brute_force(self, s):
        assert aperiodic_correlation(s.entries).tolist() == brute_correlation(list(s))

    def test_fft_path_matches_brute_force(self):
        s = random_littlewood(2500, 0.3, seed=11)
        c = aperiodic_correlation(s.entries)
        e = s.entries.astype(np.int64)
        for k in (0, 1, 7, 1000, 2499):
            assert c[k] == int(np.dot(e[: 2500 - k], e[k:]))

    def test_profile_invariants(self):
        s = random_littlewood(50, 0.4, seed=3)
        p = sign_autocorrelation(s)
        assert p[0] == 50
        assert all(abs(p.numerator(k)) <= 50 - k for k in range(50))
        assert p[60] == 0 and p[-3] == p[3]

    @pytest.mark.parametrize("q", [17, 256, 1024, 4096])
    def test_exact_vs_quadrature(self, q):
        s = random_littlewood(q, 0.37, seed=q)
        g = evaluate_on_grid(s.coefficients(), default_grid_size(q))
        exact = l4_norm_exact(sign_autocorrelation(s))
        assert abs(exact - lp_norm(g, 4) ** 4) / exact < 1e-10


class TestMahler:
    def test_monomial(self):
        g = evaluate_on_grid([0, 0, 0, 1.0], 4096)
        est = mahler_measure(g)
        assert est.value == pytest.approx(1.0, abs=1e-14) and est.converged

    def test_root2_jensen(self):
        est = mahler_measure(evaluate_on_grid(ROOT2, 4096))
        assert est.value == pytest.approx(2**-0.5, abs=1e-4)
        # a zero on the circle converges like log(2)/N, too slowly for the flag
        assert not est.converged

    def test_zero_polynomial(self):
        with pytest.raises(ValueError):
            mahler_measure(evaluate_on_grid([0.0, 0.0], 8))

    @settings(max_examples=40, deadline=None)
    @given(signs)
    def test_below_l2(self, s):
        est = mahler_measure(evaluate_on_grid(s.coefficients(), default_grid_size(s.q)))
        assert est.value <= 1 + 1e-9

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.sampled_from([-1, 1]), min_size=2, max_size=24).map(SignSequence))
    def test_matches_root_oracle_when_converged(self, s):
        c = s.coefficients()
        est = mahler_measure(evaluate_on_grid(c, 4096))
        assume(est.converged)
        roots = np.roots(c[::-1])
        oracle = abs(c[-1]) * np.prod(np.maximum(1.0, np.abs(roots)))
        assert est.value == pytest.approx(oracle, rel=1e-6)


class TestWitness:
    @pytest.mark.parametrize("q", [4, 100, 1024])
    def test_balanced(self, q):
        s = random_littlewood(q, 0.5, seed=1)
        assert mz_divergence_witness(s, 4) == pytest.approx(q**-0.5, rel=1e-12)

    def test_vanishes(self):
        assert mz_divergence_witness(S("+-++"), 4) == 0.0

    def test_all_plus(self):
        assert mz_divergence_witness(SignSequence([1] * 100), 4) == pytest.approx(9.9, rel=1e-12)

    def test_rejects_small_alpha(self):
        with pytest.raises(ValueError):
            mz_divergence_witness(S("++"), 2)

    @pytest.mark.parametrize("p", [0.0, 0.1, 0.2, 0.3])
    def test_diverges(self, p):
        qs = [100, 300, 1000, 3000, 10000]
        w = [mz_divergence_witness(random_littlewood(q, p, seed=5), 4) for q in qs]
        assert all(b > a for a, b in zip(w, w[1:]))
        assert w[-1] > 10


class TestCriterionRatio:
    def test_single_top_harmonic(self):
        f = CosinePolynomial(0.0, [0, 0, 0, 3.0], degree=4)
        assert littlewood_criterion_ratio(f) == 1.0

    def test_palindrome_h2(self):
        # constant 2 counts as a_0: (1*4 + 4*4) / (4 * (4 + 4 + 4))
        L, _ = palindromic_decomposition(S("+-+-+"))
        assert littlewood_criterion_ratio(L) == pytest.approx(20 / 48, rel=1e-15)

    def test_constant_magnitude_h100(self):
        f = CosinePolynomial(0.0, np.full(100, 2.0), degree=100)
        assert littlewood_criterion_ratio(f) == pytest.approx(0.33835, rel=1e-12)

    def test_constant_lowers_ratio(self):
        bare = CosinePolynomial(0.0, [1.0, 1.0], degree=2)
        shifted = CosinePolynomial(5.0, [1.0, 1.0], degree=2)
        assert littlewood_criterion_ratio(shifted) < littlewood_criterion_ratio(bare)

    @pytest.mark.parametrize("h", [2, 3, 10, 50, 500])
    def test_palindrome_closed_form(self, h):
        L, _ = palindromic_decomposition(random_palindromic(2 * h, seed=h))
        assert littlewood_criterion_ratio(L) == pytest.approx((2 * h + 1) / (6 * h), rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 600), st.integers(0, 2**64 - 1))
    def test_palindrome_bound(self, h, seed):
        L, _ = palindromic_decomposition(random_palindromic(2 * h, seed))
        assert abs(littlewood_criterion_ratio(L) - 1 / 3) <= 1 / (2 * h)

    def test_rejects_zero_harmonics(self):
        with pytest.raises(ValueError):
            littlewood_criterion_ratio(CosinePolynomial(1.0, [0.0, 0.0], degree=2))


class TestSupNorm:
    def test_monomial(self):
        assert sup_norm_estimate(evaluate_on_grid([0, 1.0], 64)) == pytest.approx(1.0)

    def test_dirichlet(self):
        q = 10
        g = evaluate_on_grid(dirichlet(q).coefficients(), 16 * 16)
        assert sup_norm_estimate(g) == pytest.approx(math.sqrt(q))

    def test_root2(self):
        assert sup_norm_estimate(evaluate_on_grid(ROOT2, 64)) == pytest.approx(math.sqrt(2), abs=1e-6)


class TestReport:
    def test_keys_and_values(self):
        r = flatness_report(S("+-+")).to_dict()
        assert r["q"] == 3 and r["n_minus"] == 1 and r["frequency"] == pytest.approx(1 / 3)
        for key in ("norm_0.5", "norm_1", "norm_2", "norm_4", "residual_0.5", "residual_4",
                    "mahler", "merit_factor", "mz_witness_4", "sup_norm", "grid_N"):  # fmt: skip
            assert key in r
        assert "norm_0" not in r and "mz_witness_2" not in r
        json.dumps(r)

    @settings(max_examples=25, deadline=None)
    @given(signs)
    def test_invariants(self, s):
        r = flatness_report(s)
        assert abs(r.norms[2.0] - 1) < 1e-10
        assert r.mahler <= r.norms[2.0] + 1e-9
        vals = [r.norms[a] for a in sorted(r.norms)]
        assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:]))
        assert r.mahler <= vals[0] + 1e-9

    @settings(max_examples=25, deadline=None)
    @given(signs)
    def test_negation_invariance(self, s):
        a = flatness_report(s).to_dict()
        b = flatness_report(negate_S(s)).to_dict()
        for key in a:
            if key in ("n_minus", "frequency"):
                continue
            if isinstance(a[key], float):
                assert a[key] == pytest.approx(b[key], rel=1e-12, abs=1e-12), key
            else:
                assert a[key] == b[key], key

    def test_palindromic_ratio_filled(self):
        r = flatness_report(random_palindromic(100, seed=9))
        assert r.criterion_ratio == pytest.approx(101 / 300)
        assert flatness_report(S("+-")).criterion_ratio is None
