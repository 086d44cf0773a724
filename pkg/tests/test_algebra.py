from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geoqm.algebra import cstar_norm, jordan, jordan_geometric, lie, star_geometric, star_operator
from geoqm.errors import ParameterMismatch
from geoqm.geometry import cometric, poisson_at
from geoqm.linalg import PurePoint
from geoqm.maps import quantize_inverse
from geoqm.measures import SeededSampler, sample_pure_batch
from geoqm.observables import AffineObservable, QuantParams, integral, integral_product

from conftest import rng_hermitian, rng_unit

seeds = st.integers(0, 2**32 - 1)


def _pair(seed, n, kappa):
    rng = np.random.default_rng(seed)
    q = QuantParams(n, kappa)
    a, b = rng_hermitian(rng, n), rng_hermitian(rng, n)
    return rng, q, a, b, quantize_inverse(a, q), quantize_inverse(b, q)


class TestStarOperator:
    def test_unit(self):
        _, q, _, _, f, _ = _pair(0, 3, 2.5)
        one = AffineObservable.constant(1.0, q)
        assert star_operator(f, one).allclose(f) and star_operator(one, f).allclose(f)

    def test_commutator_is_poisson(self):
        _, q, a, b, fa, fb = _pair(1, 3, 4.0)
        diff = star_operator(fa, fb) - star_operator(fb, fa)
        assert diff.allclose(1j * lie(fa, fb), atol=1e-12)

    @given(seeds)
    def test_associative(self, seed):
        rng, q, a, b, fa, fb = _pair(seed, 3, 2.0)
        fc = quantize_inverse(rng_hermitian(rng, 3), q)
        lhs = star_operator(star_operator(fa, fb), fc)
        rhs = star_operator(fa, star_operator(fb, fc))
        assert lhs.allclose(rhs, atol=1e-12 * max(1.0, np.abs(lhs.kernel).max()))

    def test_is_operator_product(self):
        _, q, a, b, fa, fb = _pair(2, 4, 1.7)
        assert star_operator(fa, fb).allclose(quantize_inverse(a @ b, q))

    def test_mismatch(self):
        a = np.eye(3)
        with pytest.raises(ParameterMismatch):
            star_operator(quantize_inverse(a, QuantParams(3, 1.0)), quantize_inverse(a, QuantParams(3, 2.0)))


class TestStarGeometric:
    @pytest.mark.parametrize("kappa", [1.0, 2.5, 4.0, 8.0, 0.3])
    def test_matches_operator_path(self, kappa):
        rng, q, a, b, fa, fb = _pair(3, 3, kappa)
        prod = star_operator(fa, fb)
        for _ in range(100):
            p = PurePoint(rng_unit(rng, 3))
            assert abs(star_geometric(fa, fb, p) - prod(p)) < 1e-10

    def test_kappa_one_form(self):
        rng, q, a, b, fa, fb = _pair(4, 3, 1.0)
        for _ in range(20):
            p = PurePoint(rng_unit(rng, 3))
            expected = 0.5j * poisson_at(fa, fb, p) + 0.5 * cometric(fa, fb, p) + fa(p) * fb(p)
            assert abs(star_geometric(fa, fb, p) - expected) < 1e-12

    def test_kappa_n_plus_one_form(self):
        n = 3
        rng, q, a, b, fa, fb = _pair(5, n, n + 1.0)
        # integrals against the measure of total mass n
        i_fg, i_f, i_g = n * integral_product(fa, fb), n * integral(fa), n * integral(fb)
        for _ in range(20):
            p = PurePoint(rng_unit(rng, n))
            f, g = fa(p), fb(p)
            expected = (0.5j * poisson_at(fa, fb, p) + 0.5 * cometric(fa, fb, p)
                        + (f * g - i_fg + f * i_g + g * i_f) / (n + 1))
            assert abs(star_geometric(fa, fb, p) - expected) < 1e-12

    def test_complex_factors(self):
        rng = np.random.default_rng(6)
        q = QuantParams(4, 2.5)
        a = rng_hermitian(rng, 4) + 1j * rng_hermitian(rng, 4)
        b = rng_hermitian(rng, 4) - 2j * rng_hermitian(rng, 4)
        fa, fb = quantize_inverse(a, q), quantize_inverse(b, q)
        prod = star_operator(fa, fb)
        for psi in sample_pure_batch(SeededSampler(0), 4, 20):
            p = PurePoint(psi)
            assert abs(star_geometric(fa, fb, p) - prod(p)) < 1e-10

    def test_integral_terms_from_sampling(self):
        # independent check of the exact integrals used by the geometric path
        _, q, a, b, fa, fb = _pair(7, 3, 2.0)
        psis = sample_pure_batch(SeededSampler(1), 3, 200_000)
        vals = fa.batch(psis) * fb.batch(psis)
        se = vals.std() / np.sqrt(vals.size)
        assert abs(vals.mean() - integral_product(fa, fb).real) < 4 * se


class TestNorm:
    @given(seeds, st.sampled_from([1.0, 2.5, 4.0, 0.5, 9.0]))
    def test_equals_operator_norm(self, seed, kappa):
        _, q, a, _, fa, _ = _pair(seed, 3, kappa)
        assert abs(cstar_norm(fa) - np.abs(np.linalg.eigvalsh(a)).max()) < 1e-12

    def test_kappa_one_is_sup_norm(self):
        _, q, a, _, fa, _ = _pair(8, 3, 1.0)
        psis = sample_pure_batch(SeededSampler(2), 3, 50_000)
        sup_sampled = np.abs(fa.batch(psis)).max()
        assert sup_sampled <= cstar_norm(fa) + 1e-12
        assert sup_sampled >= 0.9 * cstar_norm(fa)

    @pytest.mark.parametrize("kappa", [1.0, 3.0])
    def test_constant(self, kappa):
        q = QuantParams(3, kappa)
        assert cstar_norm(AffineObservable.constant(-2.5, q)) == pytest.approx(2.5)
        assert cstar_norm(AffineObservable.constant(1.0, q)) == pytest.approx(1.0)

    @given(seeds)
    def test_cstar_identity_complex(self, seed):
        rng = np.random.default_rng(seed)
        q = QuantParams(3, 4.0)
        z = rng_hermitian(rng, 3) + 1j * rng_hermitian(rng, 3)
        fz = quantize_inverse(z, q)
        assert abs(cstar_norm(fz) - np.linalg.norm(z, 2)) < 1e-10
        assert abs(cstar_norm(star_operator(fz.conj(), fz)) - cstar_norm(fz) ** 2) < 1e-9


class TestLieJordan:
    def test_jordan_unit(self):
        _, q, _, _, fa, _ = _pair(9, 3, 2.0)
        assert jordan(fa, AffineObservable.constant(1.0, q)).allclose(fa)

    def test_lie_self(self):
        _, _, _, _, fa, _ = _pair(10, 3, 2.0)
        assert np.allclose(lie(fa, fa).frame_operator, 0)

    @given(seeds, st.sampled_from([1.0, 2.5, 4.0]))
    def test_recomposition(self, seed, kappa):
        rng, q, a, b, fa, fb = _pair(seed, 3, kappa)
        p = PurePoint(rng_unit(rng, 3))
        prod = star_operator(fa, fb)(p)
        assert abs(prod - (0.5j * lie(fa, fb)(p) + jordan(fa, fb)(p))) < 1e-12
        assert abs(jordan(fa, fb)(p) - jordan_geometric(fa, fb, p)) < 1e-10

    def test_jordan_real_and_symmetric(self):
        _, q, a, b, fa, fb = _pair(11, 3, 2.0)
        assert jordan(fa, fb).is_real()
        assert jordan(fa, fb).allclose(jordan(fb, fa))
