import numpy as np
import pytest

from helpers import random_trig_tuple
from spectrunc import (
    ConfigError,
    FunctionTuple,
    GaussianKernel,
    GramField,
    L2GaussianTupleKernel,
    NumericalError,
    PolyKernel,
    ProdKernel,
    SampledFunction,
    SepKernel,
    SolverFallbackWarning,
    TorusGrid,
    assemble_gram,
    check_pd,
    evaluate,
    fit,
    predict,
)
from spectrunc import test_error as model_test_error
from spectrunc.regression import predict_batch

GRID = TorusGrid(32)


@pytest.fixture
def rng():
    return np.random.default_rng(17)


def sep_spec(grid, n=8, scale=1.0):
    one = SampledFunction.constant(grid, 1.0)
    return SepKernel(n=n, q=1, weights=(one,), base=L2GaussianTupleKernel(scale=scale))


def random_outputs(grid, rng, count):
    return [
        SampledFunction(grid, rng.normal(size=grid.m) + 0j) for _ in range(count)
    ]


class TestAssembleGram:
    def test_single_constant_input(self):
        spec = PolyKernel(n=5, q=1, alpha=(1.0,))
        x = FunctionTuple((SampledFunction.constant(GRID, 1.0),))
        gram = assemble_gram(spec, [x])
        assert gram.matrices.shape == (GRID.m, 1, 1)
        assert np.allclose(gram.matrices, 1.0, atol=1e-12)
        assert gram.eval_count == 1

    def test_eval_count_is_upper_triangle(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=2, deg=2) for _ in range(6)]
        spec = PolyKernel(n=4, q=1, alpha=(1.0, 1.0))
        gram = assemble_gram(spec, xs)
        assert gram.eval_count == 6 * 7 // 2

    def test_mirror_matches_full_evaluation(self, rng):
        # evaluate both triangles independently and compare
        xs = [random_trig_tuple(GRID, rng, d=2, deg=3) for _ in range(4)]
        g1 = GaussianKernel(gamma=0.7)
        spec = ProdKernel(n=4, q=1, bases1=(g1,), bases2=(g1,), beta=0.2)
        gram = assemble_gram(spec, xs)
        for i in range(4):
            for j in range(4):
                want = evaluate(spec, xs[i], xs[j]).values
                assert np.max(np.abs(gram.matrices[:, i, j] - want)) < 1e-9

    def test_hermitian_invariant(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=1, deg=3) for _ in range(5)]
        spec = PolyKernel(n=6, q=2, alpha=(1.0,))
        gram = assemble_gram(spec, xs)
        assert gram.hermitian_defect() < 1e-8

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            GramField(GRID, np.zeros((3, 2, 2)))


class TestCheckPD:
    def test_poly_positive(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=2, deg=3) for _ in range(8)]
        spec = PolyKernel(n=6, q=1, alpha=(1.0, 1.0))
        report = check_pd(assemble_gram(spec, xs))
        assert report.global_min >= -1e-8
        assert report.min_per_point.shape == (GRID.m,)

    def test_sep_positive(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=2, deg=3, real=True) for _ in range(8)]
        report = check_pd(assemble_gram(sep_spec(GRID), xs))
        assert report.global_min >= -1e-8

    def test_prod_with_policy_beta_positive(self, rng):
        from spectrunc import beta_from_policy

        xs = [random_trig_tuple(GRID, rng, d=2, deg=3, real=True) for _ in range(8)]
        g1 = GaussianKernel(gamma=1.0)
        n = 4
        beta = beta_from_policy("estimate", n, 1, grid_density=48)
        spec = ProdKernel(n=n, q=1, bases1=(g1,), bases2=(g1,), beta=beta,
                          beta_policy="estimate")
        report = check_pd(assemble_gram(spec, xs))
        assert report.global_min >= -1e-8

    def test_prod_beta_zero_is_diagnostic(self, rng):
        # without the offset the product kernel may go indefinite; the check
        # reports rather than fails
        xs = [random_trig_tuple(GRID, rng, d=2, deg=3, real=True) for _ in range(8)]
        g1 = GaussianKernel(gamma=1.0)
        spec = ProdKernel(n=4, q=1, bases1=(g1,), bases2=(g1,), beta=0.0)
        report = check_pd(assemble_gram(spec, xs))
        assert np.isfinite(report.global_min)


class TestFit:
    def test_scalar_solve(self, rng):
        # N = 1: c(z) = y(z) / (g(z) + lam)
        x = random_trig_tuple(GRID, rng, d=1, deg=2)
        y = random_outputs(GRID, rng, 1)[0]
        spec = sep_spec(GRID)
        lam = 0.3
        model = fit(spec, [x], [y], lam)
        g = evaluate(spec, x, x).values
        want = y.values / (g + lam)
        assert np.allclose(model.coefficients[0], want, atol=1e-10)

    def test_large_lambda_decay(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=1, deg=2) for _ in range(4)]
        ys = random_outputs(GRID, rng, 4)
        spec = sep_spec(GRID)
        lam = 1e6
        model = fit(spec, xs, ys, lam)
        ynorm = np.linalg.norm(np.stack([y.values for y in ys]))
        cnorm = np.linalg.norm(model.coefficients)
        assert cnorm <= 1.05 * ynorm / lam

    def test_exact_interpolation(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=2, deg=3, real=True) for _ in range(6)]
        ys = random_outputs(GRID, rng, 6)
        spec = sep_spec(GRID, scale=0.5)
        model = fit(spec, xs, ys, lam=1e-10)
        for x, y in zip(xs, ys):
            got = predict(model, x)
            assert np.max(np.abs(got.values - y.values)) < 1e-4

    def test_lambda_zero_requires_pd(self, rng):
        x = random_trig_tuple(GRID, rng, d=1, deg=2)
        spec = PolyKernel(n=3, q=1, alpha=(1.0,))
        # duplicated inputs give a singular Gram matrix
        xs = [x, x]
        ys = random_outputs(GRID, rng, 2)
        with pytest.raises(ConfigError):
            fit(spec, xs, ys, lam=0.0)

    def test_negative_lambda_rejected(self, rng):
        x = random_trig_tuple(GRID, rng, d=1, deg=2)
        with pytest.raises(ConfigError):
            fit(sep_spec(GRID), [x], random_outputs(GRID, rng, 1), lam=-1.0)

    def test_fallback_warning_on_indefinite(self, rng):
        # an indefinite shifted Gram matrix defeats the Hermitian
        # factorization; the pivoted fallback still solves it
        xs = [random_trig_tuple(GRID, rng, d=1, deg=2) for _ in range(2)]
        ys = random_outputs(GRID, rng, 2)
        mats = np.tile(np.diag([1.0, -1.0]).astype(complex), (GRID.m, 1, 1))
        gram = GramField(GRID, mats)
        with pytest.warns(SolverFallbackWarning):
            model = fit(sep_spec(GRID), xs, ys, lam=0.1, gram=gram)
        A = mats[0] + 0.1 * np.eye(2)
        want = np.linalg.solve(A, np.stack([y.values for y in ys]))
        assert np.allclose(model.coefficients, want, atol=1e-10)

    def test_singular_system_raises(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=1, deg=2) for _ in range(2)]
        ys = random_outputs(GRID, rng, 2)
        mats = np.tile((-0.1 * np.eye(2)).astype(complex), (GRID.m, 1, 1))
        gram = GramField(GRID, mats)
        with pytest.raises(NumericalError):
            fit(sep_spec(GRID), xs, ys, lam=0.1, gram=gram)

    def test_residual_invariant_enforced(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=2, deg=3) for _ in range(5)]
        ys = random_outputs(GRID, rng, 5)
        spec = PolyKernel(n=5, q=1, alpha=(1.0, 1.0))
        model = fit(spec, xs, ys, lam=0.05)
        gram = assemble_gram(spec, xs)
        for p in range(GRID.m):
            A = gram.matrices[p] + 0.05 * np.eye(5)
            b = np.array([y.values[p] for y in ys])
            r = np.linalg.norm(A @ model.coefficients[:, p] - b)
            assert r <= 1e-8 * (1 + np.linalg.norm(b))

    def test_permutation_equivariance(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=2, deg=3) for _ in range(5)]
        ys = random_outputs(GRID, rng, 5)
        spec = PolyKernel(n=5, q=1, alpha=(1.0, 1.0))
        model = fit(spec, xs, ys, lam=0.1)
        perm = [3, 0, 4, 1, 2]
        model_p = fit(spec, [xs[i] for i in perm], [ys[i] for i in perm], lam=0.1)
        assert np.max(np.abs(model_p.coefficients - model.coefficients[perm])) < 1e-10
        probe = random_trig_tuple(GRID, rng, d=2, deg=3)
        a = predict(model, probe).values
        b = predict(model_p, probe).values
        assert np.max(np.abs(a - b)) < 1e-10

    def test_training_error_monotone_in_lambda(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=2, deg=3, real=True) for _ in range(6)]
        ys = random_outputs(GRID, rng, 6)
        spec = sep_spec(GRID, scale=0.5)
        errs = [model_test_error(fit(spec, xs, ys, lam), xs, ys) for lam in (1e-6, 1e-2, 1.0)]
        assert errs[0] <= errs[1] + 1e-12 <= errs[2] + 2e-12

    def test_mismatched_lengths(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=1, deg=2)]
        with pytest.raises(ConfigError):
            fit(sep_spec(GRID), xs, [], lam=0.1)


class TestPredict:
    def test_zero_coefficients(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=1, deg=2) for _ in range(3)]
        spec = sep_spec(GRID)
        model = fit(spec, xs, [SampledFunction.constant(GRID, 0.0)] * 3, lam=0.5)
        probe = random_trig_tuple(GRID, rng, d=1, deg=2)
        assert np.allclose(predict(model, probe).values, 0.0, atol=1e-12)

    def test_batch_matches_single(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=1, deg=2) for _ in range(4)]
        ys = random_outputs(GRID, rng, 4)
        model = fit(sep_spec(GRID), xs, ys, lam=0.1)
        probes = [random_trig_tuple(GRID, rng, d=1, deg=2) for _ in range(3)]
        batch = predict_batch(model, probes)
        for p, got in zip(probes, batch):
            assert np.allclose(got.values, predict(model, p).values, atol=1e-12)

    def test_grid_mismatch(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=1, deg=2)]
        model = fit(sep_spec(GRID), xs, random_outputs(GRID, rng, 1), lam=0.1)
        other = random_trig_tuple(TorusGrid(16), rng, d=1, deg=2)
        with pytest.raises(ConfigError):
            predict(model, other)


class TestTestError:
    def test_perfect_predictions(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=2, deg=3, real=True) for _ in range(5)]
        ys = random_outputs(GRID, rng, 5)
        model = fit(sep_spec(GRID, scale=0.5), xs, ys, lam=1e-10)
        assert model_test_error(model, xs, ys) < 1e-4

    def test_zero_model_unit_outputs(self, rng):
        xs = [random_trig_tuple(GRID, rng, d=1, deg=2) for _ in range(3)]
        model = fit(sep_spec(GRID), xs, [SampledFunction.constant(GRID, 0.0)] * 3, lam=0.5)
        ones = [SampledFunction.constant(GRID, 1.0)] * 3
        assert model_test_error(model, xs, ones) == pytest.approx(1.0, abs=1e-12)
