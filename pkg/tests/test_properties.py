import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from faddeeva_fourier import dawson, erf_complex, voigt
from faddeeva_fourier.core import evaluate, evaluate_batch, exp_neg_square, faddeeva
from faddeeva_fourier.params import default_setup

PARAMS, COEFFS = default_setup()

xs = st.floats(-60, 60, allow_nan=False)
ys = st.floats(0, 60, allow_nan=False)
small = st.floats(-6, 6, allow_nan=False)
positive_y = st.floats(1e-8, 1e3, allow_nan=False)


@given(xs, ys)
def test_shifted_argument_stays_off_poles(x, y):
    # |C^2 - s^2| = |C - s| |C + s| >= (Im s)^2 >= sigma^2 once y >= 0
    s = complex(x, y + PARAMS.sigma)
    assert np.min(np.abs(COEFFS.C2 - s * s)) >= PARAMS.sigma**2 * (1 - 1e-12)


@given(xs, ys)
def test_parity_is_conjugation(x, y):
    assert faddeeva(complex(-x, y)) == faddeeva(complex(x, y)).conjugate()


@given(small, st.floats(1e-3, 6, allow_nan=False))
def test_reflection_from_upper_half(x, y):
    z = complex(x, y)
    w = faddeeva(z)
    e2 = 2 * complex(exp_neg_square(z))
    lhs = faddeeva(-z)
    assert abs(lhs - (e2 - w)) <= 1e-13 * max(abs(lhs), abs(e2) + abs(w))


@given(st.floats(-1e4, 1e4, allow_nan=False), positive_y)
def test_voigt_profile_positive(x, y):
    assert voigt(x, y).K > 0


@given(small, st.floats(-2, 2, allow_nan=False))
def test_erf_and_dawson_odd(x, y):
    z = complex(x, y)
    for f in (erf_complex, dawson):
        a, b = f(z), f(-z)
        assert abs(a + b) <= 1e-13 * max(abs(a), 1.0)


@settings(max_examples=30)
@given(st.lists(st.tuples(xs, st.floats(-5, 60, allow_nan=False)), min_size=1, max_size=40))
def test_batch_matches_pointwise(pts):
    z = np.array([complex(x, y) for x, y in pts])
    res = evaluate_batch(z, PARAMS, COEFFS)
    for i, p in enumerate(z):
        if res.errors[i]:
            continue
        one = evaluate(p, PARAMS, COEFFS)
        assert res[i].value == one.value and res[i].region == one.region


@given(xs, ys)
def test_upper_half_values_are_finite(x, y):
    w = faddeeva(complex(x, y))
    assert np.isfinite(w.real) and np.isfinite(w.imag) and w.real >= 0
