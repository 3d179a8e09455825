import mpmath as mp
import pytest

from faddeeva_fourier import oracle as orc
from faddeeva_fourier.oracle import (
    OracleCache,
    OracleCacheMiss,
    OracleError,
    OracleValue,
    oracle_cf,
    oracle_daw,
    oracle_erf,
    oracle_fresnel,
    oracle_quadrature,
    oracle_series,
    oracle_w,
    rel_diff,
)


def test_series_at_zero_is_exact():
    v = oracle_series(0)
    assert v.re == 1 and v.im == 0


def test_series_unit_imaginary():
    v = oracle_series(1j)
    with mp.workdps(40):
        assert rel_diff(v.re, mp.e * mp.erfc(1)) <= 1e-25
    assert abs(v.im) <= 1e-30
    assert rel_diff(v.re, oracle_quadrature(1j).re) <= 1e-25


@pytest.mark.parametrize("z", [3 + 2j, 2 + 1j, 0.1 + 9.5j, 9.9 + 0.01j])
def test_series_and_quadrature_agree(z):
    a, b = oracle_series(z), oracle_quadrature(z)
    assert rel_diff(a.re, b.re) <= 1e-25 and rel_diff(a.im, b.im) <= 1e-25


def test_series_does_not_touch_quadrature(monkeypatch):
    def forbidden(*args, **kwargs):
        raise AssertionError("series must not integrate")

    monkeypatch.setattr(orc.mp, "quad", forbidden)
    assert oracle_series(1 + 1j).est_error <= 1e-25


def test_series_radius():
    with pytest.raises(ValueError):
        oracle_series(13)


def test_quadrature_at_zero():
    v = oracle_quadrature(0)
    assert rel_diff(v.re, 1) <= 1e-25 and v.im == 0


def test_quadrature_rejects_lower_half():
    with pytest.raises(ValueError):
        oracle_quadrature(1 - 1j)


def test_quadrature_far_out_agrees_with_deep_fraction():
    z = 20000 + 0.01j
    a, b = oracle_quadrature(z), oracle_cf(z)
    assert rel_diff(a.re, b.re) <= 1e-20 and rel_diff(a.im, b.im) <= 1e-20


def test_w_at_zero():
    v = oracle_w(0)
    assert v.re == 1 and v.est_error <= 1e-30


def test_w_lower_half_via_reflection():
    z = 1 - 2j
    v = oracle_w(z)
    with mp.workdps(50):
        rhs = 2 * mp.exp(-mp.mpc(z) ** 2) - oracle_w(-z).value
        assert abs(v.value - rhs) / abs(rhs) <= 1e-28


@pytest.mark.parametrize("z", [5.5 + 1e-5j, 14 + 1e-7j, 100.0, -3 + 0.5j, 1e6j, 40000 + 1e-4j])
def test_w_validated(z):
    v = oracle_w(z)
    assert v.est_error <= 1e-25
    with mp.workdps(50):
        ref = mp.exp(-mp.mpc(z) ** 2) * mp.erfc(-1j * mp.mpc(z))
        assert rel_diff(v.re, ref.real) <= 1e-25 and rel_diff(v.im, ref.imag) <= 1e-25


def test_w_rejects_nonfinite():
    with pytest.raises(ValueError):
        oracle_w(complex("nan"))


def test_relatives_vanish_at_zero():
    assert oracle_daw(0).re == 0
    assert oracle_erf(0).value == 0
    assert oracle_fresnel(0).value == 0


def test_dawson_two_ways():
    direct = oracle_daw(1)
    with mp.workdps(50):
        via_w = oracle_w(1).im * mp.sqrt(mp.pi) / 2
    assert rel_diff(direct.re, via_w) <= 1e-25


def test_erf_two_ways():
    series = oracle_erf(2)
    with mp.workdps(50):
        via_w = 1 - mp.exp(-4) * oracle_w(2j).re
    assert rel_diff(series.re, via_w) <= 1e-25


def test_fresnel_against_definition():
    with mp.workdps(50):
        ref = mp.fresnelc(1) + 1j * mp.fresnels(1)
        assert abs(oracle_fresnel(1).value - ref) <= 1e-30


@pytest.mark.parametrize("x", [0.5, 1.0, 3.0])
def test_limit_towards_real_axis(x):
    v = oracle_w(complex(x, 1e-12))
    with mp.workdps(50):
        limit = mp.exp(-mp.mpf(x) ** 2) + 2j / mp.sqrt(mp.pi) * oracle_daw(x).re
        assert abs(v.value - limit) <= 1e-11


def test_disagreement_is_fatal():
    a = OracleValue(mp.mpf(1), mp.mpf(0), 1e-30)
    with mp.workdps(40):
        b = OracleValue(mp.mpf(1) + mp.mpf(10) ** -20, mp.mpf(0), 1e-30)
    with pytest.raises(OracleError, match="disagree"):
        orc._check_agreement(a, b, 30, "test")


def test_cache_round_trip(tmp_path):
    pts = [(0.0, 0.0), (1.5, 0.25), (20.0, 1e-3)]
    path = tmp_path / "c.txt"
    orc.generate_cache(path, pts, {"signature": "unit"})
    text = path.read_text()
    assert text.startswith("#") and "signature: unit" in text
    cache = OracleCache.load(path)
    assert len(cache) == 3 and cache.meta["signature"] == "unit"
    for x, y in pts:
        assert rel_diff(cache.lookup(x, y).value, oracle_w(complex(x, y)).value) <= 1e-29
    with pytest.raises(OracleCacheMiss):
        cache.lookup(1.5, 0.26)
    assert isinstance(OracleCacheMiss("x"), KeyError)
