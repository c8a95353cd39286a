import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ptoeplitz import (
    CUE,
    Bergman,
    CertificationError,
    CustomMeasure,
    GammaWeight,
    Ginibre,
    JacobiEdge,
    LogStretch,
    Regularity,
    ValidationError,
    classify,
    iota,
    log_moment,
    log_moment_dd,
    measure_from_name,
    radial_power_sample,
    rho,
)
from ptoeplitz.radial_measures import log_rho_band, rho_matrix

BUILTINS = [CUE(), Ginibre(), Bergman(), JacobiEdge(3.0), GammaWeight(0.5, 1.5), LogStretch(1.0, 4.0)]


def test_log_moment_examples():
    assert log_moment(CUE(), 7.3) == 0.0
    assert log_moment(Bergman(), 0.0) == pytest.approx(math.log(0.5), abs=1e-15)
    assert log_moment(Ginibre(), 1.0) == pytest.approx(math.log(math.sqrt(math.pi) / 4), abs=1e-15)


@pytest.mark.parametrize("mu", BUILTINS[1:], ids=lambda m: m.name)
def test_log_moment_matches_direct_quadrature(mu):
    lo, hi = mu.support
    for xi in (0.0, 1.0, 4.5, 10.0):
        if math.isfinite(hi):
            val = integrate.quad(lambda r: r**xi * math.exp(mu.log_density(r)), lo, hi, limit=200)[0]
        else:
            # integrate in t = ln r so the log-stretched tail is resolved
            t0 = math.log(lo) if lo > 0 else -40.0
            val = integrate.quad(lambda t: math.exp((xi + 1) * t + mu.log_density(math.exp(t))), t0, 12.0, limit=400)[0]
        assert log_moment(mu, xi) == pytest.approx(math.log(val), abs=1e-8)


def test_negative_xi_rejected():
    with pytest.raises(ValidationError):
        log_moment(Bergman(), -0.1)
    with pytest.raises(ValidationError):
        log_moment_dd(Bergman(), 0.0)


def test_rho_examples():
    assert rho(CUE(), 5, 9) == 1.0
    assert rho(Bergman(), 0, 1) == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-15)
    assert rho(Ginibre(), 0, 1) == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-15)


def test_rho_no_overflow_at_large_index():
    val = rho(Ginibre(), 400, 401)
    assert 0 < val < 1
    assert np.isfinite(rho_matrix(Ginibre(), 600)).all()


def test_log_moment_dd_examples():
    assert log_moment_dd(Bergman(), 8.0) == pytest.approx(0.01, abs=1e-15)
    assert log_moment_dd(Ginibre(), 1000.0) == pytest.approx(1 / 2000, rel=1e-2)
    assert log_moment_dd(CUE(), 3.0) == 0.0


@pytest.mark.parametrize("mu", [Ginibre(), Bergman(), JacobiEdge(2.5), GammaWeight(1.0, 3.0)], ids=lambda m: m.name)
def test_closed_form_dd_matches_finite_difference(mu):
    from ptoeplitz.radial_measures import _fd_second_derivative

    xi = np.array([0.5, 3.0, 40.0, 900.0])
    fd = _fd_second_derivative(mu._log_moment, xi)
    np.testing.assert_allclose(fd, mu.log_moment_dd(xi), rtol=1e-5)


def test_logstretch_dd_tracks_laplace_law():
    mu = LogStretch(1.0, 4.0)
    xi = np.array([200.0, 2000.0])
    ratio = mu.log_moment_dd(xi) / mu.h(xi)
    assert np.all(np.abs(ratio - 1) < 0.02)
    assert abs(ratio[1] - 1) < abs(ratio[0] - 1)


def test_iota_examples():
    g = Ginibre()
    assert iota(g, 1.0) == 0.0
    assert iota(g, 64.0) == pytest.approx(math.log(64) / 4, abs=1e-15)
    assert iota(g, math.exp(4)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValidationError):
        iota(Bergman(), 5.0)
    with pytest.raises(ValidationError):
        iota(g, 0.5)


def test_iota_quadrature_matches_closed_form():
    # generic quadrature route of the base class against the closed form
    from ptoeplitz.radial_measures import RadialMeasure

    g = Ginibre()
    x = np.array([1.0, 7.0, 300.0])
    np.testing.assert_allclose(RadialMeasure._iota(g, x), g.iota(x), atol=1e-10)
    ls = LogStretch(2.0, 5.0)
    np.testing.assert_allclose(RadialMeasure._iota(ls, x), ls.iota(x), atol=1e-10)


def test_classify_examples():
    grid = np.geomspace(10, 1e4, 40)
    fit = classify(Bergman(), grid)
    assert fit.alpha == pytest.approx(1.0, rel=0.02) and fit.beta == pytest.approx(2.0, rel=0.02)
    fit = classify(Ginibre(), grid)
    assert fit.alpha == pytest.approx(0.5, rel=0.02) and fit.beta == pytest.approx(1.0, rel=0.02)
    fit = classify(JacobiEdge(3.0), np.geomspace(1e2, 1e5, 40))
    assert fit.alpha == pytest.approx(3.0, rel=0.05) and fit.beta == pytest.approx(2.0, rel=0.05)
    fit = classify(CUE(), grid)
    assert fit.alpha == 0.0 and fit.beta == math.inf


def test_classify_rejects_bad_grid():
    with pytest.raises(ValidationError):
        classify(Bergman(), [1, 2, 3])
    with pytest.raises(ValidationError):
        classify(Bergman(), [1, 3, 2, 4, 5])


def test_radial_power_sample_examples():
    assert radial_power_sample(Bergman(), 0, 0.25) == pytest.approx(0.5, abs=1e-15)
    assert radial_power_sample(CUE(), 4, 0.3) == 1.0
    assert radial_power_sample(Ginibre(), 0, 1 - math.exp(-1)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValidationError):
        radial_power_sample(Bergman(), 0, 1.0)


@pytest.mark.parametrize("mu", [Ginibre(), Bergman(), JacobiEdge(3.0), GammaWeight(0.5, 1.5)], ids=lambda m: m.name)
def test_quantile_inverts_cdf(mu):
    k = 3
    lo, hi = mu.support
    hi = hi if math.isfinite(hi) else 30.0
    logm = log_moment(mu, 2 * k)
    for u in (0.1, 0.5, 0.93):
        q = radial_power_sample(mu, k, u)
        cdf = integrate.quad(lambda r: math.exp(2 * k * math.log(r) + mu.log_density(r) - logm) if r > 0 else 0.0, lo, q)[0]
        assert cdf == pytest.approx(u, abs=1e-8)


def test_regularity_validation():
    with pytest.raises(ValidationError):
        Regularity("C1", 0.9)
    with pytest.raises(ValidationError):
        Regularity("C2", 1.2, 2.0, 2.0)
    assert LogStretch(1.0, 2.5).regularity is None
    reg = LogStretch(1.0, 4.0).regularity
    assert reg.kind == "C2" and reg.beta == pytest.approx(2 / 3)


def test_measure_registry():
    assert isinstance(measure_from_name("Ginibre"), Ginibre)
    assert measure_from_name("jacobi:3").alpha == 3.0
    assert measure_from_name("gamma:1,2").log_moment(4.0) == pytest.approx(Ginibre().log_moment(4.0))
    with pytest.raises(ValidationError):
        measure_from_name("nonsense")


def _bergman_custom():
    r = np.geomspace(1e-8, 1.0, 400)
    return CustomMeasure(r=r, density=r, support_bounds=(0.0, 1.0))


def test_custom_measure_reproduces_bergman():
    cm = _bergman_custom()
    xi = np.linspace(0, 100, 101)
    np.testing.assert_allclose(cm.log_moment(xi), Bergman().log_moment(xi), atol=1e-8)
    assert cm.log_moment_dd(8.0) == pytest.approx(0.01, rel=1e-5)
    assert cm.quantile(0, 0.25) == pytest.approx(0.5, abs=1e-3)


def test_custom_measure_files(tmp_path):
    r = np.geomspace(1e-8, 1.0, 400)
    path = tmp_path / "disk.csv"
    path.write_text("r,density\n" + "".join(f"{float(x)!r},{float(x)!r}\n" for x in r))
    conf = tmp_path / "disk.json"
    conf.write_text('{"csv": "disk.csv", "support": [0, 1], "order": 8}')
    cm = measure_from_name(str(conf))
    assert cm.log_moment(2.0) == pytest.approx(-math.log(4), abs=1e-10)


def test_custom_measure_coarse_grid_flagged():
    r = np.geomspace(1e-3, 1.0, 6)
    cm = CustomMeasure(r=r, density=r, support_bounds=(0.0, 1.0), order=2)
    with pytest.raises(CertificationError):
        cm.log_moment(60.0)


def test_custom_measure_rejects_bad_input():
    with pytest.raises(ValidationError):
        CustomMeasure(r=np.array([1.0, 0.5, 2.0, 3.0]), density=np.ones(4))
    with pytest.raises(ValidationError):
        CustomMeasure(r=np.linspace(0.1, 0.9, 5), density=np.ones(5), support_bounds=(0.0, 1.0))


def test_log_rho_band_matches_closed_form():
    k = np.array([0.0, 5.0, 300.0, 1e5, 1e8])
    for m in (1, 2, 5):
        exact = 0.5 * np.log1p(-(m**2) / (2 * k + m + 2) ** 2)
        np.testing.assert_allclose(log_rho_band(Bergman(), k, m), exact, rtol=1e-12)


# -- properties -------------------------------------------------------------


@pytest.mark.parametrize("mu", BUILTINS, ids=lambda m: m.name)
def test_log_convexity(mu):
    xi = np.geomspace(1, 1e4, 60)
    assert np.all(np.asarray(mu.log_moment_dd(xi)) >= -1e-10)


@pytest.mark.parametrize("mu", BUILTINS[:5], ids=lambda m: m.name)
def test_rho_matrix_bounds_and_symmetry(mu):
    r = rho_matrix(mu, 513)
    assert np.all(r > 0) and np.all(r <= 1 + 1e-12)
    assert np.array_equal(r, r.T)
    assert np.all(np.diag(r) == 1.0)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(BUILTINS), st.integers(0, 512), st.integers(0, 512))
def test_rho_pointwise_properties(mu, j, k):
    a, b = rho(mu, j, k), rho(mu, k, j)
    assert a == b
    assert 0 < a <= 1 + 1e-12
    if j == k:
        assert a == 1.0


def test_cue_rho_exactly_one():
    assert np.all(rho_matrix(CUE(), 64) == 1.0)


def test_ginibre_rho_near_diagonal_expansion():
    j, k = np.meshgrid(np.arange(2001), np.arange(2001), indexing="ij")
    s, d = j + k, np.abs(j - k)
    mask = (d**2 < s / 2) & (s <= 2000) & (d > 0)
    jj, kk = j[mask], k[mask]
    g = Ginibre()
    approx = 1 - (jj - kk) ** 2 * g.h(jj + kk) / 2
    bound = ((jj - kk) ** 4 + np.abs(jj - kk) ** 3) / (jj + kk) ** 2
    C = np.max(np.abs(rho(g, jj, kk) - approx) / bound)
    assert C <= 5


@pytest.mark.parametrize("xi", [0.0, 3.0, 25.0, 140.0])
def test_logstretch_moment_against_mpmath(xi):
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    c, q = 1.0, 4.0
    val = mpmath.quad(lambda s: mpmath.exp(xi * s - c * s**q), [0, 1, 2, 4, 8, mpmath.inf])
    assert log_moment(LogStretch(c, q), xi) == pytest.approx(float(mpmath.log(val)), abs=1e-10)


def test_ginibre_dd_against_mpmath_trigamma():
    mpmath = pytest.importorskip("mpmath")
    for xi in (0.5, 7.0, 1e3, 1e6):
        want = float(mpmath.psi(1, mpmath.mpf(xi) / 2 + 1) / 4)
        assert log_moment_dd(Ginibre(), xi) == pytest.approx(want, rel=1e-13)
