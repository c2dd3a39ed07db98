import math

import numpy as np
import pytest
from scipy.integrate import quad

from riesz_lab import (DomainError, Lattice2D, NumericError, TorusConfig,
                       epstein_zeta_cs, epstein_zeta_cs_diff, epstein_zeta_direct,
                       green_1d, make_kernel, periodic_W, relative_lattice_W,
                       renormalized_self_energy_1d, scale_W,
                       scan_fundamental_domain, truncated_periodic_energy,
                       unscale_W, xi_1d)
from riesz_lab.lattice import (TRIANGULAR, green_1d_deriv, green_1d_log_closed,
                               green_kappa, polylog_on_circle)

SQUARE = Lattice2D(0.0, 1.0)


def _dirichlet_beta(a: float, n: int = 60) -> float:
    # CVZ-accelerated alternating sum over odd integers (test-local oracle)
    d = (3.0 + math.sqrt(8.0)) ** n
    d = (d + 1.0 / d) / 2.0
    b, c, acc = -1.0, -d, 0.0
    for k in range(n):
        c = b - c
        acc += c * (2 * k + 1.0) ** (-a)
        b *= (k + n) * (k - n) / ((k + 0.5) * (k + 1.0))
    return acc / d


# ---------------------------------------------------------------------------
# Epstein zeta

@pytest.mark.parametrize("alpha", [1.3, 2.0])
def test_direct_sum_square_lattice_oracle(alpha):
    from riesz_lab import riemann_zeta
    oracle = 4.0 * riemann_zeta(alpha) * _dirichlet_beta(alpha)
    assert epstein_zeta_direct(SQUARE, alpha) == pytest.approx(oracle, abs=1e-9)
    assert epstein_zeta_cs(SQUARE, alpha) == pytest.approx(oracle, abs=1e-9)


def test_direct_sum_symmetry_x_to_one_minus_x():
    a = epstein_zeta_direct(Lattice2D(0.3, 1.2), 1.3)
    b = epstein_zeta_direct(Lattice2D(0.7, 1.2), 1.3)
    assert a == pytest.approx(b, abs=1e-10)


def test_direct_sum_rejects_continuation_range():
    with pytest.raises(DomainError):
        epstein_zeta_direct(SQUARE, 0.9)


@pytest.mark.parametrize("lat", [SQUARE, TRIANGULAR, Lattice2D(0.3, 1.2)])
@pytest.mark.parametrize("alpha", [1.2, 1.5, 2.0])
def test_cs_matches_direct(lat, alpha):
    assert epstein_zeta_cs(lat, alpha) \
        == pytest.approx(epstein_zeta_direct(lat, alpha), abs=1e-8)


def test_cs_rejects_special_alphas():
    for alpha in (0.5, 1.0, 0.5 + 1e-10):
        with pytest.raises(DomainError):
            epstein_zeta_cs(SQUARE, alpha)


def test_cs_diff_sign_of_triangular_minimality():
    # Z_tau - Z_tri >= 0 with equality only at tau_tri
    assert epstein_zeta_cs_diff(SQUARE, TRIANGULAR, 0.75) > 0.0
    assert epstein_zeta_cs_diff(TRIANGULAR, TRIANGULAR, 0.75) == 0.0


@pytest.mark.parametrize("alpha0", [0.5, 1.0])
def test_cs_diff_special_alpha_continuity(alpha0):
    # the pole-cancelled limit matches the average of nearby regular values
    lat = Lattice2D(0.2, 1.4)
    eps = 2e-3
    lo = epstein_zeta_cs_diff(lat, TRIANGULAR, alpha0 - eps)
    hi = epstein_zeta_cs_diff(lat, TRIANGULAR, alpha0 + eps)
    mid = epstein_zeta_cs_diff(lat, TRIANGULAR, alpha0)
    assert mid == pytest.approx(0.5 * (lo + hi), abs=5e-5)


def test_q_series_terms_decay():
    from riesz_lab.specfun import bessel_k, sigma_div
    alpha, y = 0.75, 2.0
    term = 10 ** (alpha - 0.5) * sigma_div(1 - 2 * alpha, 10) \
        * bessel_k(alpha - 0.5, 2 * math.pi * 10 * y)
    assert abs(term) < 1e-16


def test_relative_lattice_w_triangular_zero_and_square_positive():
    spec = make_kernel("riesz", 2, 1.0)
    assert relative_lattice_W(TRIANGULAR, spec) == 0.0
    assert relative_lattice_W(SQUARE, spec) > 0.0


def test_relative_lattice_w_log2d_case():
    spec = make_kernel("log2d", 2)
    assert relative_lattice_W(TRIANGULAR, spec) == 0.0
    assert relative_lattice_W(SQUARE, spec) > 0.0


def test_relative_lattice_w_modular_invariance():
    spec = make_kernel("riesz", 2, 0.8)
    lat = Lattice2D(0.3, 1.2)
    base = relative_lattice_W(lat, spec)
    shifted = relative_lattice_W(Lattice2D(1.3, 1.2).canonicalize(), spec)
    n2 = 0.3 ** 2 + 1.2 ** 2
    inverted = relative_lattice_W(Lattice2D(-0.3 / n2, 1.2 / n2).canonicalize(), spec)
    assert shifted == pytest.approx(base, abs=1e-9)
    assert inverted == pytest.approx(base, abs=1e-9)


def test_canonicalize():
    lat = Lattice2D(0.8, 0.3).canonicalize()
    assert abs(lat.x) <= 0.5 + 1e-12
    assert lat.x ** 2 + lat.y ** 2 >= 1.0 - 1e-12
    with pytest.raises(DomainError):
        Lattice2D(0.0, -1.0)


def test_scan_small_resolution_finds_triangular():
    spec = make_kernel("riesz", 2, 1.0)
    argmin, min_value, rows = scan_fundamental_domain(spec, 16)
    assert argmin == pytest.approx((0.5, math.sqrt(0.75)), abs=1e-12)
    assert min_value == 0.0
    others = [v for (x, y, v) in rows if (x, y) != argmin]
    assert min(others) > 0.0
    with pytest.raises(DomainError):
        scan_fundamental_domain(spec, 8)


# ---------------------------------------------------------------------------
# 1D Green function

def test_green_log_closed_form():
    for x in (0.1, 0.25, 0.4, 0.5):
        closed = -math.log(2 * math.sin(math.pi * x)) / (2 * math.pi)
        assert green_1d(1, 0.5, x, method="series") == pytest.approx(closed, abs=1e-8)
        assert green_1d(1, 0.5, x, method="integral") == pytest.approx(closed, abs=1e-8)
    assert green_1d(1, 0.5, 0.5) == pytest.approx(-math.log(2) / (2 * math.pi),
                                                  abs=1e-9)


@pytest.mark.parametrize("N,alpha", [(1, 0.5), (1, 0.25), (4, 0.5), (4, 0.25)])
def test_green_paths_agree(N, alpha):
    for x in (0.1, 0.25, 0.4):
        s_val = green_1d(N, alpha, x, method="series")
        i_val = green_1d(N, alpha, x, method="integral")
        assert abs(s_val - i_val) <= 1e-6
        assert green_1d(N, alpha, x, method="both") == pytest.approx(i_val, abs=1e-6)


def test_green_even_about_half_period():
    for (N, alpha) in [(1, 0.5), (4, 0.25)]:
        for x in (0.1, 0.3):
            assert green_1d(N, alpha, x) == pytest.approx(
                green_1d(N, alpha, N - x), rel=1e-10)


@pytest.mark.parametrize("N,alpha", [(1, 0.5), (1, 0.25)])
def test_green_zero_mean(N, alpha):
    # int_0^N G = 0; substitute x = u^(1/(2 alpha)) so the x^(2 alpha - 1)
    # endpoint singularity integrates cleanly (G is even about N/2)
    p = 1.0 / (2.0 * alpha)

    def f(u):
        x = u ** p
        return green_1d(N, alpha, x, method="integral") * p * u ** (p - 1.0)

    val, _ = quad(f, 1e-14, (N / 2.0) ** (2.0 * alpha), epsabs=1e-9, limit=300)
    assert abs(2.0 * val) <= 1e-8


def test_green_singularity_rejected():
    with pytest.raises(DomainError):
        green_1d(4, 0.5, 4.0)
    with pytest.raises(DomainError):
        green_1d(4, 0.5, 0.0)


def test_green_kappa_log_value():
    assert green_kappa(make_kernel("log1d", 1)) == 0.5


def test_green_deriv_matches_finite_differences():
    for (N, alpha, x) in [(1, 0.5, 0.3), (4, 0.5, 1.1), (1, 0.25, 0.3)]:
        h = 1e-5
        fd = (green_1d(N, alpha, x + h, method="integral")
              - green_1d(N, alpha, x - h, method="integral")) / (2 * h)
        assert green_1d_deriv(N, alpha, x) == pytest.approx(fd, rel=1e-4, abs=1e-8)


# ---------------------------------------------------------------------------
# self energy, periodic W

def test_self_energy_log_closed_form():
    target = -2.0 * math.pi * math.log(2.0 * math.pi)
    assert renormalized_self_energy_1d(1, 0.5) == pytest.approx(target, abs=1e-6)
    assert xi_1d() == pytest.approx(-math.log(2.0 * math.pi), abs=1e-6)


def test_self_energy_riesz_finite():
    val = renormalized_self_energy_1d(1, 0.25)
    assert math.isfinite(val)


def test_periodic_w_lattice_independent_of_period():
    spec = make_kernel("log1d", 1)
    target = -2.0 * math.pi * math.log(2.0 * math.pi)
    for N in (1, 2, 4, 8):
        cfg = TorusConfig.unit_density(np.arange(N, dtype=float))
        rep = periodic_W(cfg, spec)
        assert rep.W_value == pytest.approx(target, abs=2e-6)
        assert rep.W_value == pytest.approx(rep.pair_term + rep.self_term, rel=1e-14)
    assert periodic_W(TorusConfig.unit_density([0.0]), spec).pair_term == 0.0


def test_periodic_w_coincident_points():
    spec = make_kernel("log1d", 1)
    cfg = TorusConfig(d=1, length=2.0, points=np.array([0.5, 0.5]))
    assert periodic_W(cfg, spec).W_value == math.inf


def test_periodic_w_prefers_equal_spacing():
    spec = make_kernel("log1d", 1)
    even = TorusConfig.unit_density([0.0, 1.0])
    clustered = TorusConfig(d=1, length=2.0, points=np.array([0.0, 0.4]))
    assert periodic_W(even, spec).W_value < periodic_W(clustered, spec).W_value


def test_periodic_w_translation_invariance():
    spec = make_kernel("log1d", 1)
    base = TorusConfig(d=1, length=4.0, points=np.array([0.0, 0.7, 1.9, 3.1]))
    shift = TorusConfig(d=1, length=4.0, points=(base.points + 1.234) % 4.0)
    assert periodic_W(base, spec).W_value \
        == pytest.approx(periodic_W(shift, spec).W_value, abs=1e-10)


def test_periodic_w_rejects_2d():
    spec = make_kernel("log2d", 2)
    cfg = TorusConfig(d=2, length=1.0, points=np.array([0.0]))
    with pytest.raises(DomainError):
        periodic_W(cfg, spec)


# ---------------------------------------------------------------------------
# truncated energy

def test_truncated_energy_converges_linearly_to_w():
    spec = make_kernel("log1d", 1)
    cfg = TorusConfig.unit_density(np.arange(4, dtype=float))
    w = periodic_W(cfg, spec).W_value
    for eta in (0.2, 0.1, 0.05):
        gap = truncated_periodic_energy(cfg, spec, eta) - w
        # exact smeared energy of the lattice exceeds W by 8 pi eta
        assert gap == pytest.approx(8.0 * math.pi * eta, rel=1e-3)


def test_truncated_energy_monotonicity_with_valid_constant():
    # W_eta <= W_alpha + C eta^(1/2) holds with a constant independent of eta
    spec = make_kernel("log1d", 1)
    cfg = TorusConfig.unit_density(np.arange(4, dtype=float))
    etas = (0.2, 0.1, 0.05, 0.02)
    vals = {eta: truncated_periodic_energy(cfg, spec, eta) for eta in etas}
    C = 8.5 * math.pi    # slightly above the exact linear slope
    for eta in etas:
        for alpha in etas:
            if eta > alpha:
                assert vals[eta] <= vals[alpha] + C * math.sqrt(eta)


def test_truncated_energy_eta_validation():
    spec = make_kernel("log1d", 1)
    cfg = TorusConfig.unit_density(np.arange(4, dtype=float))
    for eta in (0.0, 0.5, 0.9):
        with pytest.raises(DomainError):
            truncated_periodic_energy(cfg, spec, eta)


def test_truncated_energy_riesz_moderate_eta():
    spec = make_kernel("riesz", 1, 0.5)
    cfg = TorusConfig.unit_density([0.0, 1.0])
    w = periodic_W(cfg, spec).W_value
    w_eta = truncated_periodic_energy(cfg, spec, 0.2, m_points=16)
    assert math.isfinite(w_eta)
    assert w_eta > w


# ---------------------------------------------------------------------------
# scaling laws

@pytest.mark.parametrize("spec", [make_kernel("log1d", 1), make_kernel("log2d", 2),
                                  make_kernel("riesz", 1, 0.5),
                                  make_kernel("riesz", 2, 1.5)])
def test_scale_round_trip(spec):
    for m in (0.1, 1.0, math.e, 10.0):
        for value in (-11.5, 0.0, 3.25):
            there = scale_W(value, m, spec)
            back = unscale_W(there, m, spec)
            assert back == pytest.approx(value, abs=1e-12)


def test_scale_examples():
    log1d = make_kernel("log1d", 1)
    assert scale_W(0.0, 1.0, log1d) == 0.0
    assert scale_W(0.0, math.e, log1d) == pytest.approx(-2.0 * math.pi * math.e,
                                                        rel=1e-14)
    riesz = make_kernel("riesz", 2, 1.0)
    assert scale_W(2.0, 3.0, riesz) == pytest.approx(2.0 * 3.0 ** 1.5, rel=1e-14)
    with pytest.raises(DomainError):
        scale_W(1.0, 0.0, log1d)


def test_polylog_log_case_identity():
    for theta in (0.4, 1.1, 2.5):
        val = polylog_on_circle(1.0, theta).real
        assert val == pytest.approx(-math.log(2 * math.sin(theta / 2)), abs=1e-10)
