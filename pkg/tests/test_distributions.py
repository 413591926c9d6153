import math

import numpy as np
import pytest

from alphasched.distributions import (
    DistributionError,
    OffsetDistribution,
    from_spec,
)

A, B, C, D = 0.1702, 0.5768, 0.8746, 0.85897
E1 = 1.0 - 1.0 / math.e


def closed_form_quadratic_constants():
    """Hand evaluation of the truncated-quadratic constants, independent of
    the piecewise machinery."""
    f1 = A * D**3 / 3 + B * D**2 / 2 + C * D
    beta = A * D**4 / 4 + B * D**3 / 3 + C * D**2 / 2
    a2 = -E1 * A / 4
    a1 = 2 * A / 3 - E1 * B / 3
    a0 = B / 2 - E1 * C / 2
    phi_star = (a1 + math.sqrt(a1 * a1 - 4 * a0 * a2)) / (-2 * a2)

    def rho(phi):
        return A * phi**2 / 3 + B * phi / 2 + C - E1 * (A * phi**3 / 12 + B * phi**2 / 6 + C * phi / 2)

    return f1, beta, phi_star, rho


def test_quadratic_pdf_cdf_endpoints():
    d = OffsetDistribution.truncated_quadratic()
    f0, F0 = d.pdf_cdf(0.0)
    assert f0 == pytest.approx(0.8746)
    assert F0 == 0.0
    f1, F1 = d.pdf_cdf(1.0)
    assert f1 == 0.0
    assert F1 == pytest.approx(1.00000125, abs=1e-7)
    assert d.pdf(D + 1e-9) == 0.0


def test_clipped_uniform_interior():
    lam = 0.01
    d = OffsetDistribution.clipped_uniform(lam)
    theta = 0.37
    f, F = d.pdf_cdf(theta)
    assert f == pytest.approx(1.0 / (1.0 - 2 * lam))
    assert F == pytest.approx((theta - lam) / (1.0 - 2 * lam))
    assert d.cdf(lam) == pytest.approx(0.0, abs=1e-15)
    assert d.cdf(1.0) == pytest.approx(1.0)


def test_cdf_nondecreasing():
    for d in (
        OffsetDistribution.uniform(),
        OffsetDistribution.truncated_quadratic(),
        OffsetDistribution.clipped_uniform(0.02),
    ):
        grid = np.linspace(0, 1, 2001)
        F = d.cdf(grid)
        assert (np.diff(F) >= -1e-12).all()


def test_uniform_sampling_ks():
    d = OffsetDistribution.uniform()
    rng = np.random.default_rng(11)
    x = np.sort(d.sample(rng, 1_000_000))
    ks = np.abs(x - np.arange(1, x.size + 1) / x.size).max()
    assert ks < 0.002


def test_quadratic_sampling_support():
    d = OffsetDistribution.truncated_quadratic()
    x = d.sample(np.random.default_rng(5), 200_000)
    assert x.max() <= 0.85897
    assert x.min() >= 0.0


def test_clipped_sampling_support():
    lam = 1.0 / 5100.0
    d = OffsetDistribution.clipped_uniform(lam)
    x = d.sample(np.random.default_rng(6), 200_000)
    assert x.min() > lam - 1e-9
    assert x.max() < 1.0 - lam + 1e-9


def test_sampling_deterministic_and_mean():
    d = OffsetDistribution.truncated_quadratic()
    a = d.sample(np.random.default_rng(42), 5000)
    b = d.sample(np.random.default_rng(42), 5000)
    assert np.array_equal(a, b)
    big = d.sample(np.random.default_rng(1), 400_000)
    target = d.stats().beta / d.raw_mass
    sem = big.std(ddof=1) / math.sqrt(big.size)
    assert abs(big.mean() - target) <= 3 * sem


def test_quadratic_stats_match_hand_formulas():
    f1, beta, phi_star, rho = closed_form_quadratic_constants()
    s = OffsetDistribution.truncated_quadratic().stats()
    assert s.raw_mass == pytest.approx(f1, abs=1e-12)
    assert s.beta == pytest.approx(beta, abs=1e-12)
    assert s.phi_star == pytest.approx(phi_star, abs=1e-9)
    assert s.rho == pytest.approx(rho(phi_star), abs=1e-9)
    assert s.alpha == pytest.approx(1.0 + max(s.rho, (1.0 + s.rho) * s.beta))
    assert s.attained


def test_quadratic_rho_formula_at_random_points():
    _, _, _, rho = closed_form_quadratic_constants()
    d = OffsetDistribution.truncated_quadratic()
    rng = np.random.default_rng(3)
    phis = rng.uniform(1e-6, D, size=100)
    assert np.allclose(d.rho_of(phis), rho(phis), atol=1e-12)


def test_quadratic_sup_restricted_to_support():
    # With f vanishing past D, no phi > D beats the sup over (0, D].
    d = OffsetDistribution.truncated_quadratic()
    inside = d.rho_of(np.linspace(1e-6, D, 50_000)).max()
    outside = d.rho_of(np.linspace(D, 1.0, 10_000)[1:]).max()
    assert outside <= inside + 1e-12


def test_uniform_stats():
    s = OffsetDistribution.uniform().stats()
    assert s.beta == pytest.approx(0.5, abs=1e-12)
    assert s.rho == 1.0
    assert not s.attained
    assert s.phi_star == 0.0
    assert abs(s.alpha - 2.0) < 1e-9
    # rho(phi) = 1 - (1 - 1/e) * phi / 2 in closed form
    d = OffsetDistribution.uniform()
    phis = np.linspace(0.01, 1.0, 25)
    assert np.allclose(d.rho_of(phis), 1.0 - E1 * phis / 2.0, atol=1e-12)


def test_clipped_alpha_tends_to_two():
    alphas = [
        OffsetDistribution.clipped_uniform(lam).stats().alpha
        for lam in (0.005, 0.0005, 0.0)
    ]
    assert alphas[0] < alphas[1] < alphas[2]
    assert alphas[2] == pytest.approx(2.0, abs=1e-9)
    assert alphas[1] > 2.0 - 0.02


def test_invalid_densities_rejected():
    with pytest.raises(DistributionError):
        OffsetDistribution([0.0, 1.0], [[-0.5, 1.0]])  # negative near 0
    with pytest.raises(DistributionError):
        OffsetDistribution([0.0, 1.0], [[2.0]])  # mass 2
    with pytest.raises(DistributionError):
        OffsetDistribution([0.0, 0.5], [[1.0]])  # must end at 1
    with pytest.raises(DistributionError):
        OffsetDistribution.clipped_uniform(0.5)


def test_theta_domain_checked():
    d = OffsetDistribution.uniform()
    with pytest.raises(DistributionError):
        d.pdf(1.5)
    with pytest.raises(DistributionError):
        d.rho_of(0.0)


def test_from_spec_custom_poly(tmp_path):
    path = tmp_path / "tent.json"
    path.write_text(
        '{"breakpoints": [0.0, 0.5, 1.0], "coeffs": [[0.0, 4.0], [4.0, -4.0]], "name": "tent"}'
    )
    d = from_spec(f"poly:{path}")
    assert d.pdf(0.5) == pytest.approx(2.0)
    assert d.raw_mass == pytest.approx(1.0, abs=1e-12)
    s = d.stats()  # closed-form vs grid cross-check runs internally
    assert 0 < s.rho <= 2.0 and 0 < s.beta < 1


def test_from_spec_names():
    assert from_spec("uniform").name == "uniform"
    assert from_spec("quadratic").name == "quadratic"
    assert from_spec("clipped:0.01").name.startswith("clipped")
    with pytest.raises(DistributionError):
        from_spec("triangular")
