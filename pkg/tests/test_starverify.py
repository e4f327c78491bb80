import math

import numpy as np
import pytest

from moyal_morse.errors import DomainError, NormalizationRequiredError, UnsupportedSourceError
from moyal_morse.field import WignerField
from moyal_morse.mellin import normalize_field, wigner_field
from moyal_morse.model import MorseSystem, SpectralLabel
from moyal_morse.schrodinger import wigner_bound_bessel
from moyal_morse.starverify import (
    compose_stationary,
    expectation,
    period,
    standard_grid,
    star_residual,
    star_residual_grid,
)

B4 = MorseSystem.from_b(4)
G0, G1 = SpectralLabel.bound(0), SpectralLabel.bound(1)


def test_standard_grid_scales():
    sys = MorseSystem(hbar=0.5, alpha=2.0)
    xs, ps = standard_grid(sys)
    assert xs[0] == -0.5 and xs[-1] == 1.5
    assert ps[0] == -3.0 and ps[-1] == 3.0


def test_liouville_diagonal_residual_small():
    sys = MorseSystem(beta=0.0)
    k = SpectralLabel.scattering(1.0)
    left, right = star_residual_grid(sys, k, k, *standard_grid(sys))
    assert left.max_residual < 1e-6 and right.max_residual < 1e-6
    assert len(left.points) == 25


def test_off_diagonal_residual_small():
    sys = MorseSystem.from_b(2.5)
    kl, kr = SpectralLabel.scattering(0.7), SpectralLabel.scattering(1.3)
    left, right = star_residual(sys, kl, kr, 0.4, 0.9)
    assert left < 1e-6 and right < 1e-6


def test_wrong_eigenvalue_detected():
    sys = MorseSystem.from_b(2.5)
    kl, kr = SpectralLabel.scattering(0.7), SpectralLabel.scattering(1.3)
    wrong = 0.5 * 0.8**2
    left, right = star_residual_grid(sys, kl, kr, *standard_grid(sys), energy_left=wrong)
    assert left.max_residual > 1e-2
    assert right.max_residual < 1e-6


def test_perturbed_field_detected():
    sys = MorseSystem.from_b(2.5)
    k = SpectralLabel.scattering(0.7)
    left, right = star_residual(sys, k, k, 0.4, 0.9, perturb=0.05)
    assert max(left, right) > 1e-3


def test_bound_residual_small():
    left, right = star_residual(B4, G1, G1, 0.3, -0.7)
    assert left < 1e-6 and right < 1e-6


def test_scale_invariance():
    sys = MorseSystem.from_b(2.5)
    k = SpectralLabel.scattering(0.7)
    a = star_residual(sys, k, k, 0.4, 0.9)
    b = star_residual(sys, k, k, 0.4, 0.9, scale=7.3)
    assert a == pytest.approx(b, rel=1e-6, abs=1e-15)


def test_diagonal_reports_conjugate():
    sys = MorseSystem.from_b(2.5)
    k = SpectralLabel.scattering(0.7)
    left, right = star_residual_grid(sys, k, k, [0.0, 1.0], [-0.5, 0.5])
    assert np.allclose(np.array(left.defects), np.conj(np.array(right.defects)), rtol=1e-6, atol=1e-14)
    d = left.to_dict()
    assert d["side"] == "left" and d["max_residual"] == max(d["residuals"])


def test_only_closed_source_supported():
    k = SpectralLabel.scattering(0.7)
    with pytest.raises(UnsupportedSourceError):
        star_residual(B4, k, k, 0.0, 0.0, source="oracle")
    with pytest.raises(UnsupportedSourceError):
        star_residual_grid(B4, k, k, [0.0], [0.0], source="series")


def bessel_field(nu, xs, ps):
    values = np.array([wigner_bound_bessel(B4, nu, x, ps) for x in xs])
    return WignerField(xs, ps, values, np.zeros(values.shape), SpectralLabel.bound(nu),
                       SpectralLabel.bound(nu), B4, source="bessel")


def test_expectation_values():
    field = normalize_field(bessel_field(0, np.linspace(-2.5, 9, 231), np.linspace(-7, 7, 281)))
    assert expectation(field, lambda x, p: np.ones_like(x)).value == pytest.approx(1, abs=1e-3)
    H = lambda x, p: B4.hamiltonian(x, p)
    assert expectation(field, H).value == pytest.approx(-1.125, abs=1e-3)
    assert abs(expectation(field, lambda x, p: p).value) < 1e-6
    assert expectation(field, H).truncation < 1e-3


def test_expectation_requires_normalization():
    with pytest.raises(NormalizationRequiredError):
        expectation(bessel_field(0, np.linspace(0, 1, 3), np.linspace(-1, 1, 3)), lambda x, p: p)


def test_period():
    assert period(B4, G0, G1) == pytest.approx(2 * math.pi)
    assert period(B4, G0, G0) == math.inf


def superposition_fields():
    xs, ps = np.linspace(-0.5, 2.5, 4), np.linspace(-1.5, 1.5, 3)
    pairs = [(G0, G0), (G1, G1), (G0, G1), (G1, G0)]
    fields = [wigner_field(B4, l, r, xs, ps) for l, r in pairs]
    c = 0.3 + 0.4j
    terms = [(1.0, G0, G0), (0.5, G1, G1), (c, G0, G1), (np.conj(c), G1, G0)]
    return terms, fields


def test_superposition_periodic_and_real():
    terms, fields = superposition_fields()
    T = period(B4, G0, G1)
    a = compose_stationary(terms, 0.37, fields)
    b = compose_stationary(terms, 0.37 + T, fields)
    assert np.max(np.abs(a.values - b.values)) <= 1e-10 * np.max(np.abs(a.values))
    assert a.reality_defect() < 1e-9
    assert not np.allclose(compose_stationary(terms, 1.1, fields).values, a.values)


def test_single_diagonal_term_static():
    terms, fields = superposition_fields()
    a = compose_stationary(terms[:1], 0.0, fields[:1])
    b = compose_stationary(terms[:1], 1.0, fields[:1])
    assert np.array_equal(a.values, b.values)


def test_superposition_checks_labels():
    terms, fields = superposition_fields()
    with pytest.raises(DomainError):
        compose_stationary(terms[:2], 0.0, fields[1:3])
    with pytest.raises(DomainError):
        compose_stationary(terms, 0.0, fields[:2])
