import math

import numpy as np
import pytest
from scipy import integrate

from moyal_morse.errors import DomainError, SeriesDivergenceError, WindowingRequiredError
from moyal_morse.model import MorseSystem, SpectralLabel, energy_of, v_of_x
from moyal_morse.schrodinger import (
    bound_norm_closed_form,
    kummer_coefficient,
    psi_bound,
    psi_scattering,
    schrodinger_residual,
    wigner_bound_bessel,
    wigner_oracle,
    wigner_series,
    wigner_transform_numeric,
)

B4 = MorseSystem.from_b(4)


def test_scattering_state_real():
    sys = MorseSystem.from_b(2.5)
    x = np.linspace(-2, 6, 81)
    psi = np.asarray(psi_scattering(sys, 0.8)(x))
    assert np.max(np.abs(psi.imag) / np.abs(psi)) < 1e-9


def test_scattering_forms_agree():
    sys = MorseSystem.from_b(2.5, alpha=0.9, kappa=1.2)
    x = np.linspace(-1, 4, 21)
    w = np.asarray(psi_scattering(sys, 0.8)(x))
    k = np.asarray(psi_scattering(sys, 0.8, form="kummer")(x))
    c = math.sqrt(2 * sys.kappa / sys.alpha)
    assert np.max(np.abs(w - c * k)) / np.max(np.abs(w)) < 1e-9
    with pytest.raises(DomainError):
        psi_scattering(sys, 0.8, form="bessel")
    with pytest.raises(DomainError):
        psi_scattering(sys, -0.8)


def test_scattering_asymptotic_wavelength():
    sys = MorseSystem.from_b(2.5)
    k = 1.3
    x = np.linspace(5, 20, 3001)
    psi = np.asarray(psi_scattering(sys, k)(x)).real
    sign_change = np.nonzero(np.diff(np.sign(psi)))[0]
    # linear interpolation of the crossings
    roots = x[sign_change] - psi[sign_change] * (x[1] - x[0]) / (psi[sign_change + 1] - psi[sign_change])
    assert abs(np.mean(np.diff(roots)) / (math.pi / k) - 1) < 0.02
    assert np.max(np.abs(psi)) < 10


def test_scattering_forbidden_side_decay():
    sys = MorseSystem.from_b(2.5)
    x = np.array([-1.2, -1.5, -1.8, -2.1])
    psi = np.abs(np.asarray(psi_scattering(sys, 0.8)(x)))
    assert np.all(np.diff(psi) < 0)


def test_bound_nodes():
    x = np.linspace(-3, 12, 10_000)
    g = psi_bound(B4, 0)(x)
    e = psi_bound(B4, 1)(x)
    assert np.count_nonzero(np.diff(np.sign(g[g != 0]))) == 0
    assert np.count_nonzero(np.diff(np.sign(e[e != 0]))) == 1


def test_bound_orthonormal():
    g, e = psi_bound(B4, 0), psi_bound(B4, 1)
    f = lambda a, b: integrate.quad(lambda x: float(a(np.array([x]))[0] * b(np.array([x]))[0]),
                                    -np.inf, np.inf, epsabs=1e-13, limit=400)[0]
    assert abs(f(g, e)) < 1e-8
    assert f(g, g) == pytest.approx(1, abs=1e-10)
    assert f(e, e) == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("nu,b", [(0, 4.0), (1, 4.0), (1, 5.3)])
def test_bound_norm_closed_form(nu, b):
    sys = MorseSystem.from_b(b, alpha=0.7)
    assert psi_bound(sys, nu).scale == pytest.approx(1 / math.sqrt(bound_norm_closed_form(sys, nu)), rel=1e-9)


def test_bound_invalid_label():
    with pytest.raises(DomainError):
        psi_bound(B4, 2)


def test_schrodinger_residuals():
    x = np.linspace(-1, 4, 26)
    g = psi_bound(B4, 0)
    assert np.max(schrodinger_residual(B4, g, g.energy, x)) < 1e-6
    s = psi_scattering(MorseSystem.from_b(2.5), 1.0)
    assert np.max(schrodinger_residual(s.system, s, s.energy, x)) < 1e-6
    assert np.max(schrodinger_residual(B4, g, g.energy + 0.1, x)) > 1e-2


def test_transform_real_and_even_for_real_states():
    g = psi_bound(B4, 0)
    p = np.array([-1.3, -0.4, 0.4, 1.3])
    rho = wigner_transform_numeric(B4, g, g, 0.7, p)
    assert np.max(np.abs(rho.imag)) < 1e-10 * np.max(np.abs(rho))
    assert np.allclose(rho[::-1], rho, rtol=1e-10, atol=0)


def test_transform_marginal():
    g = psi_bound(B4, 0)
    p = np.linspace(-20, 20, 801)
    xs = [-0.5, 0.5, 1.5, 3.0]
    ratios = []
    for x in xs:
        marg = np.trapezoid(wigner_transform_numeric(B4, g, g, x, p).real, p)
        ratios.append(marg / (2 * math.pi * float(g(np.array([x]))[0]) ** 2))
    assert np.allclose(ratios, 1.0, rtol=1e-4)


def test_bound_wigner_negative_somewhere():
    e = SpectralLabel.bound(1)
    values = [wigner_oracle(B4, e, e, x, np.linspace(-2, 2, 9)).real for x in np.linspace(-0.5, 3, 8)]
    assert np.min(values) < 0


def test_bessel_sum_matches_transform():
    g = psi_bound(B4, 0)
    for x in (0.0, 1.2):
        p = np.linspace(-1.5, 1.5, 5)
        oracle = wigner_transform_numeric(B4, g, g, x, p)
        closed = wigner_bound_bessel(B4, 0, x, p) * g.scale**2
        assert np.max(np.abs(oracle - closed)) < 1e-9 * np.max(np.abs(oracle))
    e = psi_bound(B4, 1)
    oracle = wigner_transform_numeric(B4, e, e, 0.8, 0.6)
    assert wigner_bound_bessel(B4, 1, 0.8, 0.6) * e.scale**2 == pytest.approx(oracle, rel=1e-9)


def test_scattering_transform_decays_without_window():
    # one of psi(x + y/2), psi(x - y/2) is always on the forbidden side
    sys = MorseSystem.from_b(2.5)
    s = psi_scattering(sys, 0.8)
    a = wigner_transform_numeric(sys, s, s, 0.5, 0.3)
    assert abs(a.imag) < 1e-10 * abs(a)


def test_window_required_for_non_decaying_integrand():
    sys = MorseSystem.from_b(2.5)
    flat = lambda x: np.exp(-0.05 * np.asarray(x) ** 2) + 0j
    with pytest.raises(WindowingRequiredError):
        wigner_transform_numeric(sys, flat, flat, 0.5, 0.3)
    with pytest.raises(DomainError):
        wigner_transform_numeric(sys, flat, flat, 0.5, 0.3, window="hann")


def test_series_diverges_and_says_so():
    sys = MorseSystem.from_b(2.5)
    with pytest.raises(SeriesDivergenceError):
        wigner_series(sys, 1.5, 0.4, 0.8, 1.1)
    # shells grow roughly like 2^M
    shells = [abs(wigner_series(sys, 1.5, 0.4, 0.8, 1.1, shells=M)[0] -
                  wigner_series(sys, 1.5, 0.4, 0.8, 1.1, shells=M - 1)[0]) for M in (18, 19, 20)]
    assert shells[1] > shells[0] and shells[2] > shells[1]


def test_series_leading_term_asymptotics():
    sys = MorseSystem.from_b(2.5)
    v, p, kL, kR = 60.0, 0.4, 0.8, 1.1
    value, tail = wigner_series(sys, v, p, kL, kR, shells=0)
    assert tail.terms == 1
    A = [kummer_coefficient(sys, kL), kummer_coefficient(sys, kR)]
    lead = 0j
    for sL in (1, -1):
        for sR in (1, -1):
            a = (A[0] if sL > 0 else A[0].conjugate()) * (A[1] if sR > 0 else A[1].conjugate())
            lead += a * v ** (1j * (sL * kL + sR * kR))
    lead *= 4 * math.sqrt(math.pi / (2 * v)) * math.exp(-v)
    assert abs(value - lead) < 0.1 * abs(lead)


def test_series_rejects_nonpositive_v():
    with pytest.raises(DomainError):
        wigner_series(MorseSystem.from_b(2.5), 0.0, 0.4, 0.8, 1.1)


def test_energies_consistent():
    assert psi_bound(B4, 1).energy == energy_of(SpectralLabel.bound(1), B4)
    assert float(v_of_x(0.0, B4)) == pytest.approx(2.0)
