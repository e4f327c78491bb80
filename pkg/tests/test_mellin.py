import math

import mpmath as mp
import numpy as np
import pytest

from moyal_morse import specfun as sf
from moyal_morse.errors import ContourError, DomainError, NormalizationRequiredError
from moyal_morse.factors import INTEGER, LIOUVILLE
from moyal_morse.mellin import (
    ContourSpec,
    assemble_integrand,
    field_integral,
    inverse_mellin,
    liouville_wigner_meijer,
    meijer_g4004,
    normalize_field,
    place_contour,
    wigner_column,
    wigner_field,
    wigner_point,
    wigner_x_derivative,
)
from moyal_morse.model import MorseSystem, SpectralLabel

G4004_AT_2 = 0.0529541852999162240 - 0.0113781045432403298j  # G(2 | 0.3+0.2i, -0.1+0.5i, 0.7-0.4i, 0.2)
K08 = SpectralLabel.scattering(0.8)
K11 = SpectralLabel.scattering(1.1)


def rel(a, b):
    return abs(complex(a) - complex(b)) / abs(complex(b))


def test_cahen_mellin_pair():
    # (1/2 pi i) int Gamma(-s) u^-s ds with the contour left of 0 is exp(-1/u)
    r = inverse_mellin(lambda s: sf.gamma_c(-s), 1.0, poles=[0.0])
    assert rel(r.value, math.exp(-1)) < 1e-10
    assert r.c == pytest.approx(-0.5)
    r = inverse_mellin(lambda s: sf.gamma_c(-s), 4.0, poles=[0.0])
    assert rel(r.value, math.exp(-0.25)) < 1e-10


def test_bessel_pair():
    nu, u = 0.6j, 0.7
    W = lambda s: sf.gamma_c(-s) * sf.gamma_c(-s + nu)
    r = inverse_mellin(W, u, poles=[0.0, 0.0])
    z = 1 / u
    assert rel(r.value, 2 * z ** (nu / 2) * sf.bessel_k(nu, 2 * math.sqrt(z))) < 1e-8


def test_array_u_and_weights():
    W = lambda s: sf.gamma_c(-s)
    u = np.array([0.5, 1.0, 2.0])
    r = inverse_mellin(W, u, poles=[0.0], weights=[lambda s: 1.0, lambda s: s])
    assert r.value.shape == (2, 3)
    assert np.allclose(r.value[0], np.exp(-1 / u), rtol=1e-10)
    # int s Gamma(-s) u^-s ds = -u d/du exp(-1/u) = -exp(-1/u)/u
    assert np.allclose(r.value[1], -np.exp(-1 / u) / u, rtol=1e-9)


def test_node_doubling_self_convergence():
    W = lambda s: sf.gamma_c(-s) * sf.gamma_c(-s + 0.4j)
    a = inverse_mellin(W, 1.3, ContourSpec(nodes_per_unit=16), poles=[0.0]).value
    b = inverse_mellin(W, 1.3, ContourSpec(nodes_per_unit=64, half_length=12), poles=[0.0]).value
    assert rel(a, b) < 1e-9


def test_contour_placement_rules():
    assert place_contour([0.0]) == -0.5
    assert place_contour([0.0], -0.25) == -0.25
    assert place_contour([3.0]) == -0.25
    with pytest.raises(ContourError):
        place_contour([0.0], -0.05)
    with pytest.raises(DomainError):
        ContourSpec(nodes_per_unit=4)
    with pytest.raises(DomainError):
        inverse_mellin(lambda s: s, -1.0)


def test_truncation_failure_reported():
    slow = lambda s: 1 / (1 + s * s) ** 0.5
    with pytest.raises(ContourError):
        inverse_mellin(slow, 1.0, ContourSpec(max_half_length=20), poles=[1.0])


def test_meijer_reference_value():
    a = (0.3 + 0.2j, -0.1 + 0.5j, 0.7 - 0.4j, 0.2)
    assert rel(meijer_g4004(2.0, a), G4004_AT_2) < 1e-9
    ref = complex(mp.meijerg([[], []], [list(a), []], 0.6))
    assert rel(meijer_g4004(0.6, a), ref) < 1e-9


def test_meijer_conjugate_pairs_real():
    a = (0.4j, -0.4j, 1.1j, -1.1j)
    v = meijer_g4004(1.5, a)
    assert abs(v.imag) < 1e-12 * abs(v)


def test_liouville_integrand_is_four_gammas(rng):
    sys = MorseSystem(beta=0.0)
    I = assemble_integrand(sys, K08, K11, 0.3, 0.7, family=LIOUVILLE)
    P = 0.7 / 2
    for s in -0.6 + 1j * rng.uniform(-3, 3, 5):
        prod = (sf.gamma_c(-s + 1j * P + 0.4j) * sf.gamma_c(-s + 1j * P - 0.4j)
                * sf.gamma_c(-s - 1j * P + 0.55j) * sf.gamma_c(-s - 1j * P - 0.55j))
        assert rel(I.mellin(s), prod) < 1e-14


def test_pole_inventory_complex_momentum():
    sys = MorseSystem(beta=0.0)
    real = assemble_integrand(sys, K08, K11, 0.0, 0.7)
    assert real.leftmost_pole == pytest.approx(0.0)
    shifted = assemble_integrand(sys, K08, K11, 0.0, 0.7 - 1j * sys.hbar * sys.alpha)
    # the left factor's poles move right by 1/2, the right factor's move left by 1/2
    assert sorted(shifted.poles) == pytest.approx([-0.5, -0.5, 0.5, 0.5])
    assert place_contour(shifted.poles) == pytest.approx(-1.0)


def test_liouville_reduction_matches_meijer():
    sys = MorseSystem(alpha=0.8, kappa=1.3, beta=0.0)
    pts = [(0.1, -0.4), (0.5, 0.9), (-0.3, 1.7), (1.0, 0.0)]
    a = np.array([wigner_point(sys, K08, K11, x, p, family=LIOUVILLE) for x, p in pts])
    b = np.array([liouville_wigner_meijer(sys, 0.8, 1.1, x, p) for x, p in pts])
    assert np.max(np.abs(a - b)) / np.max(np.abs(a)) < 1e-9
    # the default real-b family agrees up to one global constant
    r = np.array([wigner_point(sys, K08, K11, x, p) for x, p in pts]) / b
    assert np.mean(np.abs(r - r.mean()) ** 2) / abs(r.mean()) ** 2 < 1e-8


def test_liouville_diagonal_real():
    sys = MorseSystem(beta=0.0)
    v = liouville_wigner_meijer(sys, 0.9, 0.9, 0.2, 0.6)
    assert abs(v.imag) < 1e-9 * abs(v)


@pytest.mark.parametrize("labels", [(K08, K08), (SpectralLabel.bound(1), SpectralLabel.bound(1))])
def test_diagonal_reality(labels):
    sys = MorseSystem.from_b(4)
    v = np.array([wigner_point(sys, *labels, x, p) for x, p in [(0.2, 0.5), (1.0, -1.3)]])
    assert np.max(np.abs(v.imag) / np.abs(v)) < 1e-9


def test_hermiticity():
    sys = MorseSystem.from_b(2.5)
    a = wigner_point(sys, K08, K11, 0.4, 0.8)
    b = wigner_point(sys, K11, K08, 0.4, 0.8)
    assert rel(a, np.conj(b)) < 1e-9
    bnd = SpectralLabel.bound(0)
    a = wigner_point(sys, bnd, K08, 0.4, -0.3)
    b = wigner_point(sys, K08, bnd, 0.4, -0.3)
    assert rel(a, np.conj(b)) < 1e-9


def test_integer_family_dispatch_agrees():
    sys = MorseSystem.from_b(3)
    xs = [0.0, 0.6]
    real = wigner_column(sys, K08, K11, xs, 0.5).value[0]
    integer = wigner_column(sys, K08, K11, xs, 0.5, family=INTEGER).value[0]
    c = np.vdot(integer, real) / np.vdot(integer, integer)
    assert np.max(np.abs(real - c * integer)) / np.max(np.abs(real)) < 1e-8


def test_contour_offset_independence():
    sys = MorseSystem.from_b(2.5)
    a = wigner_point(sys, K08, K11, 0.3, 0.4)
    b = wigner_point(sys, K08, K11, 0.3, 0.4, ContourSpec(c=-0.6))
    assert rel(a, b) < 1e-9


def test_x_derivative_matches_finite_differences():
    sys = MorseSystem.from_b(2.5, alpha=0.9)
    x, p, h = 0.3, 0.4, 1e-4 / 0.9
    f = [wigner_point(sys, K08, K11, x + j * h, p) for j in (-1, 0, 1)]
    d1 = wigner_x_derivative(sys, K08, K11, x, p, 1)
    d2 = wigner_x_derivative(sys, K08, K11, x, p, 2)
    assert rel(d1, (f[2] - f[0]) / (2 * h)) < 1e-5
    assert rel(d2, (f[2] - 2 * f[1] + f[0]) / h**2) < 1e-5
    with pytest.raises(DomainError):
        wigner_x_derivative(sys, K08, K11, x, p, 3)


def test_field_single_point_and_parallel():
    sys = MorseSystem.from_b(2.5)
    one = wigner_field(sys, K08, K11, [0.3], [0.4])
    assert one.values[0, 0] == wigner_point(sys, K08, K11, 0.3, 0.4)
    xs, ps = np.linspace(0, 1, 3), np.linspace(-1, 1, 4)
    serial = wigner_field(sys, K08, K11, xs, ps)
    parallel = wigner_field(sys, K08, K11, xs, ps, workers=2)
    assert serial.to_json() == parallel.to_json()
    assert serial.to_csv() == parallel.to_csv()
    assert serial.contour["c_used_max"] <= -0.25


def test_diagonal_field_real():
    sys = MorseSystem.from_b(2.5)
    f = wigner_field(sys, K08, K08, np.linspace(0, 1, 3), np.linspace(-1, 1, 3))
    assert f.reality_defect() < 1e-9


def test_normalization():
    sys = MorseSystem.from_b(4)
    g = SpectralLabel.bound(0)
    xs, ps = np.linspace(-2, 6, 41), np.linspace(-6, 6, 41)
    f = normalize_field(wigner_field(sys, g, g, xs, ps))
    assert f.normalized
    assert field_integral(f) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(NormalizationRequiredError):
        normalize_field(wigner_field(sys, K08, K11, [0.0], [0.0]))


def test_meijer_inversion_identity():
    # G^{40}_{04}(1/z | a) = G^{04}_{40}(z | 1 - a); the right side comes from mpmath
    a = [0.2 + 0.3j, -0.1 + 0.5j, 0.4 - 0.7j, 0.1 + 0.2j]
    ref = complex(mp.meijerg([[1 - v for v in a], []], [[], []], 2.0))
    assert rel(meijer_g4004(0.5, a), ref) < 1e-9
