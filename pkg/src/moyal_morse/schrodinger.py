"""Schrodinger-side oracle: Morse wavefunctions, their brute-force Wigner
transform, the Kummer-expansion double series and the bound-state Bessel sum.

All Wigner transforms here use

    rho_LR(x, p) = int exp(-i y p) psi_L(x + hbar y/2) conj(psi_R(x - hbar y/2)) dy,

the same kernel that makes the contour representation in ``mellin`` solve
H * rho = E_L rho.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import specfun as sf
from .errors import ConvergenceError, DomainError, SeriesDivergenceError, WindowingRequiredError
from .model import MorseSystem, SpectralLabel, energy_of, v_of_x


@dataclass(frozen=True)
class WaveFunction:
    label: SpectralLabel
    system: MorseSystem
    evaluator: Callable
    norm_note: str = ""
    scale: float = 1.0

    def __call__(self, x):
        return self.scale * self.evaluator(np.asarray(x, dtype=float))

    @property
    def energy(self) -> float:
        return energy_of(self.label, self.system)


def kummer_coefficient(sys: MorseSystem, k) -> complex:
    """A = Gamma(-2ik/alpha) / Gamma(1/2 - b/2 - ik/alpha)."""
    q = 1j * k / sys.alpha
    return complex(sf.gamma_c(-2 * q)) * complex(sf.rgamma_c(0.5 - sys.b / 2 - q))


def psi_scattering(sys: MorseSystem, k, form="whittaker") -> WaveFunction:
    """Scattering state with C = 1.

    ``form='whittaker'``: exp(alpha x/2) W_{b/2, ik/alpha}(v).
    ``form='kummer'``: exp(-v/2)(A v^(ik/a) M(chi, s; v) + c.c.), which equals the
    Whittaker form divided by sqrt(2 kappa / alpha).
    """
    if not k > 0:
        raise DomainError("scattering wavenumber must be > 0")
    label = SpectralLabel.scattering(k)
    q = 1j * k / sys.alpha
    if form == "whittaker":
        def ev(x):
            v = v_of_x(x, sys)
            return np.exp(sys.alpha * x / 2) * np.asarray(sf.whittaker_w(sys.b / 2, q, v))
        note = "C exp(alpha x/2) W_{b/2,ik/alpha}(v), C = 1"
    elif form == "kummer":
        A = kummer_coefficient(sys, k)
        chi = 0.5 - sys.b / 2 + q

        def ev(x):
            v = v_of_x(x, sys)
            term = A * np.exp(q * np.log(v)) * np.asarray(sf.kummer_m(chi, 1 + 2 * q, v))
            return np.exp(-v / 2) * 2 * term.real
        note = "Kummer form with A = Gamma(-2ik/a)/Gamma(1/2-b/2-ik/a), C = 1"
    else:
        raise DomainError(f"unknown wavefunction form {form!r}")
    return WaveFunction(label, sys, ev, note)


def _bound_raw(sys, nu, x):
    s = sys.b / 2 - nu - 0.5
    with np.errstate(all="ignore"):
        v = v_of_x(x, sys)
        lag = sf.laguerre_assoc(nu, 2 * s, v)
        env = np.exp(-v / 2 + s * np.log(v))
        return np.where((v > 1e4) | (v == 0), 0.0, env * lag)


def bound_norm_closed_form(sys: MorseSystem, nu: int) -> float:
    """int |exp(-v/2) v^s L_nu^{2s}(v)|^2 dx = Gamma(nu + 2s + 1) / (nu! 2s alpha)."""
    s = sys.b / 2 - nu - 0.5
    return math.gamma(nu + 2 * s + 1) / (math.factorial(nu) * 2 * s * sys.alpha)


def psi_bound(sys: MorseSystem, nu: int, normalize=True) -> WaveFunction:
    """Bound state exp(-v/2) v^s L_nu^{2s}(v), s = b/2 - nu - 1/2, normalized by quadrature.

    In x this is exp(-kappa e^{-alpha x}/alpha) e^{+alpha(nu - b/2 + 1/2) x} L(...) up to a constant;
    the exponent decays for x -> +inf because nu - b/2 + 1/2 < 0.
    """
    label = SpectralLabel.bound(nu)
    label.validate(sys)
    scale = 1.0
    if normalize:
        f = lambda x: float(_bound_raw(sys, nu, np.array([x]))[0]) ** 2
        total, _ = integrate.quad(f, -np.inf, np.inf, epsabs=0, epsrel=1e-12, limit=400)
        scale = 1 / math.sqrt(total)
    return WaveFunction(label, sys, lambda x: _bound_raw(sys, nu, x), "unit L2 norm" if normalize else "raw",
                        scale)


def wavefunction_for(sys: MorseSystem, label: SpectralLabel) -> WaveFunction:
    return psi_bound(sys, label.nu) if label.is_bound else psi_scattering(sys, label.k)


def schrodinger_residual(sys: MorseSystem, psi, E, x, h=None):
    """|-hbar^2 psi''/2m + V psi - E psi| / max(term magnitudes), five-point second difference."""
    x = np.asarray(x, dtype=float)
    h = 1e-3 / sys.alpha if h is None else h
    if not h > 0 or np.any(x + h == x):
        raise DomainError("finite-difference step underflows")
    f = [np.asarray(psi(x + j * h)) for j in (-2, -1, 0, 1, 2)]
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    kin = -sys.hbar**2 * d2 / (2 * sys.mass)
    pot = sys.potential(x) * f[2]
    en = E * f[2]
    scale = np.maximum(np.maximum(np.abs(kin), np.abs(pot)), np.abs(en))
    res = np.abs(kin + pot - en) / scale
    return float(res) if res.ndim == 0 else res


# ---------------------------------------------------------------------------
# brute-force Wigner transform
# ---------------------------------------------------------------------------

DECAY_V = 200.0
PANEL = 0.5


def _transform_range(sys, x):
    """|y| beyond which psi(x -+ hbar y/2) is negligible on the deep forbidden side."""
    v = float(v_of_x(x, sys))
    y_cut = 2 / (sys.alpha * sys.hbar) * math.log(max(DECAY_V / v, 1.0))
    return y_cut + 2 / (sys.alpha * sys.hbar)


def _taper(y, Y, width):
    out = np.ones_like(y)
    edge = np.abs(y) > Y - width
    out[edge] = 0.5 * (1 + np.cos(np.pi * (np.abs(y[edge]) - (Y - width)) / width))
    return out


def _gl_transform(psiL, psiR, x, p, hbar, Y, per_panel, window_width=None):
    xg, wg = sf.gauss_legendre(per_panel)
    n = int(math.ceil(2 * Y / PANEL))
    left = -Y + PANEL * np.arange(n)
    y = (left[:, None] + PANEL * (xg[None, :] + 1) / 2).ravel()
    w = np.tile(wg * PANEL / 2, n)
    g = np.asarray(psiL(x + hbar * y / 2), dtype=complex) * np.conj(np.asarray(psiR(x - hbar * y / 2), dtype=complex))
    if window_width is not None:
        g = g * _taper(y, n * PANEL / 2, window_width)
    kern = np.exp(-1j * np.outer(p, y))
    return kern @ (g * w), np.abs(g) @ w


def wigner_transform_numeric(sys: MorseSystem, psiL, psiR, x, p, window=None, rel_tol=1e-11,
                             nodes_per_panel=16, max_doublings=4):
    """int exp(-i y p) psi_L(x + hbar y/2) conj(psi_R(x - hbar y/2)) dy at one x and one or many p.

    Integrated on |y| <= Y by composite Gauss-Legendre with node doubling. Y is
    where one of the two factors reaches v = 200 on the forbidden side. If the
    integrand has not decayed there, a window is needed: ``window='auto'``
    multiplies by a cosine taper over the outer quarter and confirms the
    result is stable when Y doubles; ``window=None`` raises
    WindowingRequiredError.
    """
    p_arr = np.atleast_1d(np.asarray(p, dtype=float))
    Y = _transform_range(sys, x)
    ends = np.array([-Y, Y])
    g_end = np.asarray(psiL(x + sys.hbar * ends / 2)) * np.conj(np.asarray(psiR(x - sys.hbar * ends / 2)))
    mid = np.linspace(-Y, Y, 201)
    g_mid = np.asarray(psiL(x + sys.hbar * mid / 2)) * np.conj(np.asarray(psiR(x - sys.hbar * mid / 2)))
    decays = np.max(np.abs(g_end)) <= 1e-14 * max(np.max(np.abs(g_mid)), 1e-300)

    def run(Y, width):
        per = nodes_per_panel
        prev, _ = _gl_transform(psiL, psiR, x, p_arr, sys.hbar, Y, per, width)
        for _ in range(max_doublings):
            per *= 2
            cur, l1 = _gl_transform(psiL, psiR, x, p_arr, sys.hbar, Y, per, width)
            if np.all(np.abs(cur - prev) <= rel_tol * np.abs(cur) + 1e3 * np.finfo(float).eps * l1):
                return cur
            prev = cur
        raise ConvergenceError("Wigner transform quadrature did not converge")

    if decays:
        out = run(Y, None)
    elif window is None:
        raise WindowingRequiredError("integrand has not decayed at the cut; pass window='auto'")
    elif window == "auto":
        out = run(Y, Y / 2)
        wide = run(2 * Y, Y)
        if np.any(np.abs(wide - out) > 1e3 * rel_tol * np.maximum(np.abs(wide), 1e-300)):
            raise ConvergenceError("windowed transform changes when the window doubles")
        out = wide
    else:
        raise DomainError(f"unknown window {window!r}")
    return complex(out[0]) if np.ndim(p) == 0 else out


def wigner_oracle(sys: MorseSystem, left: SpectralLabel, right: SpectralLabel, x, p, **kw):
    return wigner_transform_numeric(sys, wavefunction_for(sys, left), wavefunction_for(sys, right), x, p, **kw)


# ---------------------------------------------------------------------------
# double series from the Kummer expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesTail:
    terms: int
    last_magnitude: float


MAX_SHELL = 200
DIVERGENCE_RUN = 6


def _series_blocks(sys, kL, kR):
    out = []
    for sL in (1, -1):
        for sR in (1, -1):
            qL = sL * 1j * kL / sys.alpha
            qR = sR * 1j * kR / sys.alpha
            AL = kummer_coefficient(sys, kL)
            AR = kummer_coefficient(sys, kR)
            AL = AL if sL > 0 else AL.conjugate()
            AR = AR if sR > 0 else AR.conjugate()
            out.append((AL * AR, qL, qR, 0.5 - sys.b / 2 + qL, 1 + 2 * qL, 0.5 - sys.b / 2 + qR, 1 + 2 * qR))
    return out


def wigner_series(sys: MorseSystem, v, p, kL, kR, tol=1e-10, shells=None):
    """Wigner function of two scattering states (Kummer form, C = 1) as the double series

        (4/alpha hbar) sum_{blocks} A_L A_R v^(qL + qR) sum_{m,n} (chi_L)_m (chi_R)_n / ((s_L)_m (s_R)_n)
            v^(m+n) / (m! n!) K_{m - n + 2ip/alpha hbar + qL - qR}(v)

    over the four sign choices q = +-ik/alpha (A -> conj(A), chi -> conj(chi) for the minus sign).
    Shells m + n = M are added until one falls below ``tol`` relative to the
    partial sum. With ``shells`` given, exactly that many shells are summed.
    Growing shells raise SeriesDivergenceError.
    """
    if not v > 0:
        raise DomainError("series needs v > 0")
    blocks = _series_blocks(sys, kL, kR)
    top = MAX_SHELL if shells is None else shells
    P = 2j * p / (sys.alpha * sys.hbar)
    lv = math.log(v)
    total = 0j
    history = []
    # Pochhammer ratios and 1/n! per block side, grown as needed
    for M in range(top + 1):
        shell = 0j
        for coef, qL, qR, chiL, sgL, chiR, sgR in blocks:
            m = np.arange(M + 1)
            n = M - m
            rl = np.array([complex(sf.pochhammer(chiL, j) / sf.pochhammer(sgL, j)) / math.factorial(j) for j in m])
            rr = np.array([complex(sf.pochhammer(chiR, j) / sf.pochhammer(sgR, j)) / math.factorial(j) for j in n])
            order = m - n + P + qL - qR
            K = np.asarray(sf.bessel_k(order, np.full(order.shape, float(v))))
            shell += coef * np.exp((qL + qR + M) * lv) * np.sum(rl * rr * K)
        total += shell
        mag = abs(shell)
        history.append(mag)
        if shells is None and M >= 2 and mag <= tol * abs(total):
            return 4 / (sys.alpha * sys.hbar) * total, SeriesTail(M + 1, mag)
        if shells is None and M >= 10 + DIVERGENCE_RUN:
            recent = history[-DIVERGENCE_RUN - 1:]
            if all(b > a for a, b in zip(recent, recent[1:])) and recent[-1] > recent[0] * 2:
                raise SeriesDivergenceError(
                    f"series shells grow: |shell {M}| = {mag:.3g} > |shell {M - DIVERGENCE_RUN}| = {recent[0]:.3g}"
                )
    if shells is not None:
        return 4 / (sys.alpha * sys.hbar) * total, SeriesTail(top + 1, history[-1])
    raise ConvergenceError(f"series did not converge within {MAX_SHELL} shells")


def wigner_bound_bessel(sys: MorseSystem, nu: int, x, p):
    """Diagonal bound-state Wigner function as a finite Bessel-K double sum in v.

    (4/alpha hbar) v^(b - 2nu - 1) sum_{l1,l2} C(b-nu-1, nu-l1) C(b-nu-1, nu-l2) (-v)^(l1+l2) / (l1! l2!)
        K_{l1 - l2 + 2ip/alpha hbar}(v),
    which is the transform of the raw (unnormalized) state exp(-v/2) v^s L_nu^{2s}(v).
    """
    SpectralLabel.bound(nu).validate(sys)
    v = float(v_of_x(x, sys))
    scalar = np.ndim(p) == 0
    p = np.atleast_1d(np.asarray(p, dtype=float))
    total = np.zeros(p.shape, dtype=complex)
    for l1 in range(nu + 1):
        for l2 in range(nu + 1):
            c = (sf.binom_gen(sys.b - nu - 1, nu - l1) * sf.binom_gen(sys.b - nu - 1, nu - l2)
                 * (-v) ** (l1 + l2) / (math.factorial(l1) * math.factorial(l2)))
            total = total + c * np.asarray(sf.bessel_k(l1 - l2 + 2j * p / (sys.alpha * sys.hbar), v))
    out = 4 / (sys.alpha * sys.hbar) * v ** (sys.b - 2 * nu - 1) * total
    return complex(out[0]) if scalar else out
