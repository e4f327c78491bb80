"""Mellin-space factors w(t, k) solving the Morse difference equation

    w(t - 1) - (b/2) w(t - 1/2) = (t^2 + k^2 / 4 alpha^2) w(t).

Every family is evaluated with its literal prefactors; the solutions are only
defined up to a t-independent constant, so comparisons between families go
through a scalar calibration (see ``constant_ratio``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun as sf
from .errors import DomainError, GammaPoleError, ResonanceError
from .model import MorseSystem, SpectralLabel

POLE_THRESHOLD = 1e-8

LIOUVILLE = "liouville"
B1 = "b1"
B2 = "b2"
INTEGER = "integer"
REAL = "real"
BOUND = "bound"
FAMILIES = (LIOUVILLE, B1, B2, INTEGER, REAL, BOUND)


def _gammas(*args):
    sf.check_poles(*args, threshold=POLE_THRESHOLD)
    return [np.asarray(sf.gamma_c(a)) for a in args]


def _out(value, t):
    return complex(value) if np.ndim(t) == 0 else value


def _resonance_check(q2, what="2ik/alpha"):
    """Reject wavenumbers where 2ik/alpha is (numerically) an integer."""
    q2 = complex(q2)
    n = round(q2.real)
    if abs(q2 - n) < POLE_THRESHOLD:
        raise ResonanceError(f"{what} = {q2} is an integer; the factor formula degenerates")


def w_liouville(t, k, alpha=1.0):
    """Gamma(-t + ik/2a) Gamma(-t - ik/2a), the b = 0 factor."""
    t = np.asarray(t, dtype=complex)
    h = 1j * k / (2 * alpha)
    g1, g2 = _gammas(-t + h, -t - h)
    return _out(g1 * g2, t)


def w_b1(t, k, alpha=1.0):
    t = np.asarray(t, dtype=complex)
    h = 1j * k / (2 * alpha)
    g = _gammas(-t + h, -t + 0.5 - h, -t + 0.5 + h, -t - h)
    return _out(g[0] * g[1] + g[2] * g[3], t)


def w_b2(t, k, alpha=1.0, form="vdef"):
    """The b = 2 factor in either of its two printed forms.

    ``form='vdef'``: (t + 1/4) prod Gamma(-t +- h) - prod Gamma(-t + 1/2 +- h).
    ``form='alt'``: the three-term form mirroring the b = 1 pattern. The two
    differ by a t-independent constant.
    """
    t = np.asarray(t, dtype=complex)
    h = 1j * k / (2 * alpha)
    if form == "vdef":
        g = _gammas(-t + h, -t - h, -t + 0.5 + h, -t + 0.5 - h)
        val = (t + 0.25) * g[0] * g[1] - g[2] * g[3]
    elif form == "alt":
        q = 2j * k / alpha
        g = _gammas(-t + h, -t + 1 - h, -t + 0.5 + h, -t + 0.5 - h, -t + 1 + h, -t - h)
        val = (q + 1) * g[0] * g[1] + 2 * q * g[2] * g[3] + (q - 1) * g[4] * g[5]
    else:
        raise DomainError(f"unknown b=2 form {form!r}")
    return _out(val, t)


def _as_int_b(b):
    if b < 0 or b != int(b):
        raise DomainError(f"integer family needs b in N0, got {b}")
    return int(b)


def coeff_cnb(n: int, b, k, alpha=1.0) -> complex:
    """C_n^b = (-1)^n (2n - b + 2ik/a) (-b)_{b-n} / ((b-n)! (n - b + 2ik/a)_{b+1})."""
    b = _as_int_b(b)
    if not 0 <= n <= b:
        raise DomainError(f"coefficient index n={n} outside 0..{b}")
    q = 2j * k / alpha
    den = complex(sf.pochhammer(n - b + q, b + 1))
    if abs(den) < POLE_THRESHOLD:
        raise ResonanceError(f"C_{n}^{b}: resonant wavenumber k={k}")
    num = (-1) ** n * (2 * n - b + q) * complex(sf.pochhammer(-b, b - n))
    return num / (math.factorial(b - n) * den)


def w_integer(t, k, b, alpha=1.0):
    """sum_n C_n^b Gamma(-t + n/2 + ik/2a) Gamma(-t - n/2 + b/2 - ik/2a) for integer b."""
    b = _as_int_b(b)
    t = np.asarray(t, dtype=complex)
    h = 1j * k / (2 * alpha)
    total = np.zeros(t.shape, dtype=complex)
    for n in range(b + 1):
        g1, g2 = _gammas(-t + n / 2 + h, -t - n / 2 + b / 2 - h)
        total = total + coeff_cnb(n, b, k, alpha) * g1 * g2
    return _out(total, t)


def real_branch(t):
    """Side of the cut [1, inf) used for 2F1(...; 2) in ``w_real``.

    The printed combination is the same function on either side; the side
    with Im(t) of the opposite sign avoids cancellation growing like
    exp(2 pi |Im t|) between the two terms.
    """
    t = np.asarray(t, dtype=complex)
    return np.where(t.imag > 0, -1.0, 1.0)


def w_real(t, k, b, alpha=1.0, return_info=False):
    """Factor for arbitrary real b: two terms 4^(t +- q/2) Gamma(-+2q)/Gamma(1/2 - b/2 -+ q)
    Gamma(-2t +- q) 2F1(1/2 - b/2 +- q, -2t +- q; 1 +- 2q; 2) with q = ik/alpha.

    With ``return_info`` also returns the boolean mask of elements where the
    hypergeometric connection formula was degenerate and Cauchy interpolation
    was used.
    """
    t = np.asarray(t, dtype=complex)
    q = 1j * k / alpha
    _resonance_check(2 * q)
    br = real_branch(t)
    tt = np.atleast_1d(t)
    br = np.atleast_1d(br)
    total = np.zeros(tt.shape, dtype=complex)
    flags = np.zeros(tt.shape, dtype=bool)
    for sgn in (1, -1):
        qs = sgn * q
        (g_t,) = _gammas(-2 * tt + qs)
        pref = complex(sf.gamma_c(-2 * qs)) * complex(sf.rgamma_c(0.5 - b / 2 - qs))
        f, info = sf.gauss_2f1(0.5 - b / 2 + qs, -2 * tt + qs, 1 + 2 * qs, 2.0, branch=br, return_info=True)
        total = total + np.exp((tt + qs / 2) * math.log(4)) * pref * g_t * f
        flags |= info.perturbed
    value = _out(total.reshape(t.shape), t)
    if return_info:
        return value, flags.reshape(t.shape)
    return value


def bound_wavenumber(nu: int, b, alpha=1.0) -> complex:
    return 1j * alpha * (nu - b / 2 + 0.5)


def w_bound(t, nu: int, b, alpha=1.0):
    """sum_l (-2)^l 2^(2t) / l! C(b - nu - 1, nu - l) Gamma(-2t + l + b/2 - nu - 1/2).

    Solves the difference equation with k = i alpha (nu - b/2 + 1/2).
    """
    if nu < 0 or nu != int(nu):
        raise DomainError("nu must be a non-negative integer")
    if not nu - b / 2 + 0.5 < 0:
        raise DomainError(f"nu={nu} is not a bound state for b={b}")
    nu = int(nu)
    t = np.asarray(t, dtype=complex)
    total = np.zeros(t.shape, dtype=complex)
    for l in range(nu + 1):
        (g,) = _gammas(-2 * t + l + b / 2 - nu - 0.5)
        total = total + (-2.0) ** l / math.factorial(l) * sf.binom_gen(b - nu - 1, nu - l) * g
    return _out(np.exp(2 * t * math.log(2)) * total, t)


@dataclass(frozen=True)
class FactorSolution:
    """A left or right Mellin factor with its family tag and spectral data.

    For the bound family ``k`` holds the equivalent imaginary wavenumber.
    """

    family: str
    b: float
    k: complex
    alpha: float = 1.0
    nu: int | None = None
    form: str = "vdef"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown factor family {self.family!r}")
        if self.family == LIOUVILLE and self.b != 0:
            raise DomainError("Liouville factor needs b = 0")
        if self.family == B1 and self.b != 1:
            raise DomainError("b1 factor needs b = 1")
        if self.family == B2 and self.b != 2:
            raise DomainError("b2 factor needs b = 2")
        if self.family == INTEGER:
            _as_int_b(self.b)
        if self.family == BOUND:
            if self.nu is None or self.nu < 0 or not self.nu - self.b / 2 + 0.5 < 0:
                raise DomainError(f"invalid bound label nu={self.nu} for b={self.b}")

    def __call__(self, t):
        f = self.family
        if f == LIOUVILLE:
            return w_liouville(t, self.k, self.alpha)
        if f == B1:
            return w_b1(t, self.k, self.alpha)
        if f == B2:
            return w_b2(t, self.k, self.alpha, self.form)
        if f == INTEGER:
            return w_integer(t, self.k, self.b, self.alpha)
        if f == REAL:
            return w_real(t, self.k, self.b, self.alpha)
        return w_bound(t, self.nu, self.b, self.alpha)

    def pole_lines(self) -> np.ndarray:
        """Real parts (in t) where the pole sequences of the Gamma factors start.

        Each sequence runs to the right in steps of 1 (or 1/2 for the 2t
        families), so the minimum is the leftmost pole.
        """
        h = 1j * self.k / (2 * self.alpha)
        f = self.family
        if f == BOUND:
            return np.array([(l + self.b / 2 - self.nu - 0.5) / 2 for l in range(self.nu + 1)])
        if f == REAL:
            starts = [h, -h]
        elif f == LIOUVILLE:
            starts = [h, -h]
        elif f in (B1, B2):
            starts = [h, -h, 0.5 + h, 0.5 - h]
            if f == B2 and self.form == "alt":
                starts += [1 + h, 1 - h]
        else:
            starts = [n / 2 + h for n in range(int(self.b) + 1)]
            starts += [self.b / 2 - n / 2 - h for n in range(int(self.b) + 1)]
        return np.array([complex(s).real for s in starts])

    @property
    def energy_term(self) -> complex:
        """k^2 / 4 alpha^2, the constant in the difference equation."""
        return self.k**2 / (4 * self.alpha**2)

    @classmethod
    def for_label(cls, sys: MorseSystem, label: SpectralLabel, family: str | None = None, form="vdef"):
        """Factor for a spectral label. Scattering labels default to the real-b family."""
        b = sys.b
        if label.is_bound:
            label.validate(sys)
            if family not in (None, BOUND):
                raise DomainError("bound labels only admit the bound family")
            return cls(BOUND, b, bound_wavenumber(label.nu, b, sys.alpha), sys.alpha, label.nu)
        fam = REAL if family is None else family
        if fam == BOUND:
            raise DomainError("scattering label cannot use the bound family")
        return cls(fam, b, label.k, sys.alpha, None, form)


@dataclass(frozen=True)
class DifferenceResidualReport:
    samples: tuple
    residuals: tuple
    max_residual: float

    def to_dict(self):
        return {
            "samples": [[z.real, z.imag] for z in self.samples],
            "residuals": list(self.residuals),
            "max_residual": self.max_residual,
        }


def difference_residual(w, t, b=None, k=None, alpha=None):
    """Relative residual of the difference equation at t.

    ``w`` is a FactorSolution, or any callable together with explicit b, k
    and alpha. The residual is |w(t-1) - (b/2) w(t-1/2) - (t^2 + k^2/4a^2) w(t)|
    divided by the largest of the three term magnitudes.
    """
    if isinstance(w, FactorSolution):
        b = w.b if b is None else b
        k = w.k if k is None else k
        alpha = w.alpha if alpha is None else alpha
    if b is None or k is None:
        raise DomainError("difference_residual needs b and k for a bare callable")
    alpha = 1.0 if alpha is None else alpha
    t = np.asarray(t, dtype=complex)
    a = np.asarray(w(t - 1))
    m = (b / 2) * np.asarray(w(t - 0.5))
    r = (t**2 + k**2 / (4 * alpha**2)) * np.asarray(w(t))
    scale = np.maximum(np.maximum(np.abs(a), np.abs(m)), np.abs(r))
    res = np.abs(a - m - r) / scale
    return float(res) if res.ndim == 0 else res


def residual_report(w, ts, **kw) -> DifferenceResidualReport:
    ts = np.asarray(ts, dtype=complex).ravel()
    res = np.atleast_1d(difference_residual(w, ts, **kw))
    return DifferenceResidualReport(tuple(complex(z) for z in ts), tuple(float(r) for r in res), float(res.max()))


def constant_ratio(f_vals, g_vals):
    """Least-squares constant c with f ~ c g, and the relative spread of f/g.

    The spread is max |f - c g| / max |f|, which is zero exactly when the
    two sequences are proportional.
    """
    f = np.asarray(f_vals, dtype=complex).ravel()
    g = np.asarray(g_vals, dtype=complex).ravel()
    c = np.vdot(g, f) / np.vdot(g, g)
    spread = np.max(np.abs(f - c * g)) / np.max(np.abs(f))
    return complex(c), float(spread)


def ratio_variance(f_vals, g_vals) -> float:
    """mean |r - mean r|^2 / |mean r|^2 for the pointwise ratio r = f/g."""
    r = np.asarray(f_vals, dtype=complex).ravel() / np.asarray(g_vals, dtype=complex).ravel()
    m = r.mean()
    return float(np.mean(np.abs(r - m) ** 2) / abs(m) ** 2)


def sample_t(n, seed=0, re=-0.25, im_range=3.0):
    """Reproducible contour-typical sample points t = re + i y."""
    rng = np.random.default_rng(seed)
    return re + 1j * rng.uniform(-im_range, im_range, n)


__all__ = [
    "FAMILIES", "FactorSolution", "DifferenceResidualReport", "GammaPoleError",
    "w_liouville", "w_b1", "w_b2", "coeff_cnb", "w_integer", "w_real", "w_bound",
    "bound_wavenumber", "difference_residual", "residual_report", "constant_ratio", "ratio_variance", "sample_t",
]
