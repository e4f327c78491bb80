"""Checks of candidate Wigner functions against the star-eigenvalue equations,
plus expectation values and stationary superpositions.

For the Morse potential the left equation H * rho = E_L rho reads

    (hbar^2/8m) rho'' + (i hbar p/2m) rho'
        = (hbar^2 kappa^2/2m) e^{-2 alpha x} rho(x, p - i hbar alpha)
          - (beta hbar^2 kappa^2/2m) e^{-alpha x} rho(x, p - i hbar alpha/2)
          + (p^2/2m - E_L) rho,

and the right equation rho * H = E_R rho flips the sign of the first-derivative
term and of the imaginary momentum shifts. The shifted values come from the
contour representation evaluated at complex momentum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, NormalizationRequiredError, UnsupportedSourceError
from .field import WignerField
from .mellin import ContourSpec, wigner_column
from .model import MorseSystem, SpectralLabel, energy_of

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class StarResidualReport:
    """Pointwise relative residuals; ``defects`` keeps the signed complex values."""

    side: str
    points: tuple
    residuals: tuple
    defects: tuple
    max_residual: float

    def to_dict(self):
        return {
            "side": self.side,
            "points": [list(pt) for pt in self.points],
            "residuals": list(self.residuals),
            "defects": [[d.real, d.imag] for d in self.defects],
            "max_residual": self.max_residual,
        }


def _perturbation(alpha, delta, xs):
    """Factor (1 + delta cos(alpha x)) and its first two x-derivatives."""
    c = np.cos(alpha * xs)
    s = np.sin(alpha * xs)
    return 1 + delta * c, -delta * alpha * s, -delta * alpha**2 * c


def _side_defect(sys, side, p, E, xs, rho, d1, d2, rho_full, rho_half):
    sgn = 1 if side == LEFT else -1
    hb, m = sys.hbar, sys.mass
    pot = hb**2 * sys.kappa**2 / (2 * m)
    terms = [
        hb**2 / (8 * m) * d2,
        sgn * 1j * hb * p / (2 * m) * d1,
        -pot * np.exp(-2 * sys.alpha * xs) * rho_full,
        sys.beta * pot * np.exp(-sys.alpha * xs) * rho_half,
        -(p**2 / (2 * m) - E) * rho,
    ]
    total = sum(terms)
    scale = np.max(np.abs(np.array(terms)), axis=0)
    return total / scale


def star_residual_column(sys: MorseSystem, left: SpectralLabel, right: SpectralLabel, xs, p,
                         spec: ContourSpec = ContourSpec(), family=None, energy_left=None,
                         energy_right=None, scale=1.0, perturb=0.0, sides=(LEFT, RIGHT)):
    """Relative complex defects of both star-eigenvalue equations at (xs, p) for real p.

    ``energy_left``/``energy_right`` replace the eigenvalues in the equations
    only (negative controls). ``scale`` multiplies rho; ``perturb`` multiplies it by
    (1 + perturb cos(alpha x)), a deliberate non-solution.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    EL = energy_of(left, sys) if energy_left is None else energy_left
    ER = energy_of(right, sys) if energy_right is None else energy_right
    f0, f1, f2 = _perturbation(sys.alpha, perturb, xs)
    base = wigner_column(sys, left, right, xs, p, spec, family, orders=(0, 1, 2)).value * scale
    r0, r1, r2 = base
    rho = r0 * f0
    d1 = r1 * f0 + r0 * f1
    d2 = r2 * f0 + 2 * r1 * f1 + r0 * f2
    out = {}
    for side in sides:
        sgn = -1 if side == LEFT else 1
        full = wigner_column(sys, left, right, xs, p + sgn * 1j * sys.hbar * sys.alpha, spec, family).value[0]
        half = wigner_column(sys, left, right, xs, p + sgn * 0.5j * sys.hbar * sys.alpha, spec, family).value[0]
        E = EL if side == LEFT else ER
        out[side] = _side_defect(sys, side, p, E, xs, rho, d1, d2, full * scale * f0, half * scale * f0)
    return out


def star_residual(sys, left, right, x, p, source="closed", spec: ContourSpec = ContourSpec(), **kw):
    """(left residual, right residual) at one phase-space point."""
    if source != "closed":
        raise UnsupportedSourceError(
            f"source {source!r} cannot supply rho at complex momentum; only 'closed' is supported"
        )
    d = star_residual_column(sys, left, right, [x], p, spec, **kw)
    return float(abs(d[LEFT][0])), float(abs(d[RIGHT][0]))


def star_residual_grid(sys, left, right, xs, ps, source="closed", spec: ContourSpec = ContourSpec(), **kw):
    """StarResidualReport for each side over the grid xs x ps."""
    if source != "closed":
        raise UnsupportedSourceError(
            f"source {source!r} cannot supply rho at complex momentum; only 'closed' is supported"
        )
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    cols = [star_residual_column(sys, left, right, xs, float(p), spec, **kw) for p in ps]
    reports = []
    for side in (LEFT, RIGHT):
        pts, res, dfx = [], [], []
        for i, x in enumerate(xs):
            for j, p in enumerate(ps):
                d = complex(cols[j][side][i])
                pts.append((float(x), float(p)))
                dfx.append(d)
                res.append(abs(d))
        reports.append(StarResidualReport(side, tuple(pts), tuple(res), tuple(dfx), max(res)))
    return tuple(reports)


STANDARD_X = np.linspace(-1.0, 3.0, 5)
STANDARD_P = np.linspace(-3.0, 3.0, 5)


def standard_grid(sys: MorseSystem):
    """5 x 5 grid spanning alpha x in [-1, 3] and p in [-3, 3] hbar alpha."""
    return STANDARD_X / sys.alpha, STANDARD_P * sys.hbar * sys.alpha


# ---------------------------------------------------------------------------
# expectation values and superpositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expectation:
    value: float
    truncation: float


def expectation(field: WignerField, symbol) -> Expectation:
    """int int rho Q dx dp by the trapezoid rule over a normalized field.

    ``truncation`` is the trapezoid integral of |rho Q| over the outermost grid
    lines, a proxy for the mass lost outside the grid.
    """
    if not field.normalized:
        raise NormalizationRequiredError("expectation values need a normalized field (see normalize_field)")
    X, P = np.meshgrid(field.x, field.p, indexing="ij")
    integrand = field.values * np.asarray(symbol(X, P))
    value = np.trapezoid(np.trapezoid(integrand, field.p, axis=1), field.x)
    a = np.abs(integrand)
    dx = np.diff(field.x).mean() if len(field.x) > 1 else 0.0
    dp = np.diff(field.p).mean() if len(field.p) > 1 else 0.0
    edge = (np.trapezoid(a[0], field.p) + np.trapezoid(a[-1], field.p)) * dx
    edge += (np.trapezoid(a[:, 0], field.x) + np.trapezoid(a[:, -1], field.x)) * dp
    return Expectation(float(value.real), float(edge))


def compose_stationary(terms, t, fields, hbar=None) -> WignerField:
    """sum_k C_k exp(-i (E_L - E_R) t / hbar) rho_k for terms (C_k, left_k, right_k).

    ``fields[k]`` is the field of term k; all must share one grid and system.
    """
    if len(terms) != len(fields) or not terms:
        raise DomainError("need one field per term")
    first = fields[0]
    sys = first.system
    hb = sys.hbar if hbar is None else hbar
    total = np.zeros(first.shape, dtype=complex)
    err = np.zeros(first.shape)
    for (coef, left, right), f in zip(terms, fields):
        first.check_grid(f)
        if f.left != left or f.right != right:
            raise DomainError(f"field labels {f.left}/{f.right} do not match term {left}/{right}")
        phase = np.exp(-1j * (energy_of(left, sys) - energy_of(right, sys)) * t / hb)
        total = total + coef * phase * f.values
        err = err + abs(coef) * f.errors
    return replace(first, values=total, errors=err, source="superposition", normalized=False,
                   failed=np.logical_or.reduce([f.failed for f in fields]))


def period(sys: MorseSystem, a: SpectralLabel, b: SpectralLabel) -> float:
    """2 pi hbar / |E_a - E_b|."""
    d = energy_of(a, sys) - energy_of(b, sys)
    if d == 0:
        return math.inf
    return 2 * math.pi * sys.hbar / abs(d)
