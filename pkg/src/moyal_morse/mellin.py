"""Numerical inverse Mellin transform along a vertical contour and the Wigner
functions built from it.

The Wigner function is

    rho_LR(x, p) = (1/2 pi i) int_{c - i inf}^{c + i inf} u^-s W(s, p) ds,
    W(s, p) = w_L(s - ip/2 alpha hbar, k_L) w_R(s + ip/2 alpha hbar, k_R),

with u = 16 exp(4 alpha x) alpha^4 / kappa^4 and the contour to the left of
every pole of W. Momentum may be complex, which is how the translated
arguments rho(x, p -+ i hbar alpha) are obtained.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import specfun as sf
from .errors import ContourError, ConvergenceError, DomainError, MorseError, NormalizationRequiredError
from .factors import FactorSolution
from .field import WignerField
from .model import MorseSystem, SpectralLabel, log_u_of_x

PANEL_WIDTH = 0.5
POLE_MARGIN = 0.1
DEFAULT_OFFSET = 0.5
MAX_OFFSET = -0.25
GROWTH = 1.5


@dataclass(frozen=True)
class ContourSpec:
    """Vertical contour Re s = c, truncated to |Im s| <= half_length.

    ``c=None`` places the contour at (leftmost pole) - 0.5, capped at -0.25.
    ``half_length`` is the starting truncation; it grows by 1.5x until the
    integrand at the ends drops below rel_tol times its peak.
    """

    c: float | None = None
    half_length: float = 4.0
    nodes_per_unit: int = 32
    rel_tol: float = 1e-10
    max_half_length: float = 200.0
    max_doublings: int = 3

    def __post_init__(self):
        if self.c is not None and not math.isfinite(self.c):
            raise DomainError("contour offset must be finite")
        if not self.half_length > 0:
            raise DomainError("half_length must be > 0")
        if self.nodes_per_unit < 8:
            raise DomainError("nodes_per_unit must be >= 8")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be > 0")

    def to_dict(self):
        return {"c": self.c, "half_length": self.half_length, "nodes_per_unit": self.nodes_per_unit,
                "rel_tol": self.rel_tol}


@dataclass(frozen=True)
class MellinResult:
    value: complex | np.ndarray
    error: float | np.ndarray
    c: float
    half_length: float
    nodes: int
    l1: float = 0.0


def place_contour(poles, c=None) -> float:
    """Pick (or validate) the contour offset against the real parts of the poles."""
    poles = np.atleast_1d(np.asarray(poles, dtype=float))
    leftmost = poles.min() if poles.size else math.inf
    if c is None:
        c = min(leftmost - DEFAULT_OFFSET, MAX_OFFSET)
    if leftmost - c < POLE_MARGIN:
        raise ContourError(
            f"contour Re s = {c:g} is within {POLE_MARGIN} of the pole line at {leftmost:g}; "
            "move it left"
        )
    return float(c)


def _panel_rule(half_length, per_panel):
    xg, wg = sf.gauss_legendre(per_panel)
    n_panels = int(round(2 * half_length / PANEL_WIDTH))
    left = -half_length + PANEL_WIDTH * np.arange(n_panels)
    y = (left[:, None] + PANEL_WIDTH * (xg[None, :] + 1) / 2).ravel()
    w = np.tile(wg * PANEL_WIDTH / 2, n_panels)
    return y, w


def _round_up(T):
    return PANEL_WIDTH * math.ceil(T / PANEL_WIDTH - 1e-12)


def _contour_quadrature(W, log_u, c, spec, qs):
    """Values (n_weights, n_u) of (1/2 pi) int u^-s W(s) q(s) dy on s = c + iy.

    |u^-s| does not depend on y, so the truncation point is the same for every
    u; node doubling is repeated until all entries converge.
    """
    log_u = np.atleast_1d(np.asarray(log_u, dtype=float))

    def integrand(y):
        s = c + 1j * y
        Wv = np.asarray(W(s), dtype=complex)
        base = np.exp(-np.outer(log_u, s)) * Wv[None, :]
        return np.array([base * q(s) for q in qs])

    T = _round_up(spec.half_length)
    per_panel = max(4, int(round(spec.nodes_per_unit * PANEL_WIDTH)))
    while True:
        y, w = _panel_rule(T, per_panel)
        vals = integrand(np.concatenate([y, [-T, T]]))
        body, ends = vals[..., :-2], vals[..., -2:]
        peak = np.max(np.abs(body), axis=-1)
        if np.all(np.abs(ends) <= spec.rel_tol * peak[..., None]) or not np.any(peak):
            break
        T = _round_up(GROWTH * T)
        if T > spec.max_half_length:
            raise ContourError(f"integrand does not decay by |Im s| = {spec.max_half_length}; "
                               "raise max_half_length")
    coarse = body @ w
    eps = np.finfo(float).eps
    scale = 1 / (2 * math.pi)
    for _ in range(spec.max_doublings):
        per_panel *= 2
        y, w = _panel_rule(T, per_panel)
        body = integrand(y)
        fine = body @ w
        l1 = np.abs(body) @ w
        err = np.abs(fine - coarse)
        if np.all(err <= spec.rel_tol * np.abs(fine) + 1e3 * eps * l1):
            return fine * scale, err * scale, l1 * scale, T, len(y)
        coarse = fine
    raise ConvergenceError(f"contour quadrature did not converge with {len(y)} nodes")


def inverse_mellin(W, u=None, spec: ContourSpec = ContourSpec(), poles=(), weights=None, log_u=None):
    """(1/2 pi i) int u^-s W(s) q(s) ds along Re s = c for each weight q.

    ``W`` maps an array of s to Mellin-image values. ``poles`` lists the real
    parts of its pole lines, all of which must lie to the right of the
    contour. ``u`` (or ``log_u``) may be an array; W is then evaluated once
    and shared. ``weights`` is an optional sequence of callables q(s). The
    value has shape (n_weights, n_u) unless both are scalar/absent, in which
    case it is a complex number.
    """
    if log_u is None:
        if u is None or not np.all(np.asarray(u) > 0):
            raise DomainError("inverse_mellin needs u > 0")
        log_u = np.log(u)
    c = place_contour(poles, spec.c)
    qs = [lambda s: 1.0] if weights is None else list(weights)
    value, error, l1, T, nodes = _contour_quadrature(W, log_u, c, spec, qs)
    if weights is None and np.ndim(log_u) == 0:
        return MellinResult(complex(value[0, 0]), float(error[0, 0]), c, T, nodes, float(l1[0, 0]))
    return MellinResult(value, error, c, T, nodes, float(l1.max()))


@dataclass
class MellinIntegrand:
    """s -> u^-s W(s, p) with its factor pair and pole inventory."""

    left: FactorSolution
    right: FactorSolution
    log_u: float
    p: complex
    alpha: float
    hbar: float
    poles: np.ndarray = field(init=False)

    def __post_init__(self):
        P = self.p / (2 * self.alpha * self.hbar)
        self._shift = 1j * P
        # left factor argument t = s - iP, so a pole at t0 sits at s = t0 + iP
        lp = self.left.pole_lines() + (1j * P).real
        rp = self.right.pole_lines() - (1j * P).real
        self.poles = np.sort(np.concatenate([lp, rp]))

    @property
    def leftmost_pole(self) -> float:
        return float(self.poles.min())

    def mellin(self, s):
        s = np.asarray(s, dtype=complex)
        return np.asarray(self.left(s - self._shift)) * np.asarray(self.right(s + self._shift))

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        return np.exp(-s * self.log_u) * self.mellin(s)


def assemble_integrand(sys: MorseSystem, left: SpectralLabel, right: SpectralLabel, x, p,
                       family=None) -> MellinIntegrand:
    """Integrand for rho_LR(x, p). ``family`` overrides the scattering factor family."""
    fl = FactorSolution.for_label(sys, left, None if left.is_bound else family)
    fr = FactorSolution.for_label(sys, right, None if right.is_bound else family)
    return MellinIntegrand(fl, fr, float(log_u_of_x(x, sys)), complex(p), sys.alpha, sys.hbar)


def x_weight(alpha, order):
    """Integrand weight implementing d^order/dx^order of u^-s."""
    return lambda s: (-4 * alpha * s) ** order


def wigner_column(sys, left, right, xs, p, spec: ContourSpec = ContourSpec(), family=None,
                  orders=(0,)) -> MellinResult:
    """rho and/or x-derivatives at many x and one p; value and error have shape (len(orders), len(xs))."""
    I = assemble_integrand(sys, left, right, 0.0, p, family)
    weights = [x_weight(sys.alpha, n) for n in orders]
    log_u = log_u_of_x(np.atleast_1d(np.asarray(xs, dtype=float)), sys)
    return inverse_mellin(I.mellin, spec=spec, poles=I.poles, weights=weights, log_u=log_u)


def wigner_eval(sys, left, right, x, p, spec: ContourSpec = ContourSpec(), family=None,
                orders=(0,)) -> MellinResult:
    """Contour evaluation of rho and/or its x-derivatives (one value per entry in ``orders``)."""
    res = wigner_column(sys, left, right, [x], p, spec, family, orders)
    if len(orders) == 1:
        return MellinResult(complex(res.value[0, 0]), float(res.error[0, 0]), res.c, res.half_length,
                            res.nodes, res.l1)
    return MellinResult(res.value[:, 0], res.error[:, 0], res.c, res.half_length, res.nodes, res.l1)


def wigner_point(sys, left, right, x, p, spec: ContourSpec = ContourSpec(), family=None) -> complex:
    """rho_LR(x, p) with proportionality constant 1."""
    return wigner_eval(sys, left, right, x, p, spec, family).value


def wigner_x_derivative(sys, left, right, x, p, order=1, spec: ContourSpec = ContourSpec(), family=None):
    if order not in (1, 2):
        raise DomainError("derivative order must be 1 or 2")
    return wigner_eval(sys, left, right, x, p, spec, family, orders=(order,)).value


def meijer_g4004(z, a, spec: ContourSpec = ContourSpec()) -> complex:
    """G^{4,0}_{0,4}(z | a1..a4) = (1/2 pi i) int prod Gamma(a_j - s) z^s ds, contour left of all poles."""
    a = [complex(v) for v in a]
    if len(a) != 4:
        raise DomainError("meijer_g4004 needs four parameters")
    if not z > 0:
        raise DomainError("meijer_g4004 needs z > 0")

    def W(s):
        out = np.ones(np.shape(s), dtype=complex)
        for aj in a:
            sf.check_poles(aj - s)
            out = out * sf.gamma_c(aj - s)
        return out

    # z^s = u^-s with u = 1/z
    return inverse_mellin(W, spec=spec, poles=[v.real for v in a], log_u=-math.log(z)).value


def liouville_meijer_parameters(sys: MorseSystem, kL, kR, p):
    h = 2 * sys.alpha
    P = p / sys.hbar
    return (1j * (P + kL) / h, 1j * (P - kL) / h, -1j * (P - kR) / h, -1j * (P + kR) / h)


def liouville_wigner_meijer(sys: MorseSystem, kL, kR, x, p, spec: ContourSpec = ContourSpec()) -> complex:
    """Liouville Wigner function as G^{40}_{04}(1/u | ...)."""
    log_u = float(log_u_of_x(x, sys))
    return meijer_g4004(math.exp(-log_u), liouville_meijer_parameters(sys, kL, kR, p), spec)


def _field_column(args):
    sys, left, right, xs, p, spec, family = args
    n = len(xs)
    try:
        r = wigner_column(sys, left, right, xs, p, spec, family)
        return r.value[0], r.error[0], np.zeros(n, bool), r.c, r.half_length
    except MorseError:
        return np.full(n, complex(math.nan, math.nan)), np.full(n, math.nan), np.ones(n, bool), math.nan, math.nan


def wigner_field(sys, left, right, xs, ps, spec: ContourSpec = ContourSpec(), family=None,
                 workers: int | None = None) -> WignerField:
    """Sample rho_LR on the grid xs x ps. Failing points are NaN and flagged in ``failed``.

    The Mellin image depends on p only, so each p column is one contour
    evaluation shared by all x. ``workers > 1`` spreads the columns over a
    process pool; the output is identical to the serial result because every
    column is computed independently.
    """
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    jobs = [(sys, left, right, xs, float(p), spec, family) for p in ps]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_field_column, jobs))
    else:
        out = [_field_column(j) for j in jobs]
    values = np.stack([o[0] for o in out], axis=1)
    errors = np.stack([o[1] for o in out], axis=1)
    failed = np.stack([o[2] for o in out], axis=1)
    cs = [o[3] for o in out if not o[2].all()]
    Ts = [o[4] for o in out if not o[2].all()]
    contour = spec.to_dict()
    contour.update({"c_used_min": min(cs) if cs else None, "c_used_max": max(cs) if cs else None,
                    "half_length_max": max(Ts) if Ts else None})
    return WignerField(xs, ps, values, errors, left, right, sys, source="closed", contour=contour,
                       failed=failed)


def field_integral(field: WignerField) -> complex:
    """Trapezoid integral of the field over its grid."""
    return complex(np.trapezoid(np.trapezoid(field.values, field.p, axis=1), field.x))


def normalize_field(field: WignerField) -> WignerField:
    """Rescale a diagonal field so that its grid integral is 1."""
    if not field.is_diagonal:
        raise NormalizationRequiredError("only diagonal fields carry a probability normalization")
    if field.failed.any():
        raise NormalizationRequiredError("field has failed points")
    total = field_integral(field)
    if total == 0 or not np.isfinite(total):
        raise NormalizationRequiredError("field integral vanishes")
    out = field.scaled(1 / total.real)
    out.normalized = True
    return out
