"""Command-line interface: ``moyal-morse <command> ...``.

Exit status is 0 on success, 1 when a verification fails or field points
fail, and 2 for usage or configuration errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import factors as fac
from . import specfun as sf
from .errors import MorseError, SeriesDivergenceError
from .field import WignerField
from .mellin import ContourSpec, wigner_column, wigner_field
from .model import CONFIG_KEYS, MorseSystem, SpectralLabel, bound_count, bound_count_literal, energy_of, v_of_x
from .schrodinger import psi_bound, psi_scattering, wavefunction_for, wigner_series, wigner_transform_numeric
from .starverify import standard_grid, star_residual_grid

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_TOL = {"difference": 1e-7, "star": 1e-6, "oracle": 1e-4}


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: list
    config: dict
    version: str
    started: str
    finished: str = ""
    outputs: dict = field(default_factory=dict)

    def add(self, path: Path):
        self.outputs[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()

    def write(self, out: Path):
        self.finished = _now()
        path = out / "manifest.json"
        path.write_text(json.dumps(asdict(self), indent=1, sort_keys=True) + "\n")
        return path


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def load_system(args) -> MorseSystem:
    """CLI flags override the config file, which overrides the defaults (all 1, beta from b)."""
    conf = {}
    if args.config:
        try:
            conf = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(conf, dict):
            raise UsageError("config must be a JSON object")
    extra = set(conf) - set(CONFIG_KEYS) - {"b"}
    if extra:
        raise UsageError(f"unknown config keys: {sorted(extra)}")
    params = {key: float(conf[key]) for key in ("hbar", "mass", "alpha", "kappa") if key in conf}
    for key in ("hbar", "mass", "alpha", "kappa"):
        if getattr(args, key, None) is not None:
            params[key] = args.__dict__[key]
    base = MorseSystem(**params)
    if args.b is not None:
        return MorseSystem.from_b(args.b, base.hbar, base.mass, base.alpha, base.kappa)
    if "b" in conf:
        return MorseSystem.from_b(float(conf["b"]), base.hbar, base.mass, base.alpha, base.kappa)
    return MorseSystem(base.hbar, base.mass, base.alpha, base.kappa, float(conf.get("beta", 0.0)))


def labels(args):
    nuL = args.nuL if args.nuL is not None else args.nu
    nuR = args.nuR if args.nuR is not None else args.nu
    kL = args.kL
    kR = args.kR if args.kR is not None else (kL if nuR is None else None)
    if nuL is not None and kL is not None:
        raise UsageError("left state given both as bound (--nu) and scattering (--kL)")
    left = SpectralLabel.bound(nuL) if nuL is not None else SpectralLabel.scattering(kL if kL is not None else 1.0)
    if nuR is not None:
        right = SpectralLabel.bound(nuR)
    else:
        right = SpectralLabel.scattering(kR if kR is not None else left.k if not left.is_bound else 1.0)
    return left, right


def grids(args):
    if args.nx < 1 or args.np < 1:
        raise UsageError("grid sizes must be >= 1")
    xs = np.linspace(args.xmin, args.xmax, args.nx)
    ps = np.linspace(args.pmin, args.pmax, args.np)
    return xs, ps


def contour(args) -> ContourSpec:
    return ContourSpec(c=args.contour_c)


def _common(parser, with_grid=False, with_labels=False):
    g = parser.add_argument_group("system")
    g.add_argument("--config", help="JSON file with hbar, mass, alpha, kappa, beta (or b)")
    g.add_argument("--b", type=float, help="shape parameter b = beta kappa / alpha")
    for key in ("hbar", "mass", "alpha", "kappa"):
        g.add_argument(f"--{key}", type=float)
    if with_labels:
        g.add_argument("--kL", type=float, help="left scattering wavenumber")
        g.add_argument("--kR", type=float, help="right scattering wavenumber (default kL)")
        g.add_argument("--nu", type=int, help="bound-state index for both sides")
        g.add_argument("--nuL", type=int)
        g.add_argument("--nuR", type=int)
    if with_grid:
        g.add_argument("--xmin", type=float, default=-1.0)
        g.add_argument("--xmax", type=float, default=3.0)
        g.add_argument("--nx", type=int, default=5)
        g.add_argument("--pmin", type=float, default=-3.0)
        g.add_argument("--pmax", type=float, default=3.0)
        g.add_argument("--np", type=int, default=5)
        g.add_argument("--contour-c", type=float, default=None, dest="contour_c")
    parser.add_argument("--out", help="output directory")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    sys_ = load_system(args)
    rows = []
    for nu in range(bound_count(sys_)):
        rows.append({"nu": nu, "energy": energy_of(SpectralLabel.bound(nu), sys_)})
    data = {
        "b": sys_.b,
        "bound": rows,
        "bound_count": bound_count(sys_),
        "bound_count_literal_range": bound_count_literal(sys_),
        "scattering": "E = hbar^2 k^2 / 2m, k > 0",
    }
    if args.json:
        text = json.dumps(data, indent=1) + "\n"
    else:
        lines = [f"b = {sys_.b:.17g}", "nu  E_nu"]
        lines += [f"{r['nu']}  {r['energy']:.17g}" for r in rows]
        lines.append("scattering: E = hbar^2 k^2 / 2m for k > 0")
        text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "spectrum.json").write_text(json.dumps(data, indent=1) + "\n")
    return EXIT_OK


def _oracle_field(sys_, left, right, xs, ps):
    psiL = wavefunction_for(sys_, left)
    psiR = psiL if right == left else wavefunction_for(sys_, right)
    values = np.full((len(xs), len(ps)), complex(math.nan, math.nan))
    failed = np.zeros(values.shape, bool)
    for i, x in enumerate(xs):
        try:
            values[i] = wigner_transform_numeric(sys_, psiL, psiR, float(x), ps)
        except MorseError:
            failed[i] = True
    errors = np.where(failed, math.nan, 0.0)
    return WignerField(xs, ps, values, errors, left, right, sys_, source="oracle", failed=failed)


def _series_field(sys_, left, right, xs, ps):
    if left.is_bound or right.is_bound:
        raise UsageError("the series source covers scattering states only")
    values = np.full((len(xs), len(ps)), complex(math.nan, math.nan))
    errors = np.full(values.shape, math.nan)
    failed = np.zeros(values.shape, bool)
    notes = set()
    for i, x in enumerate(xs):
        v = float(v_of_x(x, sys_))
        for j, p in enumerate(ps):
            try:
                values[i, j], tail = wigner_series(sys_, v, float(p), left.k, right.k)
                errors[i, j] = tail.last_magnitude
            except SeriesDivergenceError as exc:
                failed[i, j] = True
                notes.add(type(exc).__name__)
            except MorseError as exc:
                failed[i, j] = True
                notes.add(type(exc).__name__)
    return WignerField(xs, ps, values, errors, left, right, sys_, source="series", failed=failed,
                       contour={"failures": sorted(notes)})


def build_field(sys_, left, right, xs, ps, source, spec, workers=None) -> WignerField:
    if source == "closed":
        return wigner_field(sys_, left, right, xs, ps, spec, workers=workers)
    if source == "oracle":
        return _oracle_field(sys_, left, right, xs, ps)
    if source == "series":
        return _series_field(sys_, left, right, xs, ps)
    raise UsageError(f"unknown source {source!r}")


def write_ppm(field: WignerField, path: Path, scale=4):
    """Heatmap of Re rho: blue (negative), white (zero), red (positive); p horizontal, x vertical."""
    re = np.nan_to_num(field.values.real)
    peak = np.max(np.abs(re)) or 1.0
    t = re / peak
    r = np.where(t > 0, 1.0, 1.0 + t)
    g = 1.0 - np.abs(t)
    b = np.where(t < 0, 1.0, 1.0 - t)
    img = (np.stack([r, g, b], axis=-1) * 255).round().astype(np.uint8)[::-1]
    img = np.repeat(np.repeat(img, scale, axis=0), scale, axis=1)
    h, w, _ = img.shape
    path.write_bytes(f"P6 {w} {h} 255\n".encode() + img.tobytes())


def _write_field(args, field: WignerField, manifest_config):
    out = Path(args.out or "moyal_out")
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(list(sys.argv), manifest_config, __version__, _now())
    csv_path = out / "field.csv"
    csv_path.write_text(field.to_csv())
    json_path = out / "field.json"
    json_path.write_text(field.to_json() + "\n")
    manifest.add(csv_path)
    manifest.add(json_path)
    if getattr(args, "ppm", False):
        ppm = out / "field.ppm"
        write_ppm(field, ppm)
        manifest.add(ppm)
    manifest.write(out)
    return out


def cmd_eval(args) -> int:
    sys_ = load_system(args)
    left, right = labels(args)
    left.validate(sys_)
    right.validate(sys_)
    xs, ps = grids(args)
    field = build_field(sys_, left, right, xs, ps, args.source, contour(args), args.workers)
    config = {"system": sys_.to_config(), "b": sys_.b, "left": left.to_dict(), "right": right.to_dict(),
              "x": [args.xmin, args.xmax, args.nx], "p": [args.pmin, args.pmax, args.np],
              "source": args.source, "contour_c": args.contour_c}
    out = _write_field(args, field, config)
    n_fail = int(field.failed.sum())
    print(f"wrote {out}/field.csv ({field.shape[0]}x{field.shape[1]}, {n_fail} failed points)")
    return EXIT_FAIL if n_fail else EXIT_OK


def _check(name, measured, tol):
    ok = bool(np.isfinite(measured) and measured < tol)
    return {"check": name, "measured": float(measured), "tolerance": tol, "pass": ok}


def _perturbed(w, delta):
    if not delta:
        return w
    return lambda t: np.asarray(w(t)) * (1 + delta * np.asarray(t))


def suite_difference(sys_, args, tol):
    ts = fac.sample_t(20, seed=7)
    b = sys_.b
    checks = []
    k = args.kL if args.kL is not None else 0.8
    fams = [("real", fac.FactorSolution("real", b, k, sys_.alpha))]
    if b == int(b) and b >= 0:
        fams.append(("integer", fac.FactorSolution("integer", b, k, sys_.alpha)))
    for nu in range(bound_count(sys_)):
        fams.append((f"bound nu={nu}", fac.FactorSolution.for_label(sys_, SpectralLabel.bound(nu))))
    for name, w in fams:
        res = fac.difference_residual(_perturbed(w, args.perturb), ts, b=w.b, k=w.k, alpha=w.alpha)
        checks.append(_check(f"difference {name} b={b:g}", np.max(res), tol))
    return checks


def suite_star(sys_, args, tol):
    xs, ps = standard_grid(sys_)
    left, right = labels(args)
    cases = [(left, right)]
    if args.nu is None and args.nuL is None and args.nuR is None:
        cases += [(SpectralLabel.bound(nu), SpectralLabel.bound(nu)) for nu in range(bound_count(sys_))]
    checks = []
    spec = contour(args) if hasattr(args, "contour_c") else ContourSpec()
    for l, r in cases:
        l.validate(sys_)
        r.validate(sys_)
        rl, rr = star_residual_grid(sys_, l, r, xs, ps, spec=spec, perturb=args.perturb)
        checks.append(_check(f"star left {l}/{r} b={sys_.b:g}", rl.max_residual, tol))
        checks.append(_check(f"star right {l}/{r} b={sys_.b:g}", rr.max_residual, tol))
    return checks


def suite_oracle(sys_, args, tol):
    left, right = labels(args)
    left.validate(sys_)
    right.validate(sys_)
    xs = np.linspace(0.0, 2.0, 3) / sys_.alpha
    ps = np.linspace(-2.0, 2.0, 3) * sys_.hbar * sys_.alpha
    closed = np.array([wigner_column(sys_, left, right, xs, p).value[0] for p in ps]).T
    oracle = _oracle_field(sys_, left, right, xs, ps).values
    if args.perturb:
        closed = closed * (1 + args.perturb * np.cos(sys_.alpha * xs))[:, None]
    _, spread = fac.constant_ratio(oracle, closed)
    return [_check(f"oracle transform vs closed form {left}/{right} b={sys_.b:g}", spread, tol)]


SUITES = {"difference": suite_difference, "star": suite_star, "oracle": suite_oracle}


def cmd_verify(args) -> int:
    sys_ = load_system(args)
    suite = args.suite_opt or args.suite or "all"
    names = list(SUITES) if suite == "all" else [suite]
    checks = []
    for name in names:
        tol = args.tol if args.tol is not None else DEFAULT_TOL[name]
        checks += SUITES[name](sys_, args, tol)
    for c in checks:
        status = "PASS" if c["pass"] else "FAIL"
        print(f"{status} {c['check']}: {c['measured']:.3e} (tol {c['tolerance']:.0e})")
    ok = all(c["pass"] for c in checks)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(list(sys.argv), {"system": sys_.to_config(), "suite": suite}, __version__, _now())
        path = out / "verify.json"
        path.write_text(json.dumps({"suite": suite, "pass": ok, "checks": checks}, indent=1) + "\n")
        manifest.add(path)
        manifest.write(out)
    return EXIT_OK if ok else EXIT_FAIL


SPECFUN = {
    "gamma": (sf.gamma_c, 1),
    "loggamma": (sf.loggamma_c, 1),
    "rgamma": (sf.rgamma_c, 1),
    "pochhammer": (lambda mu, n: sf.pochhammer(mu, int(n.real)), 2),
    "kummer_m": (sf.kummer_m, 3),
    "tricomi_u": (sf.tricomi_u, 3),
    "gauss_2f1": (sf.gauss_2f1, 4),
    "bessel_k": (sf.bessel_k, 2),
    "laguerre": (lambda n, lam, x: sf.laguerre_assoc(int(n.real), lam.real, x.real), 3),
    "whittaker_m": (sf.whittaker_m, 3),
    "whittaker_w": (sf.whittaker_w, 3),
}


def _complex(text):
    try:
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def _fmt(z):
    z = complex(z)
    return f"{z.real:.17g} {z.imag:+.17g}j"


def cmd_specfun(args) -> int:
    if args.name not in SPECFUN:
        raise UsageError(f"unknown function {args.name!r}; choose from {', '.join(SPECFUN)}")
    fn, arity = SPECFUN[args.name]
    if len(args.args) != arity:
        raise UsageError(f"{args.name} takes {arity} arguments")
    print(_fmt(fn(*[_complex(a) for a in args.args])))
    return EXIT_OK


def _factor_from_args(args):
    sys_ = load_system(args)
    if args.nu is not None:
        return fac.FactorSolution.for_label(sys_, SpectralLabel.bound(args.nu))
    k = args.kL if args.kL is not None else 1.0
    return fac.FactorSolution.for_label(sys_, SpectralLabel.scattering(k), args.family, args.form)


def cmd_factor(args) -> int:
    w = _factor_from_args(args)
    if args.action == "eval":
        for t in args.t or ["-0.25"]:
            print(_fmt(w(_complex(t))))
        return EXIT_OK
    ts = [_complex(t) for t in args.t] if args.t else fac.sample_t(args.samples, seed=args.seed)
    rep = fac.residual_report(w, ts)
    text = json.dumps({"family": w.family, "b": w.b, "k": [complex(w.k).real, complex(w.k).imag],
                       **rep.to_dict()}, indent=1)
    print(text)
    tol = args.tol if args.tol is not None else DEFAULT_TOL["difference"]
    return EXIT_OK if rep.max_residual < tol else EXIT_FAIL


def cmd_oracle(args) -> int:
    sys_ = load_system(args)
    left, right = labels(args)
    left.validate(sys_)
    right.validate(sys_)
    if args.action == "wigner":
        args.source = "oracle"
        xs, ps = grids(args)
        field = _oracle_field(sys_, left, right, xs, ps)
        config = {"system": sys_.to_config(), "left": left.to_dict(), "right": right.to_dict(), "source": "oracle"}
        out = _write_field(args, field, config)
        print(f"wrote {out}/field.csv")
        return EXIT_FAIL if field.failed.any() else EXIT_OK
    xs = np.linspace(args.xmin, args.xmax, args.nx)
    psi = psi_bound(sys_, left.nu) if left.is_bound else psi_scattering(sys_, left.k)
    vals = np.asarray(psi(xs), dtype=complex)
    lines = ["x,re,im"] + [f"{x!r},{float(z.real)!r},{float(z.imag)!r}" for x, z in zip(xs, vals)]
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "wavefn.csv").write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moyal-morse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="bound-state energies")
    _common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("eval", help="evaluate a Wigner field on a grid")
    _common(p, with_grid=True, with_labels=True)
    p.add_argument("--source", choices=("closed", "oracle", "series"), default="closed")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--ppm", action="store_true", help="also write a PPM heatmap of Re rho")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run verification suites")
    _common(p, with_grid=False, with_labels=True)
    p.add_argument("suite", nargs="?", choices=("difference", "star", "oracle", "all"))
    p.add_argument("--suite", dest="suite_opt", choices=("difference", "star", "oracle", "all"))
    p.add_argument("--tol", type=float)
    p.add_argument("--perturb", type=float, nargs="?", const=0.01, default=0.0,
                   help="multiply candidates by (1 + d cos(alpha x)) [or (1 + d t)]; default d = 0.01")
    p.add_argument("--contour-c", type=float, default=None, dest="contour_c")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("specfun", help="evaluate a special function")
    p.add_argument("action", choices=("eval",))
    p.add_argument("name")
    p.add_argument("args", nargs="*")
    p.set_defaults(func=cmd_specfun)

    p = sub.add_parser("factor", help="evaluate or verify a Mellin factor")
    p.add_argument("action", choices=("eval", "verify"))
    _common(p, with_labels=True)
    p.add_argument("--family", choices=fac.FAMILIES[:-1], default=None)
    p.add_argument("--form", choices=("vdef", "alt"), default="vdef")
    p.add_argument("--t", action="append", help="sample point (repeatable), e.g. -0.25+1j")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("oracle", help="Schrodinger-side oracle outputs")
    p.add_argument("action", choices=("wigner", "wavefn"))
    _common(p, with_grid=True, with_labels=True)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, MorseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
