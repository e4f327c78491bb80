"""Gridded Wigner-function samples and their file formats."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, GridMismatchError
from .model import MorseSystem, SpectralLabel

SCHEMA = "moyal-morse/1"
CONVENTION = (
    "rho_LR(x,p) = (1/2pi i) int u^-s w_L(s - ip/2 alpha hbar, k_L) w_R(s + ip/2 alpha hbar, k_R) ds, "
    "proportionality constant 1; oracle transforms use int exp(-i y p) psi_L(x + hbar y/2) "
    "conj(psi_R(x - hbar y/2)) dy"
)


@dataclass
class WignerField:
    """Complex samples rho[i, j] = rho(x[i], p[j]) with per-point error estimates.

    Failed points hold NaN values and are flagged in ``failed``.
    """

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    left: SpectralLabel
    right: SpectralLabel
    system: MorseSystem
    source: str = "closed"
    convention: str = CONVENTION
    contour: dict = field(default_factory=dict)
    normalized: bool = False
    failed: np.ndarray | None = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        self.errors = np.asarray(self.errors, dtype=float)
        shape = (len(self.x), len(self.p))
        if self.values.shape != shape or self.errors.shape != shape:
            raise DomainError(f"field arrays must have shape {shape}")
        if len(self.x) > 1 and not np.all(np.diff(self.x) > 0):
            raise DomainError("x grid must be strictly ascending")
        if len(self.p) > 1 and not np.all(np.diff(self.p) > 0):
            raise DomainError("p grid must be strictly ascending")
        if self.failed is None:
            self.failed = ~np.isfinite(self.values)
        self.failed = np.asarray(self.failed, dtype=bool)

    @property
    def shape(self):
        return self.values.shape

    @property
    def is_diagonal(self) -> bool:
        return self.left == self.right

    def reality_defect(self) -> float:
        """max |Im rho| / max |rho| over the successful points."""
        ok = ~self.failed
        if not ok.any():
            return math.nan
        v = self.values[ok]
        return float(np.max(np.abs(v.imag)) / np.max(np.abs(v)))

    def same_grid(self, other: "WignerField") -> bool:
        return (self.x.shape == other.x.shape and self.p.shape == other.p.shape
                and np.array_equal(self.x, other.x) and np.array_equal(self.p, other.p))

    def check_grid(self, other: "WignerField"):
        if not self.same_grid(other):
            raise GridMismatchError("fields are sampled on different grids")

    def scaled(self, factor) -> "WignerField":
        return replace(self, values=self.values * factor, errors=self.errors * abs(factor))

    # -- files -------------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "p", "re", "im", "err"])
        for i, xv in enumerate(self.x):
            for j, pv in enumerate(self.p):
                z = self.values[i, j]
                w.writerow([repr(float(xv)), repr(float(pv)), repr(float(z.real)),
                            repr(float(z.imag)), repr(float(self.errors[i, j]))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        def num(v):
            v = float(v)
            return v if math.isfinite(v) else None

        return {
            "schema": SCHEMA,
            "source": self.source,
            "convention": self.convention,
            "normalized": self.normalized,
            "system": self.system.to_config(),
            "b": self.system.b,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "contour": self.contour,
            "x": [num(v) for v in self.x],
            "p": [num(v) for v in self.p],
            "re": [[num(z.real) for z in row] for row in self.values],
            "im": [[num(z.imag) for z in row] for row in self.values],
            "err": [[num(e) for e in row] for row in self.errors],
            "failed": [[bool(f) for f in row] for row in self.failed],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, allow_nan=False)

    @classmethod
    def from_dict(cls, data: dict) -> "WignerField":
        if data.get("schema") != SCHEMA:
            raise DomainError(f"unsupported field schema {data.get('schema')!r}")

        def arr(rows):
            return np.array([[math.nan if v is None else v for v in row] for row in rows], dtype=float)

        re = arr(data["re"])
        im = arr(data["im"])
        return cls(
            x=np.array(data["x"], dtype=float),
            p=np.array(data["p"], dtype=float),
            values=re + 1j * im,
            errors=arr(data["err"]),
            left=SpectralLabel.from_dict(data["left"]),
            right=SpectralLabel.from_dict(data["right"]),
            system=MorseSystem.from_config(data["system"]),
            source=data["source"],
            convention=data["convention"],
            contour=data["contour"],
            normalized=data["normalized"],
            failed=np.array(data["failed"], dtype=bool).reshape(re.shape),
        )

    @classmethod
    def from_json(cls, text: str) -> "WignerField":
        return cls.from_dict(json.loads(text))


def read_csv_values(text: str):
    """Parse the CSV written by ``WignerField.to_csv`` into flat arrays."""
    rows = list(csv.DictReader(io.StringIO(text)))
    cols = {key: np.array([float(r[key]) for r in rows]) for key in ("x", "p", "re", "im", "err")}
    return cols
