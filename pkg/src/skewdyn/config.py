"""Experiment configuration for the command line driver.

A config is one JSON file.  Complex numbers are written ``[re, im]``; a map
is ``{"num": [...], "den": [...]}`` with ascending coefficients, or
``{"coeffs": [...]}`` for a polynomial.  Every field has a default except the
family, so a config only lists what a command needs.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .measures import Dictionary, default_dictionary, sphere_dictionary
from .rational import MapFamily, Poly, RationalMap, shared_roots
from .skew import DEFAULT_BUDGET, PointX, RegionU, default_base
from .sphere import point_from_json
from .symbolic import Cylinder, Word
from .thermo import Potential

MAX_BUDGET = 1 << 26
MAX_PIXELS = 8192 * 8192

Complex = tuple[float, float]


class ConfigError(ValueError):
    """Invalid or incomplete configuration for the requested command."""


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class MapSpec(_Model):
    coeffs: Optional[list[Complex]] = None
    num: Optional[list[Complex]] = None
    den: Optional[list[Complex]] = None

    @model_validator(mode="after")
    def _one_form(self):
        if (self.coeffs is None) == (self.num is None):
            raise ValueError("give either 'coeffs' or 'num' (with optional 'den')")
        if self.coeffs is not None and self.den is not None:
            raise ValueError("'den' goes with 'num', not 'coeffs'")
        return self

    def build(self) -> RationalMap:
        num = self.coeffs if self.coeffs is not None else self.num
        den = self.den if self.den is not None else [(1.0, 0.0)]
        R = RationalMap(Poly([complex(*c) for c in num]), Poly([complex(*c) for c in den]))
        if shared_roots(R):
            raise ValueError("numerator and denominator share a root")
        return R


class BaseSpec(_Model):
    word: str = "| 1"
    z: Union[Complex, Literal["inf"], tuple[Complex, Complex]]

    def build(self) -> PointX:
        return PointX(Word.parse(self.word), point_from_json(
            list(self.z) if not isinstance(self.z, str) else self.z))


class CylinderTerm(_Model):
    letters: list[int]
    coef: float


class PotentialSpec(_Model):
    a: float = 0.0
    b: float = 0.0
    const: float = 0.0
    cylinders: list[CylinderTerm] = Field(default_factory=list)

    def build(self) -> Potential:
        return Potential(self.a, self.b,
                         tuple((Cylinder(tuple(t.letters)), t.coef) for t in self.cylinders),
                         self.const)


class RegionSpec(_Model):
    center: Union[Complex, Literal["inf"]]
    radius: float = Field(gt=0, lt=2)

    def build(self) -> RegionU:
        c = self.center if isinstance(self.center, str) else list(self.center)
        return RegionU(point_from_json(c), self.radius)


class RenderSpec(_Model):
    """Rasterization of a point cloud or weighted measure."""

    width: int = Field(512, ge=1)
    height: int = Field(512, ge=1)
    view: Literal["window", "sphere"] = "window"
    window: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0)  # xmin xmax ymin ymax
    radius: int = Field(0, ge=0, le=64)
    color_by_letter: bool = False
    input: Optional[str] = None
    formats: list[Literal["ppm", "png"]] = Field(default_factory=lambda: ["ppm", "png"])

    @model_validator(mode="after")
    def _check(self):
        if self.width * self.height > MAX_PIXELS:
            raise ValueError("resolution exceeds 8192^2")
        x0, x1, y0, y1 = self.window
        if not (x0 < x1 and y0 < y1):
            raise ValueError("window must have xmin < xmax and ymin < ymax")
        if not self.formats:
            raise ValueError("at least one image format")
        return self


class ExperimentConfig(_Model):
    family: list[MapSpec]
    base: Optional[BaseSpec] = None
    potential: PotentialSpec = PotentialSpec()
    depth: int = Field(6, ge=1, le=40)
    depths: Optional[list[int]] = None
    period: int = Field(4, ge=1, le=24)
    periods: Optional[list[int]] = None
    dictionary: Literal["default", "sphere"] = "default"
    epsilon: Optional[Union[float, Literal["inf"]]] = None
    center_period: int = Field(7, ge=1, le=24)
    seed: int = Field(0, ge=0)
    budget: int = Field(DEFAULT_BUDGET, ge=1, le=MAX_BUDGET)
    samples: int = Field(100_000, ge=1, le=MAX_BUDGET)
    mode: Literal["auto", "exhaustive", "sampled"] = "auto"
    burn_in: int = Field(50, ge=0)
    count: int = Field(2000, ge=1, le=MAX_BUDGET)
    regions: list[RegionSpec] = Field(default_factory=list)
    n_clear: int = Field(1, ge=1)
    loop_points: int = Field(128, ge=8, le=1024)
    max_period: int = Field(4, ge=1, le=12)
    tol: float = Field(1e-3, gt=0)
    render: RenderSpec = RenderSpec()
    out: str = "out"

    @field_validator("family")
    @classmethod
    def _family_nonempty(cls, v):
        if not v:
            raise ValueError("family needs at least one map")
        return v

    @field_validator("depths", "periods")
    @classmethod
    def _positive_list(cls, v):
        if v is not None and (not v or min(v) < 1):
            raise ValueError("lists of depths/periods must be nonempty and positive")
        return v

    @field_validator("epsilon")
    @classmethod
    def _eps(cls, v):
        if v is not None and v != "inf" and not (v >= 0 and math.isfinite(v)):
            raise ValueError("epsilon must be >= 0 or 'inf'")
        return v

    @model_validator(mode="after")
    def _family_valid(self):
        self.build_family()
        return self

    # -- builders ---------------------------------------------------------

    def build_family(self) -> MapFamily:
        return MapFamily(tuple(m.build() for m in self.family))

    def build_base(self, fam: MapFamily) -> PointX:
        return self.base.build() if self.base is not None else default_base(fam)

    def build_dictionary(self, N: int) -> Dictionary:
        return default_dictionary(N) if self.dictionary == "default" else sphere_dictionary()

    def epsilon_value(self) -> float:
        if self.epsilon is None:
            raise ConfigError("this command needs 'epsilon'")
        return math.inf if self.epsilon == "inf" else float(self.epsilon)

    def depth_list(self) -> list[int]:
        return list(self.depths) if self.depths else [self.depth]

    def period_list(self) -> list[int]:
        return list(self.periods) if self.periods else [self.period]

    def canonical_json(self) -> str:
        """Sorted compact JSON of the experiment; the output directory is left
        out so the same experiment hashes alike wherever it is written."""
        return json.dumps(self.model_dump(mode="json", exclude={"out"}), sort_keys=True,
                          separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def load_config(path: str, seed: int | None = None, out: str | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    if seed is not None:
        raw["seed"] = seed
    if out is not None:
        raw["out"] = out
    return ExperimentConfig.model_validate(raw)
