"""Request and response schemas for the HTTP service.

The same objects back the CLI: local runs construct them directly,
remote runs serialize them over the wire, so both paths validate
identically.
"""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .. import alignment, catalog, dynamics, landscape
from ..errors import ContractError

ClassName = Literal["lmsz", "aeh"]
PictureName = Literal["detuning", "phase"]


class TruncationModel(BaseModel):
    """Window policy selector; exactly the parameter for `policy` is used."""

    policy: Literal["tail", "window", "guard", "full"]
    eps: float | None = None
    t_over_tau: float | None = None
    delta: float | None = None

    def to_policy(self) -> catalog.Policy:
        if self.policy == "tail":
            return catalog.TailBound(self.eps) if self.eps else catalog.TailBound()
        if self.policy == "window":
            if self.t_over_tau is None:
                raise ContractError("window truncation needs t_over_tau")
            return catalog.FixedWindow(self.t_over_tau)
        if self.policy == "guard":
            if self.delta is None:
                return catalog.EndpointGuard()
            return catalog.EndpointGuard(self.delta)
        return catalog.FullWindow()


class IntegratorModel(BaseModel):
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 1_000_000
    mode: Literal["adaptive", "fixed"] = "adaptive"

    def to_config(self) -> dynamics.IntegratorConfig:
        return dynamics.IntegratorConfig(self.rel_tol, self.abs_tol,
                                         self.max_steps, self.mode)


class AxisModel(BaseModel):
    start: float
    stop: float
    count: int = Field(ge=2)

    def to_axis(self) -> landscape.AxisSpec:
        return landscape.AxisSpec(self.start, self.stop, self.count)

    @classmethod
    def from_axis(cls, axis: landscape.AxisSpec) -> "AxisModel":
        return cls(start=axis.start, stop=axis.stop, count=axis.count)


class WindowModel(BaseModel):
    lo: float
    hi: float
    policy: str
    deficit: float


class CatalogEntry(BaseModel):
    row: int
    name: str
    formula: str
    domain_kind: str
    has_closed_s: bool


class AnalyticRequest(BaseModel):
    model: Literal["lmsz", "aeh", "rabi"]
    alpha: float
    beta: float = 0.0


class ProbabilityResponse(BaseModel):
    probability: float


class SimulateRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    class_tag: ClassName = Field(alias="class")
    row: int
    alpha: float
    beta: float
    picture: PictureName = "detuning"
    integrator: IntegratorModel = IntegratorModel()
    truncation: TruncationModel | None = None


class SimulateResponse(BaseModel):
    probability: float
    unitarity_defect: float
    norm_defect: float
    window: WindowModel


class ScanRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    class_tag: ClassName = Field(alias="class")
    row: int
    alpha: AxisModel
    beta: AxisModel
    picture: PictureName = "detuning"
    integrator: IntegratorModel = IntegratorModel()
    truncation: TruncationModel | None = None
    workers: int = Field(default=1, ge=1)


class LandscapeModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    class_tag: ClassName = Field(alias="class")
    row: int
    picture: PictureName
    alpha: AxisModel
    beta: AxisModel
    values: list[list[float]]

    @classmethod
    def from_landscape(cls, land: landscape.Landscape) -> "LandscapeModel":
        return cls(class_tag=land.klass, row=land.row, picture=land.picture,
                   alpha=AxisModel.from_axis(land.alpha_axis),
                   beta=AxisModel.from_axis(land.beta_axis),
                   values=land.values.tolist())

    def to_landscape(self) -> landscape.Landscape:
        return landscape.Landscape(np.asarray(self.values, dtype=float),
                                   self.alpha.to_axis(), self.beta.to_axis(),
                                   self.class_tag, self.row, self.picture)


class AlignParamsModel(BaseModel):
    dx: int
    dy: int
    trims_a: tuple[int, int, int, int]
    trims_b: tuple[int, int, int, int]

    @classmethod
    def from_params(cls, p: alignment.AlignParams) -> "AlignParamsModel":
        return cls(dx=p.dx, dy=p.dy, trims_a=p.trims_a, trims_b=p.trims_b)


class CompareRequest(BaseModel):
    a: LandscapeModel
    b: LandscapeModel
    align: bool = False
    resample: int | None = Field(default=None, ge=2)
    bounds_pct: float = Field(default=5.0, gt=0.0)


class CompareResponse(BaseModel):
    mse_pre: float
    mse_post: float | None = None
    params: AlignParamsModel | None = None
    overlap_size: int | None = None