"""HTTP front end over the core package.

Every endpoint is a thin wrapper around a do_* function operating on
the schema objects; the CLI calls the same functions in-process when no
server is configured.
"""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, alignment, analytic, catalog, dynamics, landscape
from ..errors import (CatalogError, ContractError, ConvergenceError,
                      DomainError, IsopulseError, MapFormatError, ScanError,
                      SingularityError)
from .models import (AnalyticRequest, CatalogEntry, CompareRequest,
                     CompareResponse, LandscapeModel, ProbabilityResponse,
                     ScanRequest, SimulateRequest, SimulateResponse,
                     WindowModel, AlignParamsModel)

_STATUS: tuple[tuple[type[IsopulseError], int], ...] = (
    (CatalogError, 404),
    (MapFormatError, 422),
    (ContractError, 422),
    (ConvergenceError, 400),
    (SingularityError, 400),
    (ScanError, 400),
    (DomainError, 400),
)


def do_catalog() -> list[CatalogEntry]:
    from ..shapes import ROW_INDICES, shape
    out = []
    for row in ROW_INDICES:
        shp = shape(row)
        out.append(CatalogEntry(row=row, name=shp.name, formula=shp.formula,
                                domain_kind=shp.domain_kind,
                                has_closed_s=shp.has_closed_s))
    return out


def do_analytic(req: AnalyticRequest) -> ProbabilityResponse:
    if req.model == "aeh":
        p = analytic.aeh_exact(req.alpha, req.beta)
    elif req.model == "lmsz":
        p = analytic.lmsz_asymptotic(req.alpha, req.beta)
    else:
        p = analytic.rabi_resonant(req.alpha)
    return ProbabilityResponse(probability=p)


def _build_model(req: SimulateRequest) -> catalog.ModelPair:
    policy = req.truncation.to_policy() if req.truncation else None
    return catalog.model_from_alpha_beta(req.class_tag, req.row,
                                         req.alpha, req.beta,
                                         truncation=policy)


def do_simulate(req: SimulateRequest) -> SimulateResponse:
    model = _build_model(req)
    cfg = req.integrator.to_config()
    if req.picture == "phase":
        prop = dynamics.propagate_phase(model, cfg=cfg)
    else:
        prop = dynamics.propagate_detuning(model, cfg=cfg)
    state = prop.apply(dynamics.QubitState.ground())
    p = min(max(state.p2, 0.0), 1.0)
    w = model.window
    return SimulateResponse(
        probability=p,
        unitarity_defect=prop.unitarity_defect,
        norm_defect=abs(state.norm - 1.0),
        window=WindowModel(lo=w.lo, hi=w.hi, policy=w.policy,
                           deficit=w.deficit))


def do_scan(req: ScanRequest) -> LandscapeModel:
    policy = req.truncation.to_policy() if req.truncation else None
    land = landscape.scan(req.class_tag, req.row,
                          req.alpha.to_axis(), req.beta.to_axis(),
                          picture=req.picture,
                          cfg=req.integrator.to_config(),
                          truncation=policy, workers=req.workers)
    return LandscapeModel.from_landscape(land)


def do_compare(req: CompareRequest) -> CompareResponse:
    a = req.a.to_landscape()
    b = req.b.to_landscape()
    if req.resample is not None:
        a = alignment.resample_bilinear(a, req.resample, req.resample)
        b = alignment.resample_bilinear(b, req.resample, req.resample)
    if not req.align:
        if b.values.shape != a.values.shape:
            b = alignment.resample_bilinear(b, a.alpha_axis.count,
                                            a.beta_axis.count)
        return CompareResponse(mse_pre=alignment.mse(a, b))
    bounds = alignment.Bounds.fraction_of(a.values.shape, req.bounds_pct)
    res = alignment.align(a, b, bounds)
    return CompareResponse(mse_pre=res.mse_pre, mse_post=res.mse_post,
                           params=AlignParamsModel.from_params(res.params),
                           overlap_size=res.overlap_size)


def create_app() -> FastAPI:
    app = FastAPI(title="isopulse", version=__version__)

    @app.exception_handler(IsopulseError)
    async def _isopulse_error(request: Request, exc: IsopulseError):
        status = 400
        for etype, code in _STATUS:
            if isinstance(exc, etype):
                status = code
                break
        return JSONResponse(status_code=status,
                            content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/catalog", response_model=list[CatalogEntry])
    def catalog_route():
        return do_catalog()

    @app.post("/analytic", response_model=ProbabilityResponse)
    def analytic_route(req: AnalyticRequest):
        return do_analytic(req)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate_route(req: SimulateRequest):
        return do_simulate(req)

    @app.post("/scan", response_model=LandscapeModel)
    def scan_route(req: ScanRequest):
        return do_scan(req)

    @app.post("/compare", response_model=CompareResponse)
    def compare_route(req: CompareRequest):
        return do_compare(req)

    return app