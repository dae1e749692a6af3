"""HTTP service wrapping the workbench. Run with `uvicorn fmmc_lab.app:app`."""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import service
from .schemas import (ConductanceRequest, ConductanceResponse, ErrorBody, FmmcRequest,
                      FmmcResponse, PipelineRequest, PipelineResponse, Theorem1Request,
                      Theorem1Response, Theorem2Request, Theorem2Response)
from .util import InstanceRejected, NumericalFailure

app = FastAPI(title="fmmc-lab", version="0.1.0")


@app.exception_handler(InstanceRejected)
async def _rejected(request: Request, exc: InstanceRejected):
    body = ErrorBody(error=type(exc).__name__, detail=str(exc))
    return JSONResponse(status_code=422, content=body.model_dump())


@app.exception_handler(ValueError)
async def _bad_value(request: Request, exc: ValueError):
    body = ErrorBody(error="ValueError", detail=str(exc))
    return JSONResponse(status_code=422, content=body.model_dump())


@app.exception_handler(NumericalFailure)
async def _numerical(request: Request, exc: NumericalFailure):
    body = ErrorBody(error="NumericalFailure", detail=str(exc))
    return JSONResponse(status_code=500, content=body.model_dump())


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/theorem1", response_model=Theorem1Response)
def theorem1(req: Theorem1Request):
    return service.handle_theorem1(req)


@app.post("/theorem2", response_model=Theorem2Response)
def theorem2(req: Theorem2Request):
    return service.handle_theorem2(req)


@app.post("/fmmc", response_model=FmmcResponse)
def fmmc(req: FmmcRequest):
    return service.handle_fmmc(req)


@app.post("/conductance", response_model=ConductanceResponse)
def conductance(req: ConductanceRequest):
    return service.handle_conductance(req)


@app.post("/pipeline", response_model=PipelineResponse)
def pipeline(req: PipelineRequest):
    return service.handle_pipeline(req)
