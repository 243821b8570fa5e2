"""HTTP surface: /v1/tokenize, /v1/predict, /v1/health.

Probabilities travel as decimal strings so clients in any language parse
the same values. Malformed requests are 400, a mask_index that does not
hold the mask sentinel is 422, and a missing model is 503.
"""
from __future__ import annotations

import os

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .modelhost import MaskError, ModelHost, format_decimal

DEFAULT_MODEL = "bert-base-cased"


class TokenizeRequest(BaseModel):
    text: str


class PredictRequest(BaseModel):
    tokens: list[str] = Field(min_length=1)
    mask_index: int
    min_prob: str = "0"


def create_app(host: ModelHost | None) -> FastAPI:
    app = FastAPI(title="lmserver", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request"})

    def require_host() -> ModelHost | JSONResponse:
        if host is None:
            return JSONResponse(status_code=503, content={"error": "model unavailable"})
        return host

    @app.post("/v1/tokenize")
    def tokenize(request: TokenizeRequest):
        h = require_host()
        if isinstance(h, JSONResponse):
            return h
        return {"tokens": h.tokenize(request.text)}

    @app.post("/v1/predict")
    def predict(request: PredictRequest):
        h = require_host()
        if isinstance(h, JSONResponse):
            return h
        try:
            min_prob = float(request.min_prob)
        except ValueError:
            return JSONResponse(
                status_code=400, content={"error": "min_prob is not a decimal string"}
            )
        try:
            prediction = h.predict(request.tokens, request.mask_index, min_prob)
        except MaskError as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        return {
            "entries": [
                {"token": token, "prob": format_decimal(prob)}
                for token, prob in prediction.entries
            ],
            "total_mass": format_decimal(prediction.total_mass),
            "model_digest": h.model_digest,
        }

    @app.get("/v1/health")
    def health():
        h = require_host()
        if isinstance(h, JSONResponse):
            return h
        return {
            "status": "ok",
            "model": h.model_name,
            "model_digest": h.model_digest,
        }

    return app


def main() -> None:
    import uvicorn

    model_name = os.environ.get("LMSERVER_MODEL", DEFAULT_MODEL)
    host_addr = os.environ.get("LMSERVER_HOST", "127.0.0.1")
    port = int(os.environ.get("LMSERVER_PORT", "8471"))
    app = create_app(ModelHost(model_name))
    uvicorn.run(app, host=host_addr, port=port, log_level="warning")


if __name__ == "__main__":
    main()
