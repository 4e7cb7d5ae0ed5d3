"""HTTP service exposing annotation and aggregate reports.

All /v1 routes require a bearer token; the annotate endpoint also accepts
the credential as an ``auth_key`` field in the request body. The annotate
handler reads the raw body so that the size limit, JSON parsing, credential
check, and field validation happen in a fixed order (413, 400, 401, 422).
"""

from __future__ import annotations

import hmac
import json
import logging
import time
from dataclasses import dataclass
from datetime import datetime
from email.utils import parsedate_to_datetime
from typing import Mapping

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .demographics import GenderClient, RaceModel
from .extraction import annotate_article
from .store import (
    MalformedPeriodError,
    Scope,
    Storage,
    UnknownScopeError,
    aggregate_report,
    list_sites,
    make_record,
    parse_iso_datetime,
)
from .textcore import ArticleFields

logger = logging.getLogger("sourceaudit.api")

MAX_BODY_BYTES = 1 << 20  # 1 MiB


@dataclass
class ServiceConfig:
    auth_token: str
    store: Storage | None = None
    gender_client: GenderClient | None = None
    race_model: RaceModel | None = None


def _authorized(config: ServiceConfig, headers: Mapping[str, str],
                body: dict | None = None) -> bool:
    """Constant-time credential check against header or body token."""
    expected = config.auth_token.encode("utf-8")
    supplied = []
    header = headers.get("authorization", "")
    if header.startswith("Bearer "):
        supplied.append(header[len("Bearer "):])
    if body is not None and isinstance(body.get("auth_key"), str):
        supplied.append(body["auth_key"])
    ok = False
    for candidate in supplied:
        ok |= hmac.compare_digest(candidate.encode("utf-8"), expected)
    return ok


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _parse_published(value: str) -> datetime | None:
    if not value:
        return None
    moment = parse_iso_datetime(value)
    if moment is not None:
        return moment
    try:
        return parsedate_to_datetime(value)
    except (ValueError, TypeError):
        return None


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="sourceaudit", docs_url=None, redoc_url=None,
                  openapi_url=None)

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        start = time.perf_counter()
        response = await call_next(request)
        logger.info(json.dumps({
            "method": request.method,
            "path": request.url.path,
            "status": response.status_code,
            "duration_ms": round((time.perf_counter() - start) * 1000, 3),
        }, sort_keys=True))
        return response

    @app.post("/v1/annotate")
    async def annotate(request: Request):
        raw = await request.body()
        if len(raw) > MAX_BODY_BYTES:
            return _error(413, "request body exceeds 1 MiB")
        try:
            payload = json.loads(raw)
            if not isinstance(payload, dict):
                raise ValueError("not an object")
        except ValueError:
            return _error(400, "malformed JSON body")
        if not _authorized(config, request.headers, payload):
            return _error(401, "invalid or missing credential")
        article_id = payload.get("article_id")
        if not isinstance(article_id, str) or not article_id:
            return _error(422, "article_id is required")

        fields = ArticleFields(
            article_id=article_id,
            site_id=str(payload.get("site") or ""),
            author=str(payload.get("author") or ""),
            title=str(payload.get("title") or ""),
            published_at=_parse_published(str(payload.get("published_at") or "")),
        )
        result = annotate_article(fields, str(payload.get("body") or ""),
                                  gender_client=config.gender_client,
                                  race_model=config.race_model)
        if config.store is not None and fields.site_id:
            config.store.put(make_record(fields, result))
        return JSONResponse(result.to_payload())

    def _report_response(request: Request, scope: Scope) -> JSONResponse:
        if not _authorized(config, request.headers):
            return _error(401, "invalid or missing credential")
        if config.store is None:
            return _error(404, "no store configured")
        from_month = request.query_params.get("from")
        to_month = request.query_params.get("to")
        period = None
        if from_month or to_month:
            period = (from_month or to_month, to_month or from_month)
        try:
            report = aggregate_report(config.store, scope, period)
        except UnknownScopeError:
            return _error(404, "unknown scope")
        except MalformedPeriodError as exc:
            return _error(400, str(exc))
        return JSONResponse(report.to_dict())

    @app.get("/v1/reports/site/{site_id}")
    async def site_report(site_id: str, request: Request):
        return _report_response(request, Scope.site(site_id))

    @app.get("/v1/reports/author/{site_id}/{author}")
    async def author_report(site_id: str, author: str, request: Request):
        return _report_response(request, Scope.author_on_site(site_id, author))

    @app.get("/v1/sites")
    async def sites(request: Request):
        if not _authorized(config, request.headers):
            return _error(401, "invalid or missing credential")
        known = list_sites(config.store) if config.store is not None else []
        return JSONResponse({"sites": known})

    return app
