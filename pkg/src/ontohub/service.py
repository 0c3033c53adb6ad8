"""HTTP service: registration, dumps, views, search and validation jobs."""

from __future__ import annotations

import logging
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field
from starlette.concurrency import run_in_threadpool
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import views
from .config import ServiceConfig
from .errors import InvalidArgument, OntohubError, UnsupportedFormat
from .hub import Hub
from .rdf import MEDIA_TYPES, SyntaxFormat
from .rdf.syntax import FORMAT_FOR_MEDIA_TYPE
from .validator import enumerate_graphs, stats, validate

log = logging.getLogger(__name__)

RDF_MEDIA_ALIASES = {
    "application/x-turtle": SyntaxFormat.TURTLE,
    "text/plain": SyntaxFormat.NTRIPLES,
    "application/xml": SyntaxFormat.RDFXML,
    "text/xml": SyntaxFormat.RDFXML,
    "application/json": SyntaxFormat.RDFJSON,
}


def _accept_entries(header: str) -> list[tuple[float, int, str]]:
    entries = []
    for i, part in enumerate(header.split(",")):
        media, *params = [p.strip() for p in part.split(";")]
        if not media:
            continue
        q = 1.0
        for param in params:
            key, _, value = param.partition("=")
            if key.strip() == "q":
                try:
                    q = float(value)
                except ValueError:
                    q = 0.0
        entries.append((q, i, media.lower()))
    entries.sort(key=lambda e: (-e[0], e[1]))
    return entries


def negotiate(accept: Optional[str], offered: list[str]) -> Optional[str]:
    """The offered media type the Accept header ranks highest; None when none fit."""
    if not accept or not accept.strip():
        return offered[0]
    for q, _, media in _accept_entries(accept):
        if q <= 0:
            continue
        if media == "*/*":
            return offered[0]
        if media.endswith("/*"):
            family = media[:-1]
            match = next((o for o in offered if o.startswith(family)), None)
            if match:
                return match
        elif media in offered:
            return media
    return None


def negotiate_rdf(accept: Optional[str]) -> SyntaxFormat:
    offered = list(MEDIA_TYPES.values())
    media = negotiate(accept, offered)
    if media is None:
        raise UnsupportedFormat(f"none of the requested media types can be produced; offered: {', '.join(offered)}")
    return FORMAT_FOR_MEDIA_TYPE[media]


def _format_for_upload(content_type: Optional[str], format: Optional[str]) -> SyntaxFormat:
    if format:
        return SyntaxFormat.from_name(format)
    media = (content_type or "").split(";")[0].strip().lower()
    if media in FORMAT_FOR_MEDIA_TYPE:
        return FORMAT_FOR_MEDIA_TYPE[media]
    if media in RDF_MEDIA_ALIASES:
        return RDF_MEDIA_ALIASES[media]
    return SyntaxFormat.TURTLE


class ValidateRequest(BaseModel):
    endpoint: str
    graphs: list[str] = Field(default_factory=list)
    ontology: Optional[str] = None
    timeout: Optional[float] = None


def _error(exc: OntohubError) -> JSONResponse:
    return JSONResponse(exc.to_dict(), status_code=exc.http_status)


def create_app(config: Optional[ServiceConfig] = None, hub: Optional[Hub] = None) -> FastAPI:
    """Build the application over ``hub`` (or a new one opened from ``config``)."""
    owned = hub is None
    if hub is None:
        hub = Hub(config or ServiceConfig())
    registry = hub.registry

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if owned:
            hub.close()

    app = FastAPI(title="ontohub", version="0.1.0", lifespan=lifespan)
    app.state.hub = hub

    @app.exception_handler(OntohubError)
    async def ontohub_error(request: Request, exc: OntohubError) -> JSONResponse:
        return _error(exc)

    @app.exception_handler(RequestValidationError)
    async def bad_request(request: Request, exc: RequestValidationError) -> JSONResponse:
        problems = "; ".join(f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in exc.errors())
        return _error(InvalidArgument(problems or "malformed request"))

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        code = {404: "not-found", 405: "method-not-allowed"}.get(exc.status_code, "http-error")
        return JSONResponse({"error": code, "message": str(exc.detail)}, status_code=exc.status_code)

    @app.post("/ontologies", status_code=201)
    async def register(
        request: Request,
        prefix: Optional[str] = None,
        version: Optional[str] = None,
        issued: Optional[str] = None,
        title: str = "",
        description: str = "",
        rights: str = "",
        license: Optional[str] = None,
        contributor: Optional[str] = None,
        catalogue: list[str] = Query(default=[]),
        format: Optional[str] = None,
        source_graph: Optional[str] = None,
        base: Optional[str] = None,
    ) -> JSONResponse:
        content_type = request.headers.get("content-type", "")
        params: dict = {
            "prefix": prefix,
            "version": version,
            "issued": issued,
            "title": title,
            "description": description,
            "rights": rights,
            "license": license,
            "contributor": contributor,
            "format": format,
            "source_graph": source_graph,
            "base": base,
        }
        keywords = list(catalogue)
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("file")
            if upload is None or isinstance(upload, str):
                raise InvalidArgument("multipart registration needs a 'file' part")
            body = await upload.read()
            upload_type = upload.content_type
            for key in params:
                if isinstance(form.get(key), str) and form.get(key) != "":
                    params[key] = form.get(key)
            keywords += [k for k in form.getlist("catalogue") if isinstance(k, str)]
        else:
            body = await request.body()
            upload_type = content_type
        missing = [k for k in ("prefix", "version", "issued") if not params[k]]
        if missing:
            raise InvalidArgument(f"missing registration parameter(s): {', '.join(missing)}")
        keywords = [k.strip() for item in keywords for k in item.split(",") if k.strip()]
        record = await run_in_threadpool(
            registry.register,
            body,
            _format_for_upload(upload_type, params["format"]),
            prefix=params["prefix"],
            version_info=params["version"],
            issued=params["issued"],
            title=params["title"],
            description=params["description"],
            rights=params["rights"],
            license=params["license"],
            contributor=params["contributor"],
            catalogue=keywords,
            source_graph=params["source_graph"],
            base=params["base"],
        )
        return JSONResponse(record.to_dict(), status_code=201)

    @app.get("/ontologies")
    def list_ontologies() -> list[dict]:
        return [r.to_dict() for r in registry.list_latest()]

    @app.get("/ontology/{prefix}")
    def dump(prefix: str, request: Request, version: Optional[str] = None, format: Optional[str] = None) -> Response:
        fmt = SyntaxFormat.from_name(format) if format else negotiate_rdf(request.headers.get("accept"))
        body = registry.dump(prefix, version, fmt)
        media = fmt.media_type + ("; charset=utf-8" if fmt is not SyntaxFormat.RDFXML else "")
        return Response(body, media_type=media, headers={"Vary": "Accept"})

    @app.get("/ontology/{prefix}/versions")
    def versions(prefix: str) -> list[dict]:
        return [r.to_dict() for r in registry.versions(prefix)]

    @app.get("/ontology/{prefix}/view/tree")
    def tree_view(prefix: str, request: Request, version: Optional[str] = None) -> Response:
        g = registry.graph(prefix, version)
        forest = views.class_tree(g)
        media = negotiate(request.headers.get("accept"), ["application/json", "text/plain"])
        if media == "text/plain":
            return Response(views.tree_text(forest, g.prefixes), media_type="text/plain; charset=utf-8")
        return JSONResponse([node.to_dict() for node in forest])

    @app.get("/ontology/{prefix}/view/list")
    def list_view(prefix: str, request: Request, version: Optional[str] = None) -> Response:
        doc = views.list_view(registry.graph(prefix, version))
        media = negotiate(request.headers.get("accept"), ["application/json", "text/html"])
        if media == "text/html":
            title = registry.latest(prefix).title or prefix
            return Response(doc.to_html(title), media_type="text/html; charset=utf-8")
        return Response(doc.to_json(), media_type="application/json")

    @app.get("/ontology/{prefix}/view/vowl")
    def vowl_view(prefix: str, version: Optional[str] = None) -> Response:
        return Response(views.vowl_json(registry.graph(prefix, version)), media_type="application/json")

    @app.get("/search")
    def search(q: str = "", facet: list[str] = Query(default=[])) -> list[dict]:
        facets = [f.strip() for item in facet for f in item.split(",") if f.strip()]
        return [hit.to_dict() for hit in registry.search(q, facets or None)]

    @app.post("/validate")
    def run_validation(job: ValidateRequest) -> dict:
        session = hub.session(job.endpoint, job.graphs, job.timeout)
        if job.ontology:
            return validate(session, job.ontology, registry).to_dict()
        return stats(session).to_dict()

    @app.get("/endpoint-graphs")
    def endpoint_graphs(endpoint: str, timeout: Optional[float] = None) -> list[str]:
        return sorted(enumerate_graphs(hub.session(endpoint, timeout=timeout)))

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    app = create_app(config)
    log.info("listening on %s", config.listen_address)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
