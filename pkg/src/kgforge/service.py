"""HTTP JSON facade over the exploitation patterns.

Every read handler captures the current build exactly once, computes its
payload from that build alone, and stamps the response with that build's
X-Graph-Version header, so a response can never mix two graph versions.
Reload swaps the current build atomically: in-flight requests finish on the
old one, later requests see the new one. Responses serialize with sorted
keys so golden tests are byte-stable. Feedback events append to a JSONL log
under a lock; the log line count always equals the number of accepted posts.
"""

from __future__ import annotations

import datetime
import json
import threading
from pathlib import Path
from typing import Callable, Optional

from fastapi import FastAPI, Request, Response

from .analytics import children_sorted, evidence_for, infobox, top_types, trend_table
from .errors import EvaluationError, KgforgeError, UnknownIdError
from .pipeline import BuildResult, PipelineConfig

VERSION_HEADER = "X-Graph-Version"
VERDICTS = ("up", "down")


class ServiceRuntime:
    """Mutable service state: current build, tokens, feedback log."""

    def __init__(
        self,
        build: BuildResult,
        config: PipelineConfig,
        feedback_path: Path,
        rebuild: Optional[Callable[[int], BuildResult]] = None,
    ):
        self.current = build
        self.config = config
        self.token = config.service.token
        self.admin_token = config.service.admin_token
        self.feedback_path = Path(feedback_path)
        self.rebuild = rebuild
        self.reload_lock = threading.Lock()
        self.feedback_lock = threading.Lock()
        if self.feedback_path.exists():
            with open(self.feedback_path, "r", encoding="utf-8") as fh:
                self.feedback_count = sum(1 for line in fh if line.strip())
        else:
            self.feedback_count = 0

    def append_feedback(self, event: dict) -> int:
        with self.feedback_lock:
            self.feedback_count += 1
            event_id = self.feedback_count
            record = dict(event, id=event_id)
            with open(self.feedback_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True))
                fh.write("\n")
            return event_id


def _json_response(payload, version: Optional[int], status_code: int = 200) -> Response:
    headers = {}
    if version is not None:
        headers[VERSION_HEADER] = str(version)
    return Response(
        content=json.dumps(payload, sort_keys=True),
        status_code=status_code,
        media_type="application/json",
        headers=headers,
    )


def _error(message: str, status_code: int, version: Optional[int] = None) -> Response:
    return _json_response({"error": message}, version, status_code=status_code)


def create_app(
    runtime: ServiceRuntime,
    ui_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="kgforge", docs_url=None, redoc_url=None)
    app.state.runtime = runtime

    def bearer(request: Request) -> Optional[str]:
        header = request.headers.get("authorization", "")
        if header.lower().startswith("bearer "):
            return header[7:].strip()
        return None

    def authorized(request: Request) -> bool:
        token = bearer(request)
        return token is not None and token in (runtime.token, runtime.admin_token)

    @app.get("/status")
    def status(request: Request):
        if not authorized(request):
            return _error("missing or invalid token", 401)
        state = runtime.current
        payload = {
            "version": state.version,
            "triples": len(state.kg),
            "entities": state.model.n,
            "features": state.model.m,
            "categories": sorted(runtime.config.categories),
        }
        return _json_response(payload, state.version)

    @app.get("/types")
    def get_types(request: Request, limit: Optional[int] = None):
        if not authorized(request):
            return _error("missing or invalid token", 401)
        state = runtime.current
        n = limit if limit is not None else -1
        payload = [s.as_dict() for s in top_types(state.hierarchy, state.kg, n)]
        return _json_response(payload, state.version)

    @app.get("/types/{type_id}/children")
    def get_children(request: Request, type_id: str):
        if not authorized(request):
            return _error("missing or invalid token", 401)
        state = runtime.current
        try:
            payload = [s.as_dict() for s in children_sorted(state.hierarchy, state.kg, type_id)]
        except UnknownIdError as exc:
            return _error(str(exc), 404, state.version)
        return _json_response(payload, state.version)

    @app.get("/types/{type_id}/trends")
    def get_trends(
        request: Request,
        type_id: str,
        start: Optional[int] = None,
        end: Optional[int] = None,
    ):
        if not authorized(request):
            return _error("missing or invalid token", 401)
        state = runtime.current
        params = request.query_params
        try:
            year_from = int(params.get("from", start if start is not None else ""))
            year_to = int(params.get("to", end if end is not None else ""))
        except ValueError:
            return _error("query needs integer from= and to= years", 400, state.version)
        try:
            table = trend_table(state.hierarchy, state.kg, type_id, year_from, year_to)
        except UnknownIdError as exc:
            return _error(str(exc), 404, state.version)
        except EvaluationError as exc:
            return _error(str(exc), 400, state.version)
        return _json_response(table.as_dict(), state.version)

    @app.get("/entities/{entity_id}/infobox")
    def get_infobox(request: Request, entity_id: str):
        if not authorized(request):
            return _error("missing or invalid token", 401)
        state = runtime.current
        try:
            payload = infobox(state.kg, state.hierarchy, entity_id).as_dict()
        except UnknownIdError as exc:
            return _error(str(exc), 404, state.version)
        return _json_response(payload, state.version)

    @app.get("/statements/{statement_id}/evidence")
    def get_evidence(request: Request, statement_id: str):
        if not authorized(request):
            return _error("missing or invalid token", 401)
        state = runtime.current
        try:
            records = evidence_for(state.kg, statement_id)
        except UnknownIdError as exc:
            return _error(str(exc), 404, state.version)
        return _json_response([r.as_dict() for r in records], state.version)

    @app.get("/recommendations")
    def get_recommendations(
        request: Request,
        user: Optional[str] = None,
        category: Optional[str] = None,
        k: Optional[int] = None,
        explain_top: int = 5,
    ):
        if not authorized(request):
            return _error("missing or invalid token", 401)
        state = runtime.current
        if not user:
            return _error("user parameter is required", 400, state.version)
        if not category or category not in runtime.config.categories:
            known = ", ".join(sorted(runtime.config.categories))
            return _error(f"category must be one of: {known}", 400, state.version)
        k_value = k if k is not None else runtime.config.k_defaults.get(category, 10)
        if k_value < 1:
            return _error("k must be >= 1", 400, state.version)
        target_type = runtime.config.categories[category]
        try:
            recommendations = state.recommender.recommend(user, target_type, k_value)
        except UnknownIdError as exc:
            return _error(str(exc), 404, state.version)
        payload = []
        for rec in recommendations:
            explanation = state.recommender.explain(user, rec.item, top_m=explain_top)
            entry = rec.as_dict()
            entry["explanation"] = explanation.as_dict()
            payload.append(entry)
        return _json_response(payload, state.version)

    @app.post("/feedback")
    async def post_feedback(request: Request):
        if not authorized(request):
            return _error("missing or invalid token", 401)
        state = runtime.current
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return _error("body must be JSON", 400, state.version)
        if not isinstance(body, dict):
            return _error("body must be a JSON object", 400, state.version)
        verdict = body.get("verdict")
        if verdict not in VERDICTS:
            return _error("verdict must be 'up' or 'down'", 400, state.version)
        event = {
            "ts": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "user": body.get("user"),
            "item": body.get("item"),
            "verdict": verdict,
            "comment": body.get("comment"),
            "category": body.get("category"),
            "rank": body.get("rank"),
            "graph_version": state.version,
        }
        event_id = runtime.append_feedback(event)
        return _json_response(dict(event, id=event_id), state.version, status_code=201)

    @app.post("/admin/reload")
    def admin_reload(request: Request):
        token = bearer(request)
        if token is None or token not in (runtime.token, runtime.admin_token):
            return _error("missing or invalid token", 401)
        if token != runtime.admin_token:
            return _error("admin token required", 403)
        if runtime.rebuild is None:
            return _error("service is not configured for reload", 503)
        if not runtime.reload_lock.acquire(blocking=False):
            return _error("build already in progress", 409, runtime.current.version)
        try:
            old_version = runtime.current.version
            new_state = runtime.rebuild(old_version + 1)
            runtime.current = new_state
        except KgforgeError as exc:
            return _error(f"rebuild failed: {exc}", 500, runtime.current.version)
        finally:
            runtime.reload_lock.release()
        return _json_response(
            {"old_version": old_version, "new_version": new_state.version},
            new_state.version,
        )

    if ui_dir is not None and Path(ui_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
