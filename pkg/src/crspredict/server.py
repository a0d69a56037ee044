"""HTTP+JSON service: prediction, what-if, explanation, case review, labels.

Endpoints (all bodies JSON):

  POST /predict            {values: {feature: number}}            -> probability + decision
  POST /whatif             {values, overrides, threshold?}        -> baseline vs modified
  POST /explain            {values, seed?}                        -> attributions + global snapshot
  GET  /cases                                                     -> case list + guidance
  GET  /labels[?case_id=]  (bearer)                               -> latest labels for the rater
  POST /labels             (bearer) {case_id, call, confidence}   -> stored revision
  GET  /sessions/{rater}   (bearer)                               -> {cursor}
  PUT  /sessions/{rater}   (bearer) {cursor}                      -> {cursor}
  PUT  /admin/threshold    (admin bearer) {threshold}             -> {threshold}

Requests that fail record validation return 422 with the violation list;
predictions without an active model return 409. Models are never mutated by
requests; only the admin threshold endpoint changes serving behavior.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .errors import MalformedConfidence, UnknownCase
from .registry import ModelRegistry
from .store import LabelStore


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(
        self,
        address,
        registry: ModelRegistry | None,
        store: LabelStore,
        cases: list[dict],
        tokens: dict[str, str],
        admin_token: str,
        guidance: str = "",
    ):
        super().__init__(address, ApiHandler)
        self.registry = registry
        self.store = store
        self.cases = cases
        self.case_ids = {case["case_id"] for case in cases}
        self.tokens = tokens  # bearer token -> rater id
        self.admin_token = admin_token
        self.guidance = guidance


class ApiHandler(BaseHTTPRequestHandler):
    server: ApiServer

    # ----- plumbing -------------------------------------------------------
    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, code: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Authorization, Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        if length == 0:
            return {}
        return json.loads(self.rfile.read(length).decode("utf-8"))

    def _rater(self) -> str | None:
        header = self.headers.get("Authorization", "")
        if not header.startswith("Bearer "):
            return None
        return self.server.tokens.get(header[len("Bearer ") :].strip())

    def _is_admin(self) -> bool:
        header = self.headers.get("Authorization", "")
        return header == f"Bearer {self.server.admin_token}"

    def _registry(self) -> ModelRegistry | None:
        return self.server.registry

    # ----- routing --------------------------------------------------------
    def do_OPTIONS(self):  # CORS preflight for the web client
        self._send(204, {})

    def do_GET(self):
        parsed = urlparse(self.path)
        try:
            if parsed.path == "/cases":
                return self._send(
                    200, {"cases": self.server.cases, "guidance": self.server.guidance}
                )
            if parsed.path == "/labels":
                return self._get_labels(parse_qs(parsed.query))
            if parsed.path.startswith("/sessions/"):
                return self._get_session(parsed.path.split("/")[-1])
            return self._send(404, {"error": "not_found", "message": parsed.path})
        except Exception as exc:  # pragma: no cover - defensive
            return self._send(500, {"error": type(exc).__name__, "message": str(exc)})

    def do_POST(self):
        parsed = urlparse(self.path)
        try:
            body = self._body()
            if parsed.path == "/predict":
                return self._predict(body)
            if parsed.path == "/whatif":
                return self._whatif(body)
            if parsed.path == "/explain":
                return self._explain(body)
            if parsed.path == "/labels":
                return self._post_label(body)
            return self._send(404, {"error": "not_found", "message": parsed.path})
        except json.JSONDecodeError as exc:
            return self._send(400, {"error": "bad_json", "message": str(exc)})
        except Exception as exc:  # pragma: no cover - defensive
            return self._send(500, {"error": type(exc).__name__, "message": str(exc)})

    def do_PUT(self):
        parsed = urlparse(self.path)
        try:
            body = self._body()
            if parsed.path == "/admin/threshold":
                return self._put_threshold(body)
            if parsed.path.startswith("/sessions/"):
                return self._put_session(parsed.path.split("/")[-1], body)
            return self._send(404, {"error": "not_found", "message": parsed.path})
        except json.JSONDecodeError as exc:
            return self._send(400, {"error": "bad_json", "message": str(exc)})
        except Exception as exc:  # pragma: no cover - defensive
            return self._send(500, {"error": type(exc).__name__, "message": str(exc)})

    # ----- prediction surfaces ---------------------------------------------
    def _validated_values(self, body: dict):
        registry = self._registry()
        if registry is None:
            self._send(409, {"error": "no_active_model", "message": "registry not loaded"})
            return None
        values = body.get("values", {})
        violations = registry.validate_values(values)
        if violations:
            self._send(422, {"error": "validation", "violations": violations})
            return None
        return values

    def _predict(self, body: dict):
        values = self._validated_values(body)
        if values is None:
            return None
        registry = self._registry()
        threshold = body.get("threshold")
        if threshold is not None and not 0.0 < float(threshold) <= 1.0:
            return self._send(422, {"error": "validation", "violations": ["threshold: outside (0, 1]"]})
        return self._send(200, registry.predict_values(values, threshold))

    def _whatif(self, body: dict):
        registry = self._registry()
        if registry is None:
            return self._send(409, {"error": "no_active_model", "message": "registry not loaded"})
        values = body.get("values", {})
        overrides = body.get("overrides", {})
        merged = {**values, **overrides}
        violations = registry.validate_values(values)
        if violations:
            return self._send(422, {"error": "validation", "violations": violations})
        violations = registry.validate_values(merged)
        if violations:
            return self._send(
                422, {"error": "validation", "violations": [f"override {v}" for v in violations]}
            )
        threshold = body.get("threshold")
        if threshold is not None and not 0.0 < float(threshold) <= 1.0:
            return self._send(422, {"error": "validation", "violations": ["threshold: outside (0, 1]"]})
        baseline = registry.predict_values(values, threshold)
        modified = registry.predict_values(merged, threshold)
        return self._send(
            200,
            {
                "baseline_probability": baseline["probability"],
                "modified_probability": modified["probability"],
                "baseline_decision": baseline["decision"],
                "modified_decision": modified["decision"],
                "flipped": baseline["decision"] != modified["decision"],
                "model": baseline["model"],
                "threshold": baseline["threshold"],
            },
        )

    def _explain(self, body: dict):
        values = self._validated_values(body)
        if values is None:
            return None
        registry = self._registry()
        result, ranked = registry.explain_values(values, seed=int(body.get("seed", 0)))
        return self._send(
            200,
            {
                "attributions": ranked,
                "base_value": result.base_value,
                "fx": result.fx,
                "efficiency_residual": result.efficiency_residual(),
                "mode": result.mode,
                "global_importance": registry.global_importance,
                "model": registry.active,
            },
        )

    # ----- labels and sessions ----------------------------------------------
    def _get_labels(self, query: dict):
        rater = self._rater()
        if rater is None:
            return self._send(401, {"error": "unauthorized", "message": "bearer token required"})
        case_filter = query.get("case_id", [None])[0]
        latest = [
            {
                "case_id": e.case_id,
                "call": e.call,
                "confidence": e.confidence,
                "revision": e.revision,
                "timestamp": e.timestamp,
                "history_length": len(self.server.store.history(rater, e.case_id)),
            }
            for e in self.server.store.latest(rater)
            if case_filter is None or e.case_id == case_filter
        ]
        payload = {"rater": rater, "labels": latest}
        if case_filter is not None:
            history = self.server.store.history(rater, case_filter)
            payload["history"] = [
                {
                    "call": e.call,
                    "confidence": e.confidence,
                    "revision": e.revision,
                    "timestamp": e.timestamp,
                }
                for e in history
            ]
            payload["history_length"] = len(history)
        return self._send(200, payload)

    def _post_label(self, body: dict):
        rater = self._rater()
        if rater is None:
            return self._send(401, {"error": "unauthorized", "message": "bearer token required"})
        case_id = str(body.get("case_id", ""))
        if case_id not in self.server.case_ids:
            return self._send(404, {"error": "unknown_case", "message": case_id})
        try:
            confidence = body["confidence"]
            if not isinstance(confidence, int) or isinstance(confidence, bool):
                raise MalformedConfidence(f"confidence {confidence!r} must be an integer 1..5")
            event = self.server.store.submit(rater, case_id, int(body["call"]), confidence)
        except MalformedConfidence as exc:
            return self._send(422, {"error": "malformed_confidence", "message": str(exc)})
        except UnknownCase as exc:
            return self._send(404, {"error": "unknown_case", "message": str(exc)})
        except (KeyError, ValueError) as exc:
            return self._send(422, {"error": "validation", "message": str(exc)})
        return self._send(
            200,
            {
                "case_id": case_id,
                "call": event.call,
                "confidence": event.confidence,
                "revision": event.revision,
                "history_length": event.revision,
            },
        )

    def _get_session(self, rater_path: str):
        rater = self._rater()
        if rater is None:
            return self._send(401, {"error": "unauthorized", "message": "bearer token required"})
        if rater != rater_path and not self._is_admin():
            return self._send(403, {"error": "forbidden", "message": "session belongs to another rater"})
        return self._send(200, {"rater": rater_path, "cursor": self.server.store.get_cursor(rater_path)})

    def _put_session(self, rater_path: str, body: dict):
        rater = self._rater()
        if rater is None:
            return self._send(401, {"error": "unauthorized", "message": "bearer token required"})
        if rater != rater_path and not self._is_admin():
            return self._send(403, {"error": "forbidden", "message": "session belongs to another rater"})
        cursor = body.get("cursor")
        if not isinstance(cursor, int) or cursor < 0:
            return self._send(422, {"error": "validation", "message": "cursor must be a nonnegative integer"})
        self.server.store.set_cursor(rater_path, cursor)
        return self._send(200, {"rater": rater_path, "cursor": cursor})

    def _put_threshold(self, body: dict):
        if not self._is_admin():
            return self._send(401, {"error": "unauthorized", "message": "admin token required"})
        registry = self._registry()
        if registry is None:
            return self._send(409, {"error": "no_active_model", "message": "registry not loaded"})
        try:
            registry.set_threshold(float(body.get("threshold")))
        except (TypeError, ValueError) as exc:
            return self._send(422, {"error": "validation", "message": str(exc)})
        return self._send(200, {"threshold": registry.threshold})


def load_cases_file(path) -> list[dict]:
    """Case review payloads: one JSON object per line with case_id/tier/fields."""
    cases = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                cases.append(json.loads(line))
    return cases


def build_server(
    host: str,
    port: int,
    registry: ModelRegistry | None,
    store: LabelStore,
    cases: list[dict],
    tokens: dict[str, str],
    admin_token: str,
    guidance: str = "",
) -> ApiServer:
    server = ApiServer((host, port), registry, store, cases, tokens, admin_token, guidance)
    if registry is None and cases:
        pass  # label collection can run without models; predictions 409
    store.known_cases = {case["case_id"] for case in cases} or None
    return server
