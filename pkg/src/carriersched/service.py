"""Schedule-request HTTP service.

POST /schedule?scheduler={gnn|heuristic|optimal} with an instance JSON
body returns 200 with a schedule JSON, 400 on parse/usage errors, 422 when
the instance is infeasible or the requested policy fails to deliver a
complete schedule. One immutable model is shared across concurrent
requests; per-request state is isolated, so identical requests produce
identical responses.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .core import ProblemInstance, Schedule
from .errors import (BudgetExceededError, InfeasibleInstanceError, ParseError,
                     ScheduleFailureError, SolverTimeoutError)
from .exact import SolverBudget, solve_optimal
from .gnn import InferencePolicy, schedule_with_gnn
from .heuristic import solve_heuristic
from .jsonio import emit_schedule, parse_instance
from .weights import GnnModel


class ScheduleService:
    """Request handling logic, kept separate from the HTTP plumbing."""

    def __init__(self, model: GnnModel | None,
                 policy: InferencePolicy = InferencePolicy(),
                 budget: SolverBudget = SolverBudget()):
        self.model = model
        self.policy = policy
        self.budget = budget

    def handle(self, scheduler: str, body: bytes) -> tuple[int, dict | bytes]:
        try:
            instance = parse_instance(body)
        except ParseError as exc:
            return 400, {"error": "parse", "field": exc.field, "rule": exc.rule}
        try:
            schedule = self._run(scheduler, instance)
        except ValueError as exc:
            return 400, {"error": "usage", "detail": str(exc)}
        except InfeasibleInstanceError as exc:
            return 422, {"error": "infeasible", "tag": exc.tag_id,
                         "detail": str(exc)}
        except ScheduleFailureError as exc:
            return 422, {"error": "schedule_failure", "detail": str(exc),
                         "slots_delivered": len(exc.partial_slots)}
        except (BudgetExceededError, SolverTimeoutError) as exc:
            return 422, {"error": "budget", "detail": str(exc)}
        return 200, emit_schedule(instance, schedule)

    def _run(self, scheduler: str, instance: ProblemInstance) -> Schedule:
        if scheduler == "heuristic":
            return solve_heuristic(instance)
        if scheduler == "optimal":
            return solve_optimal(instance, self.budget)
        if scheduler == "gnn":
            if self.model is None:
                raise ValueError("service started without a weight file; "
                                 "gnn scheduler unavailable")
            return schedule_with_gnn(self.model, instance, self.policy)
        raise ValueError(f"unknown scheduler {scheduler!r}; "
                         "expected gnn, heuristic or optimal")


class _Handler(BaseHTTPRequestHandler):
    service: ScheduleService  # set on the server class

    def do_POST(self):  # noqa: N802 (http.server API)
        parsed = urlparse(self.path)
        if parsed.path != "/schedule":
            self._send(404, {"error": "not_found"})
            return
        query = parse_qs(parsed.query)
        scheduler = query.get("scheduler", ["gnn"])[0]
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length)
        status, payload = self.server.service.handle(scheduler, body)
        self._send(status, payload)

    def _send(self, status: int, payload: dict | bytes):
        body = payload if isinstance(payload, bytes) else json.dumps(
            payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):  # keep tests and services quiet
        pass


class ScheduleServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], service: ScheduleService):
        super().__init__(address, _Handler)
        self.service = service


def make_server(host: str, port: int, model: GnnModel | None,
                policy: InferencePolicy = InferencePolicy(),
                budget: SolverBudget = SolverBudget()) -> ScheduleServer:
    return ScheduleServer((host, port), ScheduleService(model, policy, budget))
