import json
import threading
import urllib.request
from urllib.error import HTTPError

import pytest

from carriersched.features import PeMode
from carriersched.gnn import InferencePolicy, RepairMode
from carriersched.service import make_server
from carriersched.weights import GnnConfig, random_model

TRIVIAL = b'{"nodes":2,"edges":[[0,1]],"tags":[{"id":1,"host":0}]}'
DISCONNECTED = b'{"nodes":4,"edges":[[0,1],[2,3]],"tags":[{"id":1,"host":0}]}'
ISOLATED_HOST = b'{"nodes":1,"edges":[],"tags":[{"id":1,"host":0}]}'


@pytest.fixture(scope="module")
def server():
    model = random_model(GnnConfig(num_blocks=2, num_heads=2, hidden_dim=8,
                                   pe_mode=PeMode.DEGREE), seed=5)
    srv = make_server("127.0.0.1", 0, model,
                      InferencePolicy(repair=RepairMode.HEURISTIC_FALLBACK))
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{srv.server_address[1]}"
    srv.shutdown()
    srv.server_close()


def post(base: str, path: str, body: bytes):
    req = urllib.request.Request(base + path, data=body, method="POST")
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except HTTPError as exc:
        return exc.code, json.loads(exc.read())


def test_heuristic_schedules_trivial_instance(server):
    status, doc = post(server, "/schedule?scheduler=heuristic", TRIVIAL)
    assert status == 200
    assert doc["L"] == 1 and doc["C"] == 1
    assert doc["slots"][0]["interrogations"] == [
        {"node": 0, "tag": 1, "carrier": 1}]


def test_parse_error_is_400(server):
    status, doc = post(server, "/schedule?scheduler=heuristic", DISCONNECTED)
    assert status == 400
    assert doc["error"] == "parse"


def test_infeasible_is_422(server):
    status, doc = post(server, "/schedule?scheduler=optimal", ISOLATED_HOST)
    assert status == 422
    assert doc["error"] == "infeasible"
    assert doc["tag"] == 1


def test_unknown_scheduler_is_400(server):
    status, doc = post(server, "/schedule?scheduler=quantum", TRIVIAL)
    assert status == 400
    assert doc["error"] == "usage"


def test_unknown_path_is_404(server):
    status, doc = post(server, "/other", TRIVIAL)
    assert status == 404


def test_gnn_scheduler_responds_and_is_deterministic(server):
    first = post(server, "/schedule?scheduler=gnn", TRIVIAL)
    second = post(server, "/schedule?scheduler=gnn", TRIVIAL)
    assert first == second
    assert first[0] in (200, 422)


def test_concurrent_requests(server):
    results = []

    def hit():
        results.append(post(server, "/schedule?scheduler=heuristic", TRIVIAL))

    threads = [threading.Thread(target=hit) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(results) == 8
    assert all(r == results[0] for r in results)


def test_gnn_unavailable_without_weights():
    srv = make_server("127.0.0.1", 0, None)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    try:
        status, doc = post(base, "/schedule?scheduler=gnn", TRIVIAL)
        assert status == 400
        assert "weight" in doc["detail"]
    finally:
        srv.shutdown()
        srv.server_close()
