import pytest

from carriersched.bench import CSV_HEADER, csv_rows, run_benchmark
from carriersched.core import (ProblemInstance, Role, Schedule, Timeslot,
                               Topology)
from carriersched.errors import BenchmarkError, ScheduleFailureError
from carriersched.exact import solve_optimal
from carriersched.heuristic import solve_heuristic

from conftest import small_corpus


def test_trivial_corpus_zero_deltas(path2):
    report = run_benchmark([path2],
                           {"optimal": solve_optimal,
                            "heuristic": solve_heuristic},
                           reference="heuristic")
    assert report.pi == {"optimal": 100.0, "heuristic": 100.0}
    for name in ("optimal", "heuristic"):
        assert report.deltas[name]["carriers_saved"].mean == 0.0
        assert report.deltas[name]["timeslots_saved"].mean == 0.0


def test_optimal_dominates_heuristic():
    corpus = small_corpus(30, seed=83, node_range=(2, 5), tag_range=(1, 4))
    report = run_benchmark(corpus,
                           {"optimal": solve_optimal,
                            "heuristic": solve_heuristic},
                           reference="heuristic")
    deltas = report.deltas["optimal"]["carriers_saved"]
    assert deltas.percentiles[1] >= 0.0  # optimal never uses more carriers
    assert report.pi["optimal"] == 100.0


def test_invalid_schedule_is_hard_error(path2):
    def broken(instance):
        n = instance.node_count
        return Schedule([Timeslot((Role.IDLE,) * n, ())])

    with pytest.raises(BenchmarkError):
        run_benchmark([path2], {"broken": broken, "heuristic": solve_heuristic},
                      reference="heuristic")


def test_failures_excluded_from_deltas_but_counted_in_pi():
    corpus = small_corpus(10, seed=89)

    calls = {"n": 0}

    def flaky(instance):
        calls["n"] += 1
        if calls["n"] % 2 == 0:
            raise ScheduleFailureError("induced failure")
        return solve_heuristic(instance)

    report = run_benchmark(corpus,
                           {"flaky": flaky, "heuristic": solve_heuristic},
                           reference="heuristic")
    assert report.pi["flaky"] == 50.0
    assert report.deltas["flaky"]["carriers_saved"].count == 5


def test_corpus_order_does_not_change_aggregates():
    corpus = small_corpus(12, seed=97, node_range=(2, 5), tag_range=(1, 3))
    fwd = run_benchmark(corpus, {"optimal": solve_optimal,
                                 "heuristic": solve_heuristic},
                        reference="heuristic")
    rev = run_benchmark(list(reversed(corpus)),
                        {"optimal": solve_optimal,
                         "heuristic": solve_heuristic},
                        reference="heuristic")
    a = fwd.deltas["optimal"]["carriers_saved"]
    b = rev.deltas["optimal"]["carriers_saved"]
    assert a.mean == b.mean
    assert a.percentiles == b.percentiles
    assert fwd.pi == rev.pi


def test_csv_schema(path2):
    report = run_benchmark([path2], {"heuristic": solve_heuristic},
                           reference="heuristic")
    rows = csv_rows(report)
    assert rows[0] == CSV_HEADER
    fields = rows[1].split(",")
    assert fields[0] == "0"              # instance_id
    assert fields[1] == "2"              # N
    assert fields[2] == "1"              # T
    assert fields[3] == "heuristic"
    assert fields[4] == "1"              # success
    assert fields[5] == "1" and fields[6] == "1" and fields[7] == "2"
    assert float(fields[8]) >= 0.0       # runtime_ms


def test_reference_must_be_listed(path2):
    with pytest.raises(ValueError):
        run_benchmark([path2], {"heuristic": solve_heuristic},
                      reference="optimal")


def test_empty_corpus_rejected():
    with pytest.raises(ValueError):
        run_benchmark([], {"heuristic": solve_heuristic},
                      reference="heuristic")


def test_report_json_shape(path2):
    report = run_benchmark([path2], {"heuristic": solve_heuristic},
                           reference="heuristic", metadata={"policy": "repair"})
    doc = report.to_json()
    assert doc["reference"] == "heuristic"
    assert doc["metadata"] == {"policy": "repair"}
    assert "sign_convention" in doc
    assert doc["pi_percent"]["heuristic"] == 100.0
    cell = doc["cells"]["heuristic"][0]
    assert cell["nodes"] == 2 and cell["tags"] == 1
