import itertools

import pytest

from carriersched.core import (ProblemInstance, Topology, schedule_cost,
                               validate_schedule)
from carriersched.errors import (BudgetExceededError, InfeasibleInstanceError,
                                 SolverTimeoutError)
from carriersched.exact import SolverBudget, solve_optimal

from conftest import small_corpus
from oracle import all_connected_topologies, brute_force_best


def solver_tuple(instance, schedule):
    """(objective, slot_vec, carrier_vec, C, L) in oracle layout."""
    cost = schedule_cost(instance, schedule)
    slot_of, carrier_of = {}, {}
    for s, slot in enumerate(schedule.slots, start=1):
        for rec in slot.interrogations:
            slot_of[rec.tag_id] = s
            carrier_of[rec.tag_id] = rec.carrier
    tag_ids = [t for t, _ in instance.tags]
    return (cost.objective, tuple(slot_of[t] for t in tag_ids),
            tuple(carrier_of[t] for t in tag_ids), cost.carriers, cost.length)


class TestSpecExamples:
    def test_trivial_path(self, path2):
        schedule = solve_optimal(path2)
        assert validate_schedule(path2, schedule).valid
        assert solver_tuple(path2, schedule) == (2, (1,), (1,), 1, 1)

    def test_shared_carrier_path(self, path3_two_tags):
        schedule = solve_optimal(path3_two_tags)
        assert validate_schedule(path3_two_tags, schedule).valid
        # one slot, carrier v1 for both tags, lexicographic carriers [1, 1]
        assert solver_tuple(path3_two_tags, schedule) == \
            (3, (1, 1), (1, 1), 1, 1)

    def test_star_two_slots_lexicographic(self, star_two_tags):
        schedule = solve_optimal(star_two_tags)
        assert validate_schedule(star_two_tags, schedule).valid
        # slot vector [1, 2] minimal, carrier v1 in both slots
        assert solver_tuple(star_two_tags, schedule) == \
            (6, (1, 2), (1, 1), 2, 2)


class TestErrors:
    def test_single_node_infeasible(self):
        inst = ProblemInstance(Topology(1, []), [(1, 0)])
        with pytest.raises(InfeasibleInstanceError) as exc:
            solve_optimal(inst)
        assert exc.value.tag_id == 1

    def test_budget_refusal_on_node_count(self, path3_two_tags):
        with pytest.raises(BudgetExceededError):
            solve_optimal(path3_two_tags, SolverBudget(max_nodes=2))

    def test_budget_refusal_on_tag_explosion(self, path3_two_tags):
        with pytest.raises(BudgetExceededError):
            solve_optimal(path3_two_tags,
                          SolverBudget(node_expansion_limit=2))

    def test_timeout_carries_incumbent_attribute(self, path3_two_tags):
        with pytest.raises(SolverTimeoutError) as exc:
            solve_optimal(path3_two_tags,
                          SolverBudget(time_limit=-1.0))
        assert hasattr(exc.value, "incumbent")


class TestOracleEquivalence:
    def test_exhaustive_tiny_topologies(self):
        # all connected labeled graphs with N <= 3, all placements T <= 2
        for n in (2, 3):
            for topo in all_connected_topologies(n):
                for t in (1, 2):
                    for hosts in itertools.product(range(n), repeat=t):
                        inst = ProblemInstance(
                            topo, [(k + 1, h) for k, h in enumerate(hosts)])
                        best = brute_force_best(inst)
                        schedule = solve_optimal(inst)
                        assert validate_schedule(inst, schedule).valid
                        assert solver_tuple(inst, schedule) == best

    def test_random_small_instances_match_oracle(self):
        for inst in small_corpus(60, seed=17, node_range=(2, 5),
                                 tag_range=(1, 4)):
            best = brute_force_best(inst)
            schedule = solve_optimal(inst)
            assert validate_schedule(inst, schedule).valid
            assert solver_tuple(inst, schedule) == best


class TestDeterminismAndPruning:
    def test_bit_exact_repeatability(self):
        for inst in small_corpus(15, seed=23, node_range=(2, 6),
                                 tag_range=(1, 5)):
            assert solve_optimal(inst) == solve_optimal(inst)

    def test_pruning_never_changes_result(self):
        for inst in small_corpus(15, seed=29, node_range=(2, 5),
                                 tag_range=(1, 4)):
            assert solve_optimal(inst, prune=True) == \
                solve_optimal(inst, prune=False)

    def test_c_at_least_l(self):
        for inst in small_corpus(25, seed=37, node_range=(2, 6),
                                 tag_range=(1, 5)):
            cost = schedule_cost(inst, solve_optimal(inst))
            assert cost.carriers >= cost.length
