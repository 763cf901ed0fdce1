"""Dependency graphs, cycle enumeration, classification, pattern length."""

import random
from fractions import Fraction as F

import pytest

from chronolog.analysis import (
    RuleClass,
    classify_rules,
    dependency_graph,
    fragment_checks,
    max_applications,
    pattern_length,
    simple_cycles,
)
from chronolog.errors import CycleCapExceeded
from chronolog.intervals import Interval, TimePoint, POS_INF, parse_interval
from chronolog.reasoner import naive_fixpoint_bounded
from chronolog.syntax import Program, parse_database, parse_program


WORKED_EXAMPLE = "diamondminus[3,4] A -> B .\nboxminus[3,4] B -> A ."

NONLINEAR_DIAMOND = (
    "A, B -> C .\n"
    "diamondminus[3,5] C -> A .\n"
    "diamondminus[5,6] C -> B ."
)

FIGURE_PROGRAM = """
diamondminus[1,2] X -> Y .
diamondminus[3,5] Y -> A .
A -> B .
B -> C .
C -> A .
C -> D .
diamondminus[1,2] D -> D .
D, E -> E .
diamondminus[1,2] E -> E .
"""


class TestDependencyGraph:
    def test_worked_example_two_special_edges(self):
        g = dependency_graph(parse_program(WORKED_EXAMPLE))
        assert g.nodes == ("A", "B")
        assert len(g.edges) == 2
        assert all(e.special for e in g.edges)
        shifts = {(e.source, e.target): e.shift_label for e in g.edges}
        assert shifts[("A", "B")] == TimePoint.of(3)  # diamond labels its left end
        assert shifts[("B", "A")] == TimePoint.of(4)  # box labels its right end

    def test_empty_program(self):
        g = dependency_graph(Program(()))
        assert g.nodes == () and g.edges == ()

    def test_nonlinear_diamond_edges(self):
        g = dependency_graph(parse_program(NONLINEAR_DIAMOND))
        by_pair = {(e.source, e.target): e for e in g.edges}
        assert set(by_pair) == {("A", "C"), ("B", "C"), ("C", "A"), ("C", "B")}
        assert by_pair[("A", "C")].shift_label == TimePoint.of(0)
        assert by_pair[("B", "C")].shift_label == TimePoint.of(0)
        assert by_pair[("C", "A")].shift_label == TimePoint.of(3)
        assert by_pair[("C", "B")].shift_label == TimePoint.of(5)

    def test_unbounded_box_shift_is_infinite(self):
        g = dependency_graph(parse_program("boxminus[3,inf) A -> B ."))
        assert g.edges[0].shift_label == POS_INF

    def test_duplicate_body_predicate_single_edge(self):
        g = dependency_graph(parse_program("A(c), A(d) -> B ."))
        assert len(g.edges) == 1

    def test_shift_label_is_an_interval_label_endpoint(self):
        for text in (WORKED_EXAMPLE, NONLINEAR_DIAMOND, FIGURE_PROGRAM):
            for e in dependency_graph(parse_program(text)).edges:
                assert e.shift_label in (e.interval_label.lo, e.interval_label.hi)


class TestSimpleCycles:
    def test_worked_example_single_cycle(self):
        g = dependency_graph(parse_program(WORKED_EXAMPLE))
        per_scc = simple_cycles(g)
        cycles = per_scc[frozenset({"A", "B"})]
        assert len(cycles) == 1
        (cycle,) = cycles
        assert cycle.shift_sum == TimePoint.of(7)
        # Minkowski sum of the labels [3,4] + [3,4]
        assert cycle.weight == parse_interval("[6,8]")

    def test_self_loop(self):
        g = dependency_graph(parse_program("diamondminus[1,2] D -> D ."))
        cycles = simple_cycles(g)[frozenset({"D"})]
        assert len(cycles) == 1
        assert cycles[0].shift_sum == TimePoint.of(1)

    def test_acyclic(self):
        g = dependency_graph(parse_program("A -> B .\nB -> C ."))
        assert all(not cycles for cycles in simple_cycles(g).values())

    def test_parallel_self_loops_are_distinct_cycles(self):
        g = dependency_graph(
            parse_program("diamondminus[1,2] E -> E .\nE -> E .")
        )
        cycles = simple_cycles(g)[frozenset({"E"})]
        assert sorted(str(c.shift_sum) for c in cycles) == ["0", "1"]

    def test_cycle_cap(self):
        # complete digraph on 6 nodes has > 400 elementary cycles
        names = ["N0", "N1", "N2", "N3", "N4", "N5"]
        rules = [
            f"{a} -> {b} ." for a in names for b in names if a != b
        ]
        g = dependency_graph(parse_program("\n".join(rules)))
        with pytest.raises(CycleCapExceeded):
            simple_cycles(g, cycle_cap=10)


class TestClassification:
    def test_figure_marking_cases(self):
        """Each node is marked by the expected case: source (i), fed by
        finite edges (ii), temporal-acyclic component (iii),
        intersection-guarded cycle (iv); the unguarded temporal self-loop
        stays unmarked."""
        report = classify_rules(parse_program(FIGURE_PROGRAM))
        assert report.finite_nodes == {
            "X": "i",
            "Y": "ii",
            "A": "iii",
            "B": "iii",
            "C": "iii",
            "E": "iv",
        }
        assert "D" not in report.finite_nodes

    def test_box_self_loop_with_seeded_cycle_is_dangerous(self):
        program = parse_program("boxminus[3,7] A -> A .")
        report = classify_rules(program, parse_database("A@[0,1]."))
        assert report.rule_classes["r1"] is RuleClass.DANGEROUS
        assert not report.harmless_program

    def test_box_self_loop_without_database_is_guarded(self):
        report = classify_rules(parse_program("boxminus[3,7] A -> A ."))
        assert report.finite_nodes == {"A": "iv"}

    def test_edb_edge_is_harmless(self):
        report = classify_rules(parse_program("A -> B ."))
        assert report.rule_classes["r1"] is RuleClass.HARMLESS
        assert report.harmless_program

    def test_harmful_horn_cycle(self):
        # Horn recursion with no finite body atom is harmful, not dangerous
        program = parse_program(
            "diamondminus[1,2] S -> S .\nS -> P .\nP -> S ."
        )
        report = classify_rules(program, parse_database("S@[0,1]."))
        assert report.rule_classes["r2"] is RuleClass.HARMFUL
        assert report.rule_classes["r1"] is RuleClass.DANGEROUS

    def test_unbounded_program_warns_and_marks_nothing(self):
        report = classify_rules(parse_program("diamondminus[0,inf) A -> B ."))
        assert report.warning is not None
        assert report.finite_nodes == {}

    def test_marking_is_rule_order_independent(self):
        lines = [l for l in FIGURE_PROGRAM.strip().splitlines()]
        rng = random.Random(7)
        baseline = classify_rules(parse_program(FIGURE_PROGRAM)).finite_nodes
        for _ in range(5):
            rng.shuffle(lines)
            report = classify_rules(parse_program("\n".join(lines)))
            assert report.finite_nodes == baseline


class TestFragmentChecks:
    def test_union_violating_box_program(self):
        flags = fragment_checks(
            parse_program(
                "A -> B .\nboxminus[1,2] A -> B .\nboxminus[10,12] B -> A ."
            )
        )
        assert not flags.union_free
        assert flags.temporal_linear

    def test_alternating_diamond_box_program(self):
        flags = fragment_checks(
            parse_program("diamondminus[5,6] A -> B .\nboxminus[4,5] B -> A .")
        )
        assert flags.union_free
        assert flags.temporal_linear
        assert flags.forward_propagating

    def test_forward_operator_breaks_fp(self):
        flags = fragment_checks(parse_program("diamondplus[1,2] A -> B ."))
        assert not flags.forward_propagating

    def test_join_inside_temporal_cycle_breaks_linearity(self):
        flags = fragment_checks(parse_program(NONLINEAR_DIAMOND))
        assert not flags.temporal_linear

    def test_union_free_atom_level_for_ground(self):
        ground_p = parse_program("A(c) -> B(c) .\nA(d) -> B(d) .")
        assert fragment_checks(ground_p).union_free
        nonground = parse_program("A(X) -> B(X) .\nC(X) -> B(X) .")
        assert not fragment_checks(nonground).union_free

    def test_boundedness(self):
        assert fragment_checks(parse_program("A -> B .")).bounded
        assert not fragment_checks(parse_program("diamondminus[0,inf) A -> B .")).bounded
        # a rule firing everywhere normalizes to an always-true fact
        from chronolog.syntax import to_normal_form

        assert not fragment_checks(to_normal_form(parse_program("top -> B ."))).bounded
        # a vacuous `top` conjunct normalizes away and stays bounded
        assert fragment_checks(to_normal_form(parse_program("top, A -> B ."))).bounded


class TestPatternLength:
    def test_worked_example(self):
        assert pattern_length(parse_program(WORKED_EXAMPLE)) == 7

    def test_horn_only(self):
        assert pattern_length(parse_program("A -> B .\nB -> A .")) == 1

    def test_two_cycle_lcm(self):
        assert pattern_length(parse_program(NONLINEAR_DIAMOND)) == 15

    def test_two_cycle_length_is_a_valid_period(self):
        """The derived model repeats with the computed length even when a
        shorter true period exists: content of [T, T+L) shifted by L
        matches [T+L, T+2L)."""
        program = parse_program(NONLINEAR_DIAMOND)
        db = parse_database("A@[0,3].\nB@[2,4].")
        length = pattern_length(program)
        assert length == 15
        T = F(20)
        horizon = T + 2 * length
        model = naive_fixpoint_bounded(program, db, horizon)
        first = Interval(TimePoint.of(T), TimePoint.of(T + length), False, True)
        second = Interval(TimePoint.of(T + length), TimePoint.of(T + 2 * length), False, True)
        for atom in model.atoms():
            lhs = model.get(atom).clip(first).shift(length)
            assert lhs == model.get(atom).clip(second), atom

    def test_infinite_shift_cycles_skipped(self):
        program = parse_program(
            "boxminus[3,inf) A -> A .\ndiamondminus[2,4] A -> A ."
        )
        assert pattern_length(program) == 2

    def test_unbounded_fraction_periods(self):
        program = parse_program(
            "diamondminus[1/2,1] A -> B .\ndiamondminus[1/4,1] B -> A ."
        )
        assert pattern_length(program) == F(3, 4)

    def test_divisible_by_every_scc_length(self):
        program = parse_program(
            "diamondminus[3,4] A -> A .\n"
            "diamondminus[5,6] B -> B .\n"
            "A -> B ."
        )
        total = pattern_length(program)
        assert total == 15
        for sub in ("diamondminus[3,4] A -> A .", "diamondminus[5,6] B -> B ."):
            assert total % pattern_length(parse_program(sub)) == 0


class TestMaxApplications:
    def test_documented_values(self):
        assert max_applications(3, 4) == 4
        assert max_applications(0, 5) == 1
        assert max_applications(5, 6) == 6

    def test_fractional(self):
        assert max_applications(F(3, 2), F(2)) == 4

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            max_applications(4, 4)
        with pytest.raises(ValueError):
            max_applications(5, 3)

    @pytest.mark.parametrize("t1,t2", [(3, 4), (5, 6), (1, 3), (0, 2)])
    def test_bound_matches_oracle_round_count(self, t1, t2):
        """Applying the self-loop rule one step at a time, the derived
        pieces start chaining into a single growing interval within the
        predicted number of applications."""
        bound = max_applications(t1, t2)
        rho = parse_interval(f"[{t1},{t2}]")
        current = parse_interval("[0,1]")
        from chronolog.intervals import IntervalSet, diamond_minus_apply

        reached = IntervalSet.of(current)
        merged_round = None
        for step in range(1, bound + 2):
            nxt = diamond_minus_apply(current, rho)
            before = len(reached)
            reached = reached.insert(nxt)
            if len(reached) <= before and merged_round is None:
                merged_round = step
                break
            current = nxt
        assert merged_round is not None and merged_round <= bound
