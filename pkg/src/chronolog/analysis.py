"""Program analysis: dependency graphs, cycles, rule classification,
fragment detection, and repetition-pattern length.

The dependency graph is predicate-level with one edge per (body
predicate, head predicate, rule) triple. Temporal rules produce
"special" edges carrying an interval label (the operator range, negated
for the forward operators) and a shift label (the amount the operator
moves an interval's left endpoint into the future).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import networkx as nx

from .errors import CycleCapExceeded, InputError
from .intervals import Interval, TimePoint, lcm_rationals
from .syntax import (
    BoxMinus,
    DiamondMinus,
    Program,
    Rule,
    Since,
    Until,
    FP_FORMS,
    body_atoms,
    literal_contains_top,
    literal_intervals,
    rule_form,
)

DEFAULT_CYCLE_CAP = 100_000

_ZERO = TimePoint(Fraction(0))
_ZERO_INTERVAL = Interval.closed(0, 0)


@dataclass(frozen=True, slots=True)
class Edge:
    source: str
    target: str
    rule_id: str
    special: bool
    interval_label: Interval
    shift_label: TimePoint

    def __str__(self) -> str:
        tag = "*" if self.special else ""
        return f"{self.source} -{self.interval_label}{tag}-> {self.target}"


@dataclass(frozen=True)
class DepGraph:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]

    def incoming(self, node: str) -> list[Edge]:
        return [e for e in self.edges if e.target == node]

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.nodes)
        for idx, e in enumerate(self.edges):
            g.add_edge(e.source, e.target, key=idx)
        return g


def _edge_labels(rule: Rule) -> tuple[bool, Interval, TimePoint]:
    """(special, interval label, shift label) shared by a rule's edges."""
    form = rule_form(rule)
    if form is None:
        raise InputError(f"rule {rule.id} is not in temporal normal form")
    if form == 1:
        return False, _ZERO_INTERVAL, _ZERO
    lit = rule.body[0]
    if isinstance(lit, DiamondMinus):
        return True, lit.rho, lit.rho.lo
    if isinstance(lit, BoxMinus):
        return True, lit.rho, lit.rho.hi
    if isinstance(lit, (Since,)):
        return True, lit.rho, _ZERO
    if isinstance(lit, Until):
        return True, lit.rho.negate(), _ZERO
    # forward unary operators: diamondplus / boxplus
    return True, lit.rho.negate(), _ZERO


def dependency_graph(program: Program) -> DepGraph:
    """Predicate-level dependency graph of a normal-form program."""
    edges: list[Edge] = []
    for rule in program.rules:
        special, label, shift = _edge_labels(rule)
        head = rule.head.predicate
        seen: set[str] = set()
        for atom in body_atoms(rule):
            if atom.predicate in seen:
                continue
            seen.add(atom.predicate)
            edges.append(Edge(atom.predicate, head, rule.id, special, label, shift))
    return DepGraph(tuple(program.predicates()), tuple(edges))


@dataclass(frozen=True)
class Cycle:
    """An elementary cycle, identified by the edges it traverses."""

    edges: tuple[Edge, ...]

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(e.source for e in self.edges)

    @property
    def shift_sum(self) -> TimePoint:
        total = _ZERO
        for e in self.edges:
            total = total + e.shift_label
        return total

    @property
    def weight(self) -> Interval:
        total = _ZERO_INTERVAL
        for e in self.edges:
            total = total.minkowski(e.interval_label)
        return total

    @property
    def temporal_acyclic(self) -> bool:
        return self.weight == _ZERO_INTERVAL

    def __str__(self) -> str:
        return " -> ".join(self.nodes + (self.nodes[0],))


def _edge_cycles(graph: DepGraph, cap: int) -> list[Cycle]:
    """Enumerate elementary cycles at the edge level.

    Parallel edges matter here (two self-loops with different shifts are
    two cycles), so every edge is subdivided through a unique midpoint
    node before running the node-level circuit enumeration.
    """
    g = nx.DiGraph()
    for node in graph.nodes:
        g.add_node(("p", node))
    for idx, e in enumerate(graph.edges):
        g.add_edge(("p", e.source), ("e", idx))
        g.add_edge(("e", idx), ("p", e.target))
    cycles: list[Cycle] = []
    for cyc in nx.simple_cycles(g):
        idxs = [n[1] for n in cyc if n[0] == "e"]
        first = idxs.index(min(idxs))
        idxs = idxs[first:] + idxs[:first]
        cycles.append(Cycle(tuple(graph.edges[i] for i in idxs)))
        if len(cycles) > cap:
            raise CycleCapExceeded(f"more than {cap} simple cycles")
    cycles.sort(key=lambda c: tuple(e.rule_id for e in c.edges))
    return cycles


def simple_cycles(
    graph: DepGraph, cycle_cap: int = DEFAULT_CYCLE_CAP
) -> dict[frozenset[str], list[Cycle]]:
    """All elementary cycles, grouped by the SCC they live in."""
    g = graph.to_networkx()
    out: dict[frozenset[str], list[Cycle]] = {}
    for comp in nx.strongly_connected_components(g):
        members = frozenset(comp)
        sub = DepGraph(
            tuple(sorted(members)),
            tuple(e for e in graph.edges if e.source in members and e.target in members),
        )
        out[members] = _edge_cycles(sub, cycle_cap)
    return out


def pattern_length(program: Program, cycle_cap: int = DEFAULT_CYCLE_CAP) -> Fraction:
    """Length of the repetition pattern of a forward-propagating program.

    Per SCC: collect the finite shift sums of its simple cycles and take
    the lcm of the positive ones (1 when there are none). The overall
    length is the lcm across SCCs. The result is predicate-level and
    therefore unchanged by grounding.
    """
    if not program.is_normal_form:
        raise InputError("pattern length requires a normal-form program")
    if not all(rule_form(r) in FP_FORMS for r in program.rules):
        raise InputError("pattern length is defined for forward-propagating programs")
    graph = dependency_graph(program)
    lengths: list[Fraction] = []
    for _, cycles in sorted(simple_cycles(graph, cycle_cap).items(), key=lambda kv: sorted(kv[0])):
        sums = [
            c.shift_sum.as_fraction()
            for c in cycles
            if c.shift_sum.is_finite and c.shift_sum > _ZERO
        ]
        lengths.append(lcm_rationals(sums) if sums else Fraction(1))
    return lcm_rationals(lengths) if lengths else Fraction(1)


def max_applications(t1: Fraction | int, t2: Fraction | int) -> int:
    """Upper bound on self-loop applications before a diamond cycle settles.

    For a rule shifting by the range [t1, t2], the derived interval grows
    by t2 - t1 per application, so after floor(t1/(t2-t1) + 1) rounds the
    new interval overlaps the previous one.
    """
    t1, t2 = Fraction(t1), Fraction(t2)
    if not 0 <= t1 < t2:
        raise ValueError("required: 0 <= t1 < t2")
    return math.floor(t1 / (t2 - t1) + 1)


# ---------------------------------------------------------------------------
# Fragment detection
# ---------------------------------------------------------------------------

class RuleClass(Enum):
    HARMLESS = "harmless"
    HARMFUL = "harmful"
    DANGEROUS = "dangerous"


@dataclass(frozen=True)
class FragmentFlags:
    bounded: bool
    union_free: bool
    temporal_linear: bool
    forward_propagating: bool


def fragment_checks(program: Program) -> FragmentFlags:
    """Syntactic fragment membership of a normal-form program."""
    if not program.is_normal_form:
        raise InputError("fragment checks require a normal-form program")
    bounded = not program.axioms
    for rule in program.rules:
        for lit in rule.body + (rule.head,):
            if literal_contains_top(lit):
                bounded = False
            for rho in literal_intervals(lit):
                if not rho.is_bounded:
                    bounded = False

    heads: list = []
    for rule in program.rules:
        head = rule.head
        heads.append(head if program.is_ground else head.predicate)
    union_free = len(heads) == len(set(heads))

    graph = dependency_graph(program)
    g = graph.to_networkx()
    scc_of: dict[str, int] = {}
    scc_special: set[int] = set()
    for i, comp in enumerate(nx.strongly_connected_components(g)):
        for node in comp:
            scc_of[node] = i
    for e in graph.edges:
        if e.special and scc_of[e.source] == scc_of[e.target]:
            scc_special.add(scc_of[e.source])

    temporal_linear = True
    for rule in program.rules:
        head = rule.head.predicate
        recursive = {
            a.predicate
            for a in body_atoms(rule)
            if scc_of[a.predicate] == scc_of[head] and scc_of[head] in scc_special
        }
        if len(recursive) > 1:
            temporal_linear = False

    forward = all(rule_form(r) in FP_FORMS for r in program.rules)
    return FragmentFlags(bounded, union_free, temporal_linear, forward)


@dataclass(frozen=True)
class FragmentReport:
    flags: FragmentFlags
    rule_classes: dict[str, RuleClass]
    finite_nodes: dict[str, str]  # node -> marking case "i".."iv"
    harmless_program: bool
    pattern_len: Fraction | None
    cycles: list[Cycle]
    warning: str | None = None

    @property
    def bounded(self) -> bool:
        return self.flags.bounded

    @property
    def union_free(self) -> bool:
        return self.flags.union_free

    @property
    def temporal_linear(self) -> bool:
        return self.flags.temporal_linear

    @property
    def forward_propagating(self) -> bool:
        return self.flags.forward_propagating


def _finite_marking(
    program: Program,
    graph: DepGraph,
    all_cycles: list[Cycle],
    seedable: frozenset[str],
) -> dict[str, str]:
    """Fixpoint of the four finite-node cases.

    Rounds are synchronous: every unmarked node is tested against the
    state at the start of the round, so the outcome and the case
    attribution are independent of node order. An edge counts as finite
    when its rule has some body atom whose node is already finite.

    Case specifics:
      i    no incoming edge.
      ii   every incoming edge finite.
      iii  after deleting finite nodes and edges, the node's SCC receives
           no surviving outside edge and all its cycles are temporal-acyclic.
      iv   the node lies on at least one cycle, and every cycle through it
           has no database-fed node and only incoming rules that intersect
           the cycle (some body predicate on the cycle).
    """
    body_preds = {
        r.id: {a.predicate for a in body_atoms(r)} for r in program.rules
    }
    cycles_through: dict[str, list[Cycle]] = {n: [] for n in graph.nodes}
    for cyc in all_cycles:
        for node in set(cyc.nodes):
            cycles_through[node].append(cyc)
    head_rules: dict[str, list[Rule]] = {n: [] for n in graph.nodes}
    for r in program.rules:
        head_rules[r.head.predicate].append(r)

    finite: dict[str, str] = {}

    def edge_is_finite(edge: Edge) -> bool:
        return any(p in finite for p in body_preds[edge.rule_id])

    def case_iii(node: str, finite_edges: set[int]) -> bool:
        keep_edges = [
            e
            for i, e in enumerate(graph.edges)
            if i not in finite_edges and e.source not in finite and e.target not in finite
        ]
        g = nx.DiGraph()
        g.add_nodes_from(n for n in graph.nodes if n not in finite)
        g.add_edges_from((e.source, e.target) for e in keep_edges)
        scc = next(c for c in nx.strongly_connected_components(g) if node in c)
        if any(e.target in scc and e.source not in scc for e in keep_edges):
            return False
        inner = DepGraph(
            tuple(sorted(scc)),
            tuple(e for e in keep_edges if e.source in scc and e.target in scc),
        )
        return all(c.temporal_acyclic for c in _edge_cycles(inner, DEFAULT_CYCLE_CAP))

    def case_iv(node: str) -> bool:
        cycles = cycles_through[node]
        if not cycles:
            return False
        for cyc in cycles:
            members = set(cyc.nodes)
            if members & seedable:
                return False
            for member in members:
                for rule in head_rules[member]:
                    if not (body_preds[rule.id] & members):
                        return False
        return True

    changed = True
    while changed:
        changed = False
        finite_edges = {
            i for i, e in enumerate(graph.edges) if edge_is_finite(e)
        }
        marks: dict[str, str] = {}
        for node in graph.nodes:
            if node in finite:
                continue
            incoming = graph.incoming(node)
            if not incoming:
                marks[node] = "i"
            elif all(i in finite_edges for i, e in enumerate(graph.edges) if e.target == node):
                marks[node] = "ii"
            elif case_iii(node, finite_edges):
                marks[node] = "iii"
            elif case_iv(node):
                marks[node] = "iv"
        if marks:
            finite.update(marks)
            changed = True
    return finite


def classify_rules(
    program: Program,
    database=None,
    cycle_cap: int = DEFAULT_CYCLE_CAP,
) -> FragmentReport:
    """Classify every rule as harmless, harmful, or dangerous.

    ``database`` (a Model), when given, marks its predicates as
    database-fed: cycles through fed nodes lose the empty-cycle
    assumption behind case (iv). Unbounded programs skip the marking
    fixpoint entirely and report a warning.
    """
    if not program.is_normal_form:
        raise InputError("classification requires a normal-form program")
    flags = fragment_checks(program)
    graph = dependency_graph(program)
    per_scc = simple_cycles(graph, cycle_cap)
    all_cycles = [c for cycles in per_scc.values() for c in cycles]

    warning = None
    if flags.bounded:
        seedable = frozenset(
            atom.predicate for atom in database.atoms()
        ) if database is not None else frozenset()
        finite = _finite_marking(program, graph, all_cycles, seedable)
    else:
        finite = {}
        warning = "program is unbounded; no node was marked finite"

    classes: dict[str, RuleClass] = {}
    for rule in program.rules:
        if any(a.predicate in finite for a in body_atoms(rule)):
            classes[rule.id] = RuleClass.HARMLESS
        elif rule_form(rule) == 1:
            classes[rule.id] = RuleClass.HARMFUL
        else:
            classes[rule.id] = RuleClass.DANGEROUS

    harmless = all(c is RuleClass.HARMLESS for c in classes.values())
    plength = None
    if flags.forward_propagating:
        plength = pattern_length(program, cycle_cap)
    return FragmentReport(
        flags=flags,
        rule_classes=classes,
        finite_nodes=finite,
        harmless_program=harmless,
        pattern_len=plength,
        cycles=all_cycles,
        warning=warning,
    )
