"""Process patterns: labeled node sets with typed pairwise relations.

Every pair of pattern nodes carries exactly one relation out of direct,
eventual, or concurrent (direct/eventual are stored in forward orientation
only).  A pattern occurs in a partially ordered trace wherever an injective
node-to-event assignment preserves labels and the relation classification of
every pair.  Canonical keys make label-preserving isomorphic patterns
indistinguishable, which is what deduplication and session bookkeeping hash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .log_model import EventLog
from .partial_order import (
    CONCURRENT,
    DIRECT,
    EVENTUAL,
    OracleConfig,
    POTrace,
    convert_log,
)

DEFAULT_MAX_PATTERN_SIZE = 10
DEFAULT_MAX_INSTANCES_PER_TRACE = 10_000

_FORWARD_KINDS = (DIRECT, EVENTUAL, CONCURRENT)

# pair codes shared with partial_order's relation table
_CODE = {CONCURRENT: 0, DIRECT: 1, EVENTUAL: 2}
_INVERSE = {0: 0, 1: 3, 2: 4}
_KEY_CHAR = {0: "c", 1: "d", 2: "e"}


class PatternError(Exception):
    """Base class for pattern construction and matching failures."""


class PatternTooLarge(PatternError):
    def __init__(self, size: int, limit: int) -> None:
        super().__init__(f"pattern with {size} nodes exceeds the {limit}-node limit")
        self.size = size
        self.limit = limit


class InstanceCapExceeded(PatternError):
    def __init__(self, case_id: str, cap: int) -> None:
        super().__init__(f"trace {case_id!r} yields more than {cap} instances")
        self.case_id = case_id
        self.cap = cap


@dataclass(frozen=True)
class Pattern:
    """Immutable pattern over nodes 0..n-1.

    `relations` holds one entry per unordered node pair: (u, v, kind) with
    kind "direct"/"eventual" meaning u precedes v, and "concurrent" stored
    with u < v.  `foundational` links back to the pattern this one extends
    and never affects equality or identity.
    """

    labels: tuple[str, ...]
    relations: tuple[tuple[int, int, str], ...] = ()
    foundational: "Pattern | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n == 0:
            raise PatternError("pattern needs at least one node")
        if any(not label for label in self.labels):
            raise PatternError("node labels must be non-empty")
        seen: set[frozenset[int]] = set()
        for u, v, kind in self.relations:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise PatternError(f"bad relation endpoints ({u}, {v})")
            if kind not in _FORWARD_KINDS:
                raise PatternError(f"unknown relation kind {kind!r}")
            if kind == CONCURRENT and u > v:
                raise PatternError("concurrent pairs are stored with u < v")
            pair = frozenset((u, v))
            if pair in seen:
                raise PatternError(f"duplicate relation for pair ({u}, {v})")
            seen.add(pair)
        if len(seen) != n * (n - 1) // 2:
            raise PatternError("relation map must cover every node pair")
        if self._has_cycle():
            raise PatternError("direct/eventual relations must form a DAG")

    def _has_cycle(self) -> bool:
        succ: dict[int, list[int]] = {u: [] for u in range(len(self.labels))}
        for u, v, kind in self.relations:
            if kind != CONCURRENT:
                succ[u].append(v)
        state = [0] * len(self.labels)  # 0 new, 1 active, 2 done

        def visit(node: int) -> bool:
            state[node] = 1
            for nxt in succ[node]:
                if state[nxt] == 1 or (state[nxt] == 0 and visit(nxt)):
                    return True
            state[node] = 2
            return False

        return any(state[node] == 0 and visit(node) for node in range(len(self.labels)))

    def __len__(self) -> int:
        return len(self.labels)

    @cached_property
    def codes(self) -> tuple[tuple[int, ...], ...]:
        """Full pair-relation table in the shared 0..4 encoding."""
        n = len(self.labels)
        table = [[0] * n for _ in range(n)]
        for u, v, kind in self.relations:
            code = _CODE[kind]
            table[u][v] = code
            table[v][u] = _INVERSE[code]
        return tuple(tuple(row) for row in table)

    @cached_property
    def topo_order(self) -> tuple[int, ...]:
        """Deterministic topological order of the direct/eventual DAG."""
        n = len(self.labels)
        preds: dict[int, set[int]] = {v: set() for v in range(n)}
        for u, v, kind in self.relations:
            if kind != CONCURRENT:
                preds[v].add(u)
        order: list[int] = []
        placed: set[int] = set()
        while len(order) < n:
            ready = [v for v in range(n) if v not in placed and preds[v] <= placed]
            nxt = min(ready)
            order.append(nxt)
            placed.add(nxt)
        return tuple(order)

    @cached_property
    def canonical(self) -> str:
        return canonical_key(self)

    @cached_property
    def id(self) -> str:
        return hashlib.sha256(self.canonical.encode("utf-8")).hexdigest()[:16]

    @property
    def foundational_id(self) -> str | None:
        return self.foundational.id if self.foundational is not None else None

    def with_foundational(self, parent: "Pattern | None") -> "Pattern":
        return Pattern(labels=self.labels, relations=self.relations, foundational=parent)

    def to_dict(self) -> dict:
        return {
            "nodes": [{"id": i, "label": label} for i, label in enumerate(self.labels)],
            "relations": [{"from": u, "to": v, "kind": kind} for u, v, kind in self.relations],
            "foundational": self.foundational_id,
        }

    @classmethod
    def from_dict(cls, data: Mapping, foundational: "Pattern | None" = None) -> "Pattern":
        nodes = sorted(data["nodes"], key=lambda node: node["id"])
        if [node["id"] for node in nodes] != list(range(len(nodes))):
            raise PatternError("node ids must be 0..n-1")
        labels = tuple(node["label"] for node in nodes)
        relations = normalize_relations(
            labels, {(rel["from"], rel["to"]): rel["kind"] for rel in data["relations"]}
        )
        return cls(labels=labels, relations=relations, foundational=foundational)


def normalize_relations(
    labels: tuple[str, ...], rel: Mapping[tuple[int, int], str]
) -> tuple[tuple[int, int, str], ...]:
    """Normalize a pair->kind mapping into the stored orientation and order."""
    normalized: dict[frozenset[int], tuple[int, int, str]] = {}
    for (u, v), kind in rel.items():
        if kind == CONCURRENT:
            entry = (min(u, v), max(u, v), CONCURRENT)
        else:
            entry = (u, v, kind)
        pair = frozenset((u, v))
        if pair in normalized and normalized[pair] != entry:
            raise PatternError(f"conflicting relations for pair ({u}, {v})")
        normalized[pair] = entry
    return tuple(sorted(normalized.values()))


def pattern(labels: Iterable[str], rel: Mapping[tuple[int, int], str] | None = None,
            foundational: Pattern | None = None) -> Pattern:
    """Convenience constructor from a pair->kind mapping."""
    labels = tuple(labels)
    return Pattern(
        labels=labels,
        relations=normalize_relations(labels, rel or {}),
        foundational=foundational,
    )


def singleton_pattern(activity: str) -> Pattern:
    """A one-node pattern; by definition it has no foundational pattern."""
    if not activity:
        raise PatternError("activity label must be non-empty")
    return Pattern(labels=(activity,))


@dataclass(frozen=True)
class PatternInstance:
    """Injective node-to-event assignment; assignment[node] = event index."""

    case_id: str
    assignment: tuple[int, ...]

    def image(self) -> frozenset[int]:
        return frozenset(self.assignment)


@dataclass(frozen=True)
class InstanceIndex:
    """All instances of one pattern across a log, keyed by case id."""

    pattern_id: str
    instances: Mapping[str, tuple[PatternInstance, ...]]

    def count(self, case_id: str) -> int:
        return len(self.instances.get(case_id, ()))

    def counts(self, case_ids: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.count(case_id) for case_id in case_ids)

    def covered_cases(self) -> frozenset[str]:
        return frozenset(case_id for case_id, found in self.instances.items() if found)

    @property
    def total(self) -> int:
        return sum(len(found) for found in self.instances.values())


def find_instances(
    p: Pattern,
    po: POTrace,
    max_instances: int = DEFAULT_MAX_INSTANCES_PER_TRACE,
) -> list[PatternInstance]:
    """Enumerate every injective assignment preserving labels and relations.

    Backtracks over pattern nodes in topological order with candidate events
    pre-bucketed by activity; results are sorted by assigned event indices.
    """
    order = p.topo_order
    pattern_codes = p.codes
    n = len(p)
    assignment: dict[int, int] = {}
    used: set[int] = set()
    results: list[tuple[int, ...]] = []

    def backtrack(depth: int) -> None:
        if depth == n:
            results.append(tuple(assignment[node] for node in range(n)))
            if len(results) > max_instances:
                raise InstanceCapExceeded(po.case_id, max_instances)
            return
        node = order[depth]
        expected = pattern_codes[node]
        for event in po.events_with_label(p.labels[node]):
            if event in used:
                continue
            if any(
                po.relation_code(event, assignment[other]) != expected[other]
                for other in assignment
            ):
                continue
            assignment[node] = event
            used.add(event)
            backtrack(depth + 1)
            used.discard(event)
            del assignment[node]

    backtrack(0)
    results.sort()
    return [PatternInstance(case_id=po.case_id, assignment=found) for found in results]


def instances_in_converted(
    p: Pattern,
    po_by_case: Mapping[str, POTrace],
    max_instances: int = DEFAULT_MAX_INSTANCES_PER_TRACE,
) -> InstanceIndex:
    instances = {
        case_id: tuple(find_instances(p, po, max_instances))
        for case_id, po in po_by_case.items()
    }
    return InstanceIndex(pattern_id=p.id, instances=instances)


def instances_in_log(
    p: Pattern,
    log: EventLog,
    oracle: OracleConfig,
    max_instances: int = DEFAULT_MAX_INSTANCES_PER_TRACE,
) -> InstanceIndex:
    """Instance index over a raw log (converts every trace first)."""
    return instances_in_converted(p, convert_log(log, oracle), max_instances)


def canonical_key(p: Pattern, max_size: int = DEFAULT_MAX_PATTERN_SIZE) -> str:
    """Isomorphism-invariant key: minimal (labels, pair-codes) serialization
    over all topological orders of the direct/eventual DAG.

    Branch-and-bound with twin pruning: nodes that agree on label, are
    mutually concurrent, and relate identically to every other node are
    interchangeable, so only one of them is expanded per step.
    """
    n = len(p)
    if n > max_size:
        raise PatternTooLarge(n, max_size)
    if n == 1:
        return json.dumps([list(p.labels), ""], separators=(",", ":"))

    codes = p.codes
    preds: list[set[int]] = [set() for _ in range(n)]
    for u, v, kind in p.relations:
        if kind != CONCURRENT:
            preds[v].add(u)

    def twins(u: int, v: int) -> bool:
        if p.labels[u] != p.labels[v] or codes[u][v] != 0:
            return False
        return all(codes[u][z] == codes[v][z] for z in range(n) if z not in (u, v))

    best: list[tuple] = []  # singleton holder for the minimal flat key

    def search(placed: list[int], remaining: set[int], partial: list) -> None:
        if not remaining:
            key = tuple(partial)
            if not best or key < best[0]:
                best[:] = [key]
            return
        ready = sorted(v for v in remaining if preds[v] <= set(placed))
        expanded: list[int] = []
        for candidate in ready:
            if any(twins(candidate, done) for done in expanded):
                continue
            expanded.append(candidate)
            segment = [p.labels[candidate]] + [
                _KEY_CHAR[codes[prev][candidate]] for prev in placed
            ]
            trial = partial + segment
            if best and tuple(trial) > best[0][: len(trial)]:
                continue
            placed.append(candidate)
            remaining.discard(candidate)
            search(placed, remaining, trial)
            remaining.add(candidate)
            placed.pop()

    search([], set(range(n)), [])
    flat = best[0]
    labels: list[str] = []
    rels: list[str] = []
    cursor = 0
    for step in range(n):
        labels.append(flat[cursor])
        rels.extend(flat[cursor + 1 : cursor + 1 + step])
        cursor += 1 + step
    return json.dumps([labels, "".join(rels)], separators=(",", ":"))
