"""Pattern extension: grow a foundational pattern by one node at a time.

Each rule names the ordering relation a new event must hold toward the
instance that anchors the growth; the new node then records its trace
relation to *every* existing node, so extended patterns stay fully specified
for matching.  The direct-context rule is the union of direct-follow,
direct-precede, and concurrent.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Mapping

from .log_model import EventLog
from .partial_order import OracleConfig, POTrace, convert_log
from .patterns import (
    DEFAULT_MAX_PATTERN_SIZE,
    Pattern,
    PatternInstance,
    PatternTooLarge,
    find_instances,
    normalize_relations,
)


class ExtensionRule(str, Enum):
    DIRECT_FOLLOW = "df"
    DIRECT_PRECEDE = "dp"
    CONCURRENT = "conc"
    EVENTUAL_FOLLOW = "ef"
    EVENTUAL_PRECEDE = "ep"
    DIRECT_CONTEXT = "dc"


ALL_RULES = tuple(ExtensionRule)
BASE_RULES = (
    ExtensionRule.DIRECT_FOLLOW,
    ExtensionRule.DIRECT_PRECEDE,
    ExtensionRule.CONCURRENT,
    ExtensionRule.EVENTUAL_FOLLOW,
    ExtensionRule.EVENTUAL_PRECEDE,
)

_DC_PARTS = (ExtensionRule.DIRECT_FOLLOW, ExtensionRule.DIRECT_PRECEDE, ExtensionRule.CONCURRENT)

# relation code (from partial_order's table, read as code(instance_node, event))
# under which an event satisfies each base rule
_RULE_CODE = {
    ExtensionRule.DIRECT_FOLLOW: 1,  # event directly follows the node
    ExtensionRule.DIRECT_PRECEDE: 3,
    ExtensionRule.CONCURRENT: 0,
    ExtensionRule.EVENTUAL_FOLLOW: 2,
    ExtensionRule.EVENTUAL_PRECEDE: 4,
}


def rules_from_names(names: Iterable[str]) -> tuple[ExtensionRule, ...]:
    return tuple(ExtensionRule(name) for name in names)


def _qualifying_events(
    po: POTrace, image: tuple[int, ...], rule: ExtensionRule, quantifier: str
) -> set[int]:
    wanted = _RULE_CODE[rule]
    taken = set(image)
    ok: set[int] = set()
    for event in range(len(po)):
        if event in taken:
            continue
        holds = (
            po.relation_code(node, event) == wanted for node in image
        )
        if all(holds) if quantifier == "all" else any(holds):
            ok.add(event)
    return ok


def _grown_pattern(p: Pattern, inst: PatternInstance, po: POTrace, event: int) -> Pattern:
    labels = p.labels + (po.events[event].activity,)
    new = len(p)
    relations = dict(((u, v), kind) for u, v, kind in p.relations)
    for node, assigned in enumerate(inst.assignment):
        code = po.relation_code(assigned, event)
        if code == 1:
            relations[(node, new)] = "direct"
        elif code == 2:
            relations[(node, new)] = "eventual"
        elif code == 3:
            relations[(new, node)] = "direct"
        elif code == 4:
            relations[(new, node)] = "eventual"
        else:
            relations[(node, new)] = "concurrent"
    return Pattern(labels=labels, relations=normalize_relations(labels, relations), foundational=p)


def extend_instance(
    p: Pattern,
    inst: PatternInstance,
    po: POTrace,
    rule: ExtensionRule,
    quantifier: str = "any",
) -> set[Pattern]:
    """All one-node-larger patterns grown from one instance under one rule.

    quantifier="all" is the literal universal reading (the relation must hold
    toward every instance node); "any" accepts events related to at least one
    node.  Returns an empty set when nothing qualifies.
    """
    if quantifier not in ("any", "all"):
        raise ValueError(f"unknown quantifier {quantifier!r}")
    parts = _DC_PARTS if rule is ExtensionRule.DIRECT_CONTEXT else (rule,)
    events: set[int] = set()
    for part in parts:
        events |= _qualifying_events(po, inst.assignment, part, quantifier)
    return {_grown_pattern(p, inst, po, event) for event in events}


def extend_in_converted(
    p: Pattern,
    po_by_case: Mapping[str, POTrace],
    rules: Iterable[ExtensionRule],
    quantifier: str = "any",
    max_pattern_size: int = DEFAULT_MAX_PATTERN_SIZE,
) -> list[Pattern]:
    """Union of extensions over all traces, instances, and rules.

    Deduplicated by canonical key; deterministic order (sorted by key).
    """
    if len(p) + 1 > max_pattern_size:
        raise PatternTooLarge(len(p) + 1, max_pattern_size)
    rules = tuple(rules)
    found: dict[str, Pattern] = {}
    for case_id in sorted(po_by_case):
        po = po_by_case[case_id]
        for inst in find_instances(p, po):
            for rule in rules:
                for grown in extend_instance(p, inst, po, rule, quantifier):
                    found.setdefault(grown.canonical, grown)
    return [found[key] for key in sorted(found)]


def extend_all(
    p: Pattern,
    log: EventLog,
    oracle: OracleConfig,
    rules: Iterable[ExtensionRule] = BASE_RULES,
    quantifier: str = "any",
    max_pattern_size: int = DEFAULT_MAX_PATTERN_SIZE,
) -> list[Pattern]:
    """extend_in_converted over a raw log (converts every trace first)."""
    return extend_in_converted(p, convert_log(log, oracle), rules, quantifier, max_pattern_size)
