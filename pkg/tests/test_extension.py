from __future__ import annotations

import itertools
import random

import pytest

from tracepatterns.extension import (
    ALL_RULES,
    BASE_RULES,
    ExtensionRule,
    extend_all,
    extend_instance,
    rules_from_names,
)
from tracepatterns.partial_order import OracleConfig, build_partial_order
from tracepatterns.patterns import (
    PatternTooLarge,
    find_instances,
    pattern,
    singleton_pattern,
)

from .conftest import make_log, make_trace

NO_RULES = OracleConfig()


def po_of(steps, case_id="c1"):
    return build_partial_order(make_trace(case_id, steps), NO_RULES)


def only_instance(p, po):
    found = find_instances(p, po)
    assert len(found) == 1
    return found[0]


def grown(p, po, rule, quantifier="any"):
    return extend_instance(p, only_instance(p, po), po, rule, quantifier)


def canonicals(patterns):
    return {p.canonical for p in patterns}


def test_direct_follow_extension_of_singleton():
    po = po_of(["a", "b", "c"])
    result = grown(singleton_pattern("b"), po, ExtensionRule.DIRECT_FOLLOW)
    assert canonicals(result) == {pattern(["b", "c"], {(0, 1): "direct"}).canonical}
    for item in result:
        assert item.foundational == singleton_pattern("b")


def test_direct_precede_extension_of_singleton():
    po = po_of(["a", "b", "c"])
    result = grown(singleton_pattern("b"), po, ExtensionRule.DIRECT_PRECEDE)
    assert canonicals(result) == {pattern(["a", "b"], {(0, 1): "direct"}).canonical}


def test_eventual_precede_extension():
    po = po_of(["a", "b", "c"])
    result = grown(singleton_pattern("c"), po, ExtensionRule.EVENTUAL_PRECEDE)
    assert canonicals(result) == {pattern(["a", "c"], {(0, 1): "eventual"}).canonical}


def test_concurrent_extension():
    po = po_of(["a", ("b", "c")])
    result = grown(singleton_pattern("b"), po, ExtensionRule.CONCURRENT)
    assert canonicals(result) == {pattern(["b", "c"], {(0, 1): "concurrent"}).canonical}


def test_direct_context_is_union_of_parts():
    po = po_of(["a", ("b", "c"), "d"])
    p = singleton_pattern("b")
    inst = only_instance(p, po)
    union = (
        extend_instance(p, inst, po, ExtensionRule.DIRECT_FOLLOW)
        | extend_instance(p, inst, po, ExtensionRule.DIRECT_PRECEDE)
        | extend_instance(p, inst, po, ExtensionRule.CONCURRENT)
    )
    dc = extend_instance(p, inst, po, ExtensionRule.DIRECT_CONTEXT)
    assert canonicals(dc) == canonicals(union)


def test_quantifiers_coincide_on_singletons():
    po = po_of(["a", ("b", "c"), "d"])
    p = singleton_pattern("c")
    inst = only_instance(p, po)
    for rule in BASE_RULES:
        assert canonicals(extend_instance(p, inst, po, rule, "any")) == canonicals(
            extend_instance(p, inst, po, rule, "all")
        )


def test_literal_universal_quantifier_blocks_chain_growth():
    po = po_of(["a", "b", "c"])
    p = pattern(["a", "b"], {(0, 1): "direct"})
    inst = only_instance(p, po)
    # c directly follows b but only eventually follows a
    assert extend_instance(p, inst, po, ExtensionRule.DIRECT_FOLLOW, "all") == set()
    any_grown = extend_instance(p, inst, po, ExtensionRule.DIRECT_FOLLOW, "any")
    expected = pattern(["a", "b", "c"], {(0, 1): "direct", (1, 2): "direct", (0, 2): "eventual"})
    assert canonicals(any_grown) == {expected.canonical}


def test_new_node_relations_recorded_to_all_nodes():
    po = po_of(["a", ("b", "x"), "c"])
    p = pattern(["a", "b"], {(0, 1): "direct"})
    inst = only_instance(p, po)
    result = extend_instance(p, inst, po, ExtensionRule.CONCURRENT, "any")
    expected = pattern(
        ["a", "b", "x"], {(0, 1): "direct", (1, 2): "concurrent", (0, 2): "direct"}
    )
    assert canonicals(result) == {expected.canonical}


def test_extend_all_two_event_chain():
    log = make_log([make_trace("c1", ["a", "b"], outcome=1.0)])
    result = extend_all(singleton_pattern("a"), log, NO_RULES, ALL_RULES)
    assert canonicals(result) == {pattern(["a", "b"], {(0, 1): "direct"}).canonical}
    assert all(item.foundational == singleton_pattern("a") for item in result)
    assert all(len(item) == 2 for item in result)


def test_extend_all_separates_relation_variants():
    log = make_log(
        [
            make_trace("c1", ["b", "c"], outcome=1.0),
            make_trace("c2", [("b", "c")], outcome=2.0),
        ]
    )
    result = extend_all(singleton_pattern("b"), log, NO_RULES, ALL_RULES)
    expected = {
        pattern(["b", "c"], {(0, 1): "direct"}).canonical,
        pattern(["b", "c"], {(0, 1): "concurrent"}).canonical,
    }
    assert canonicals(result) == expected


def test_extension_preserves_foundational_as_induced_subpattern():
    po = po_of(["a", "b", ("c", "d"), "e"])
    p = pattern(["b", "c"], {(0, 1): "direct"})
    inst = only_instance(p, po)
    for rule in BASE_RULES:
        for item in extend_instance(p, inst, po, rule):
            kept = {
                (u, v): kind for u, v, kind in item.relations if u < len(p) and v < len(p)
            }
            assert kept == {(u, v): kind for u, v, kind in p.relations}
            assert item.labels[: len(p)] == p.labels


def test_monotonicity_every_trace_with_extension_has_parent(chain_log):
    parent = singleton_pattern("a")
    for item in extend_all(parent, chain_log, NO_RULES, BASE_RULES):
        for trace in chain_log:
            po = build_partial_order(trace, NO_RULES)
            if find_instances(item, po):
                assert find_instances(parent, po)


def test_dedup_soundness(chain_log):
    result = extend_all(singleton_pattern("b"), chain_log, NO_RULES, ALL_RULES)
    keys = [item.canonical for item in result]
    assert len(keys) == len(set(keys))


def test_pattern_too_large_guard(chain_log):
    with pytest.raises(PatternTooLarge):
        extend_all(singleton_pattern("a"), chain_log, NO_RULES, BASE_RULES, max_pattern_size=1)


def test_no_qualifying_event_gives_empty_set():
    po = po_of(["a"])
    p = singleton_pattern("a")
    inst = only_instance(p, po)
    for rule in ALL_RULES:
        assert extend_instance(p, inst, po, rule) == set()


def test_rules_from_names():
    assert rules_from_names(["df", "conc"]) == (
        ExtensionRule.DIRECT_FOLLOW,
        ExtensionRule.CONCURRENT,
    )
    with pytest.raises(ValueError):
        rules_from_names(["bogus"])


def _brute_force_one_node_extensions(p, traces):
    """All one-node-larger patterns with an instance: grow every instance by
    every unused event and read the relations straight off the trace."""
    from tracepatterns.patterns import normalize_relations, Pattern

    result = {}
    for trace in traces:
        po = build_partial_order(trace, NO_RULES)
        for inst in find_instances(p, po):
            for event in range(len(po)):
                if event in inst.assignment:
                    continue
                labels = p.labels + (po.events[event].activity,)
                rel = {(u, v): kind for u, v, kind in p.relations}
                names = {1: "direct", 2: "eventual", 3: "direct", 4: "eventual", 0: "concurrent"}
                for node, assigned in enumerate(inst.assignment):
                    code = po.relation_code(assigned, event)
                    if code in (1, 2):
                        rel[(node, len(p))] = names[code]
                    elif code in (3, 4):
                        rel[(len(p), node)] = names[code]
                    else:
                        rel[(node, len(p))] = "concurrent"
                candidate = Pattern(labels=labels, relations=normalize_relations(labels, rel))
                result[candidate.canonical] = candidate
    return result


def test_extend_all_equals_brute_force_on_two_block_traces():
    """Exhaustive two-block traces: any-quantified extension over all base
    rules must produce exactly the one-node-larger patterns with an instance."""
    alphabet = "ab"
    combos = []
    for first_size, second_size in itertools.product((1, 2), repeat=2):
        for first in itertools.product(alphabet, repeat=first_size):
            for second in itertools.product(alphabet, repeat=second_size):
                combos.append([first if len(first) > 1 else first[0],
                               second if len(second) > 1 else second[0]])
    rng = random.Random(5)
    for steps in combos:
        trace = make_trace("c1", steps, outcome=1.0)
        log = make_log([trace])
        for label in sorted({e.activity for e in trace.events}):
            p = singleton_pattern(label)
            mine = canonicals(extend_all(p, log, NO_RULES, BASE_RULES, "any"))
            brute = set(_brute_force_one_node_extensions(p, [trace]))
            assert mine == brute, (steps, label)
