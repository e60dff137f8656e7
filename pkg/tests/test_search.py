"""Binary/linear search drivers and the method dispatcher."""

import math

import pytest

from incmeter.bench import SrsParams, generate_corpus
from incmeter.kb import parse_kb
from incmeter.oracles import MeasureUndefinedError, oracle_value
from incmeter.search import (
    METHODS,
    PHASES,
    RunConfig,
    binary_search,
    compute,
    linear_search,
    search_range,
)
from incmeter.solver import BackendConfig
from incmeter.values import INF, MEASURES


def test_search_ranges_k7(k7):
    assert search_range("contension", k7).max == 2
    assert search_range("forgetting", k7).max == 5
    assert search_range("hitting-set", k7).max == 2
    assert search_range("max-distance", k7).max == 2
    assert search_range("sum-distance", k7).max == 6
    assert search_range("hit-distance", k7).max == 3


def test_infinity_policy_flags(k7):
    flags = {m: search_range(m, k7).infinity_possible for m in MEASURES}
    assert flags == {
        "contension": False,
        "forgetting": False,
        "hitting-set": True,
        "max-distance": True,
        "sum-distance": True,
        "hit-distance": False,
    }


def test_binary_search_k4_contension_within_call_budget(k4):
    out = binary_search("contension", k4)
    assert out.value == 1
    assert out.solver_calls <= math.floor(math.log2(len(k4.signature()) + 1)) + 1


def test_binary_search_hs_k6_infinite(k6):
    assert binary_search("hitting-set", k6).value == INF


def test_binary_search_dsum_k7(k7):
    assert binary_search("sum-distance", k7).value == 1


def test_linear_search_consistent_single_call(consistent_kb):
    for measure in MEASURES:
        out = linear_search(measure, consistent_kb)
        assert out.value == 0
        assert out.solver_calls == 1


def test_linear_search_dmax_k4_two_calls(k4):
    out = linear_search("max-distance", k4)
    assert out.value == 1 and out.solver_calls == 2


def test_linear_search_forgetting_k5(k5):
    assert linear_search("forgetting", k5).value == 1


def test_empty_kb_no_solver_calls(empty_kb):
    for measure in MEASURES:
        for runner in (binary_search, linear_search):
            out = runner(measure, empty_kb)
            assert out.value == 0 and out.solver_calls == 0


def test_phase_times_partition_total(k7):
    out = binary_search("contension", k7)
    assert set(out.phase_times) == set(PHASES)
    assert sum(out.phase_times.values()) <= out.total_seconds + 1e-6


def test_search_call_budget_and_agreement_on_random_kbs():
    kbs = generate_corpus(SrsParams(4, 1, 6, seed=301), 12)
    for kb_id, kb in kbs:
        for measure in MEASURES:
            rng = search_range(measure, kb)
            want = oracle_value(kb, measure)
            b = binary_search(measure, kb)
            l = linear_search(measure, kb)
            assert b.value == l.value == want, (kb_id, measure)
            assert b.solver_calls <= math.floor(math.log2(rng.size)) + 1


def test_infinity_only_with_contradictory_member():
    from incmeter.kb import KnowledgeBase, enumerate_models

    kbs = generate_corpus(SrsParams(3, 1, 5, seed=523), 15)
    for kb_id, kb in kbs:
        has_contradiction = any(
            not enumerate_models(KnowledgeBase((f,))) for f in kb
        )
        for measure in MEASURES:
            rng = search_range(measure, kb)
            value = binary_search(measure, kb).value
            if value == INF:
                assert rng.infinity_possible and has_contradiction, (kb_id, measure)
            elif rng.infinity_possible:
                assert not has_contradiction, (kb_id, measure)


def test_binary_search_timeout_carries_bounds(k7):
    cfg = RunConfig(backend=BackendConfig(timeout=1e-9))
    out = binary_search("contension", k7, cfg)
    assert out.timed_out and out.value is None
    assert out.bounds is not None


def test_measure_undefined_when_constant_false():
    kb = parse_kb("x\n-")
    with pytest.raises(MeasureUndefinedError):
        binary_search("contension", kb)
    with pytest.raises(MeasureUndefinedError):
        linear_search("forgetting", kb)
    with pytest.raises(MeasureUndefinedError):
        compute("contension", kb, "maxsat")
    with pytest.raises(MeasureUndefinedError):
        compute("contension", kb, "naive")
    # measures that admit infinity exhaust their range instead
    assert binary_search("hitting-set", kb).value == INF
    assert compute("max-distance", kb, "naive").value == INF
    assert compute("hit-distance", kb, "sat-binary").value == 1


def test_compute_dispatch_examples(k4):
    assert compute("contension", k4, "maxsat").value == 1
    assert compute("hit-distance", k4, "naive").value == 1
    assert compute("contension", k4, "sat-binary").value == 1
    assert compute("contension", k4, "sat-linear").value == 1


def test_compute_rejects_bad_pairs(k4):
    with pytest.raises(ValueError):
        compute("forgetting", k4, "maxsat")
    with pytest.raises(ValueError):
        compute("contension", k4, "dpll")
    with pytest.raises(ValueError):
        compute("entropy", k4, "naive")


def test_compute_methods_agree_on_fixtures(k4, k5, k6, k7, consistent_kb):
    for kb in (k4, k5, k6, k7, consistent_kb):
        for measure in MEASURES:
            values = set()
            for method in ("sat-binary", "sat-linear", "naive"):
                values.add(compute(measure, kb, method).value)
            if measure == "contension":
                values.add(compute(measure, kb, "maxsat").value)
            assert len(values) == 1, (measure, values)


def test_compute_maxsat_empty_kb(empty_kb):
    assert compute("contension", empty_kb, "maxsat").value == 0


def test_method_list_is_exact():
    assert METHODS == ("sat-binary", "sat-linear", "maxsat", "naive", "asp")
