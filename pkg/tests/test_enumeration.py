import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import build_corpus, random_spec
from escapepoint import (
    Affine,
    Constant,
    Cycle,
    EnumerationSpec,
    IntervalEnumeration,
    RatInterval,
    SpecError,
    dyadic_weight,
    eligible_prefix_indices,
    intervalize,
    spec_from_jsonable,
    spec_to_jsonable,
    tail_hits,
    tail_weight_sum,
    value_at,
)

spec_indices = st.integers(min_value=0, max_value=2999)
rationals = st.fractions(max_denominator=1000)


def corpus_spec(index: int) -> EnumerationSpec:
    return random_spec(random.Random(index), index)


class TestConstruction:
    def test_prefix_coerced_to_fractions(self):
        spec = EnumerationSpec(prefix=(1, F(1, 2)), tail=Constant(0))
        assert spec.prefix == (F(1), F(1, 2))

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            EnumerationSpec(prefix=(0.5,), tail=Constant(0))
        with pytest.raises(TypeError):
            EnumerationSpec(prefix=(), tail=Constant(0.5))

    def test_zero_slope_normalizes_to_constant(self):
        spec = EnumerationSpec(prefix=(), tail=Affine(0, F(7, 3)))
        assert spec.tail == Constant(F(7, 3))

    def test_cycle_needs_prefix(self):
        with pytest.raises(SpecError):
            EnumerationSpec(prefix=(), tail=Cycle())

    def test_unknown_tail_rejected(self):
        with pytest.raises(SpecError):
            EnumerationSpec(prefix=(), tail="constant")


class TestValueAt:
    def test_prefix_then_tail(self):
        spec = EnumerationSpec(prefix=(F(3, 2), F(1, 8)), tail=Constant(2))
        assert [value_at(spec, n) for n in range(5)] == [F(3, 2), F(1, 8), 2, 2, 2]

    def test_affine(self):
        spec = EnumerationSpec(prefix=(F(9),), tail=Affine(F(-1, 2), 3))
        assert value_at(spec, 0) == 9
        assert value_at(spec, 4) == 1

    @given(spec_indices, st.integers(min_value=0, max_value=200))
    def test_cycle_is_periodic(self, index, n):
        spec = corpus_spec(index)
        if isinstance(spec.tail, Cycle):
            assert value_at(spec, n) == value_at(spec, n + len(spec.prefix))

    def test_rejects_bad_index(self):
        spec = EnumerationSpec(prefix=(), tail=Constant(0))
        with pytest.raises(ValueError):
            value_at(spec, -1)
        with pytest.raises(ValueError):
            value_at(spec, F(1, 2))


class TestEligibility:
    def test_strict_inequality(self):
        spec = EnumerationSpec(prefix=(F(1), F(2), F(0)), tail=Constant(5))
        assert eligible_prefix_indices(spec, F(1)) == {2}
        assert eligible_prefix_indices(spec, F(3)) == {0, 1, 2}

    @given(spec_indices, rationals, rationals)
    def test_monotone_in_x(self, index, x, y):
        spec = corpus_spec(index)
        if x > y:
            x, y = y, x
        assert eligible_prefix_indices(spec, x) <= eligible_prefix_indices(spec, y)


class TestTailWeightSum:
    @given(spec_indices, rationals)
    @settings(deadline=None)
    def test_matches_truncated_series(self, index, x):
        spec = corpus_spec(index)
        start = len(spec.prefix)
        closed = tail_weight_sum(spec, x)
        window = range(start, start + 70)
        brute = sum((dyadic_weight(n) for n in window if value_at(spec, n) < x), F(0))
        # closed form counts the whole tail; the brute window misses at most
        # the weight beyond it
        assert brute <= closed <= brute + F(2, 2**window.stop)

    def test_constant_all_or_nothing(self):
        spec = EnumerationSpec(prefix=(F(1),), tail=Constant(F(1, 2)))
        assert tail_weight_sum(spec, F(1, 2)) == 0
        assert tail_weight_sum(spec, F(5, 8)) == 1  # 2^(1-1)

    def test_affine_boundary_is_strict(self):
        # f(n) = n for n >= 0: at x = 3 exactly the indices 0, 1, 2 are below
        spec = EnumerationSpec(prefix=(), tail=Affine(1, 0))
        assert tail_weight_sum(spec, 3) == F(7, 4)
        assert tail_weight_sum(spec, F(5, 2)) == F(7, 4)


class TestTailHits:
    @given(spec_indices, st.integers(min_value=0, max_value=80))
    def test_every_tail_value_hits(self, index, offset):
        spec = corpus_spec(index)
        n = len(spec.prefix) + offset
        assert tail_hits(spec, value_at(spec, n))

    def test_affine_misses_non_lattice_points(self):
        spec = EnumerationSpec(prefix=(), tail=Affine(2, 0))  # even naturals
        assert tail_hits(spec, 4)
        assert not tail_hits(spec, 3)
        assert not tail_hits(spec, F(1, 2))
        assert not tail_hits(spec, -2)  # index would be negative

    def test_cycle_hits_only_prefix_values(self):
        spec = EnumerationSpec(prefix=(F(0), F(1)), tail=Cycle())
        assert tail_hits(spec, 0) and tail_hits(spec, 1)
        assert not tail_hits(spec, F(1, 2))


class TestIntervalize:
    @given(
        spec_indices,
        st.integers(min_value=0, max_value=30),
        st.fractions(min_value="1/10000", max_value=2, max_denominator=10**6),
        st.fractions(min_value=0, max_value=1, max_denominator=1000),
    )
    @settings(deadline=None)
    def test_contains_truth_and_meets_width(self, index, n, eps, jitter):
        spec = corpus_spec(index)
        box = intervalize(spec, jitter).at(n, eps)
        assert value_at(spec, n) in box
        assert box.width <= eps

    @given(
        spec_indices,
        st.integers(min_value=0, max_value=30),
        st.fractions(min_value="1/1000", max_value=2, max_denominator=10**6),
        st.fractions(min_value=0, max_value=1, max_denominator=1000),
    )
    @settings(deadline=None)
    def test_nested_as_eps_shrinks(self, index, n, eps, jitter):
        oracle = intervalize(corpus_spec(index), jitter)
        assert oracle.at(n, eps).encloses(oracle.at(n, eps / 3))

    def test_deterministic(self):
        oracle = intervalize(corpus_spec(5), F(1, 64))
        assert oracle.at(3, F(1, 10)) == oracle.at(3, F(1, 10))

    def test_jitter_skews_alternately(self):
        spec = EnumerationSpec(prefix=(F(0), F(0)), tail=Constant(0))
        oracle = intervalize(spec, F(1, 100))
        even, odd = oracle.at(0, F(1, 4)), oracle.at(1, F(1, 4))
        assert even.lo + even.hi == 2 * F(1, 100)  # center skewed up
        assert odd.lo + odd.hi == -2 * F(1, 100)  # center skewed down

    def test_negative_jitter_rejected(self):
        with pytest.raises(ValueError):
            intervalize(corpus_spec(0), F(-1, 2))

    def test_oracle_contract_enforced(self):
        wide = IntervalEnumeration(lambda n, eps: RatInterval(0, 1))
        with pytest.raises(ValueError):
            wide.at(0, F(1, 2))
        with pytest.raises(ValueError):
            wide.at(0, F(0))
        with pytest.raises(ValueError):
            wide.at(-1, F(2))


class TestJsonFormat:
    def test_round_trip_corpus(self):
        for spec in build_corpus(120):
            text = json.dumps(spec_to_jsonable(spec), sort_keys=True)
            assert spec_from_jsonable(json.loads(text)) == spec

    def test_examples(self):
        obj = {"prefix": ["3/2", "1/8"], "tail": {"kind": "constant", "value": "2"}}
        spec = spec_from_jsonable(obj)
        assert spec == EnumerationSpec(prefix=(F(3, 2), F(1, 8)), tail=Constant(2))
        assert spec_to_jsonable(spec) == obj

    @pytest.mark.parametrize("obj, fragment", [
        ([], "spec"),
        ({"prefix": []}, "missing keys"),
        ({"prefix": [], "tail": {"kind": "cycle"}, "note": 1}, "unexpected keys"),
        ({"prefix": "1", "tail": {"kind": "cycle"}}, "prefix"),
        ({"prefix": [1], "tail": {"kind": "constant", "value": "1"}}, "prefix[0]"),
        ({"prefix": ["0.5"], "tail": {"kind": "constant", "value": "1"}}, "prefix[0]"),
        ({"prefix": ["1/0"], "tail": {"kind": "constant", "value": "1"}}, "zero denominator"),
        ({"prefix": [], "tail": {"kind": "constant"}}, "missing keys"),
        ({"prefix": [], "tail": {"kind": "constant", "value": "1", "b": "2"}}, "unexpected keys"),
        ({"prefix": [], "tail": {"kind": "geometric"}}, "unknown tail kind"),
        ({"prefix": [], "tail": {"kind": "affine", "a": "1"}}, "missing keys"),
        ({"prefix": [], "tail": {"kind": "affine", "a": "1", "b": "x"}}, "tail.b"),
        ({"prefix": [], "tail": {"kind": "cycle"}}, "nonempty prefix"),
        ({"prefix": [], "tail": "cycle"}, "tail"),
    ])
    def test_malformed_documents_carry_position(self, obj, fragment):
        with pytest.raises(SpecError) as err:
            spec_from_jsonable(obj)
        assert fragment in str(err.value)

    def test_zero_slope_survives_round_trip(self):
        # Affine(0, b) normalizes to Constant(b) and serializes as such
        spec = EnumerationSpec(prefix=(), tail=Affine(0, 3))
        assert spec_to_jsonable(spec)["tail"]["kind"] == "constant"
