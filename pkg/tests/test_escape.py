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
    DemoNotApplicableError,
    EnumerationSpec,
    EscapeCertificate,
    FixpointTrace,
    Verdict,
    adjoin_escape_demo,
    certificate_from_jsonable,
    certificate_to_jsonable,
    compute_escape,
    dyadic_weight,
    enclose_escape,
    enclose_escape_traced,
    gfp_descend,
    intervalize,
    value_at,
)

spec_indices = st.integers(min_value=0, max_value=2999)

SPEC1 = EnumerationSpec(prefix=(), tail=Affine(1, 0))
SPEC2 = EnumerationSpec(prefix=(F(3, 2), F(1, 8)), tail=Constant(2))


def corpus_spec(index: int) -> EnumerationSpec:
    return random_spec(random.Random(index), index)


class TestVerdict:
    def test_validates_fields(self):
        with pytest.raises(ValueError):
            Verdict(where=-1, value=F(1), relation="below", gap=F(1))
        with pytest.raises(ValueError):
            Verdict(where=True, value=F(1), relation="below", gap=F(1))
        with pytest.raises(ValueError):
            Verdict(where="prefix", value=F(1), relation="below", gap=F(1))
        with pytest.raises(ValueError):
            Verdict(where=0, value=F(1), relation="between", gap=F(1))
        with pytest.raises(ValueError):
            Verdict(where=0, value=F(1), relation="below", gap=F(0))


class TestComputeEscape:
    def test_affine_worked_example(self):
        cert = compute_escape(SPEC1)
        assert cert.x0 == F(3, 2)
        assert cert.trace.iterates == (F(2), F(3, 2), F(3, 2))
        # nearest tail values are f(1) = 1 and f(2) = 2, both at gap 1/2;
        # ties resolve to the value below
        assert cert.verdicts == (
            Verdict(where=1, value=F(1), relation="below", gap=F(1, 2)),
        )

    def test_prefix_constant_worked_example(self):
        cert = compute_escape(SPEC2)
        assert cert.x0 == F(1, 2)
        assert cert.fixpoint_witness == F(1, 2)
        assert cert.oracle_agreement
        assert cert.verdicts == (
            Verdict(where=0, value=F(3, 2), relation="above", gap=F(1)),
            Verdict(where=1, value=F(1, 8), relation="below", gap=F(3, 8)),
            Verdict(where="tail", value=F(2), relation="above", gap=F(3, 2)),
        )

    def test_constant_everywhere(self):
        cert = compute_escape(EnumerationSpec((), Constant(3)))
        assert cert.x0 == 0
        assert cert.verdicts == (
            Verdict(where="tail", value=F(3), relation="above", gap=F(3)),
        )

    def test_cycle_worked_example(self):
        cert = compute_escape(EnumerationSpec((F(0), F(1)), Cycle()))
        assert cert.x0 == 2
        assert cert.verdicts == (
            Verdict(where=0, value=F(0), relation="below", gap=F(2)),
            Verdict(where=1, value=F(1), relation="below", gap=F(1)),
            Verdict(where="tail", value=F(0), relation="below", gap=F(2)),
            Verdict(where="tail", value=F(1), relation="below", gap=F(1)),
        )

    @given(spec_indices)
    @settings(deadline=None)
    def test_certified_value_escapes_the_enumeration(self, index):
        spec = corpus_spec(index)
        cert = compute_escape(spec)
        assert cert.x0 == gfp_descend(spec)[0]
        assert len(cert.verdicts) >= len(spec.prefix)
        for n in range(len(spec.prefix) + 50):
            assert value_at(spec, n) != cert.x0

    @given(spec_indices)
    @settings(deadline=None)
    def test_affine_verdict_is_the_closest_approach(self, index):
        spec = corpus_spec(index)
        if not isinstance(spec.tail, Affine):
            return
        cert = compute_escape(spec)
        witness = cert.verdicts[-1]
        assert isinstance(witness.where, int) and witness.where >= len(spec.prefix)
        for n in range(len(spec.prefix), len(spec.prefix) + 60):
            assert abs(value_at(spec, n) - cert.x0) >= witness.gap


class TestCertificateValidation:
    def test_witness_must_match(self):
        trace = FixpointTrace((F(2), F(1), F(1)), True, 2)
        with pytest.raises(ValueError, match="witness"):
            EscapeCertificate(F(1), F(2), trace, (), True)

    def test_trace_must_settle_at_x0(self):
        trace = FixpointTrace((F(2), F(1), F(1)), True, 2)
        with pytest.raises(ValueError, match="settled"):
            EscapeCertificate(F(1, 2), F(1, 2), trace, (), True)

    def test_verdicts_must_be_consistent(self):
        trace = FixpointTrace((F(2), F(1), F(1)), True, 2)
        bad_gap = Verdict(where=0, value=F(3), relation="above", gap=F(1))
        with pytest.raises(ValueError, match="verdict"):
            EscapeCertificate(F(1), F(1), trace, (bad_gap,), True)


class TestAdjoinDemo:
    def test_worked_example(self):
        before, extended, after = adjoin_escape_demo(SPEC2)
        assert before.x0 == F(1, 2)
        assert extended.prefix == (F(3, 2), F(1, 8), F(1, 2))
        assert extended.tail == Constant(2)
        assert after.x0 == F(7, 4)

    def test_empty_prefix(self):
        before, extended, after = adjoin_escape_demo(EnumerationSpec((), Constant(3)))
        assert before.x0 == 0
        assert extended.prefix == (F(0),)
        assert after.x0 == 1

    def test_needs_constant_tail(self):
        with pytest.raises(DemoNotApplicableError, match="constant tail"):
            adjoin_escape_demo(SPEC1)
        with pytest.raises(DemoNotApplicableError, match="constant tail"):
            adjoin_escape_demo(EnumerationSpec((F(0), F(1)), Cycle()))

    def test_needs_headroom_above_escape_value(self):
        # x0 = 2 here, and the constant 1/4 sits far below 2 + 1
        with pytest.raises(DemoNotApplicableError, match="below"):
            adjoin_escape_demo(EnumerationSpec((), Constant(F(1, 4))))

    def test_rise_is_at_least_one_step(self):
        applicable = 0
        for spec in build_corpus(600, seed=9):
            if not isinstance(spec.tail, Constant):
                continue
            try:
                before, _, after = adjoin_escape_demo(spec)
            except DemoNotApplicableError:
                continue
            applicable += 1
            assert after.x0 >= before.x0 + dyadic_weight(len(spec.prefix))
        assert applicable >= 15  # the corpus must actually exercise the demo


class TestEnclosure:
    def test_affine_hand_values(self):
        enc, lo_trace, hi_trace = enclose_escape_traced(intervalize(SPEC1), 5, F(1, 100))
        assert (enc.lo, enc.hi) == (F(3, 2), F(25, 16))
        assert lo_trace.iterates == (F(2), F(3, 2), F(3, 2))
        assert hi_trace.iterates == (F(2), F(29, 16), F(25, 16), F(25, 16))
        finer = enclose_escape(intervalize(SPEC1), 8, F(1, 100))
        assert (finer.lo, finer.hi) == (F(3, 2), F(193, 128))

    def test_boundary_value_keeps_upper_at_top(self):
        # the constant tail value 2 sits on the domain edge: no finite-width
        # query can certify it is not below 2, so the upper bound stays there
        enc = enclose_escape(intervalize(SPEC2), 8, F(1, 100))
        assert (enc.lo, enc.hi) == (F(1, 2), F(2))

    @given(
        spec_indices,
        st.integers(min_value=1, max_value=10),
        st.sampled_from([F(1, 10), F(1, 100), F(1, 10**4)]),
    )
    @settings(deadline=None, max_examples=60)
    def test_sound_and_narrowing(self, index, n_known, eps):
        spec = corpus_spec(index)
        oracle = intervalize(spec)
        x0, _ = gfp_descend(spec)
        enclosure = enclose_escape(oracle, n_known, eps)
        assert x0 in enclosure
        assert enclosure.encloses(enclose_escape(oracle, n_known + 1, eps))
        assert enclosure.encloses(enclose_escape(oracle, n_known, eps / 10))


class TestCertificateJson:
    def test_round_trip_worked_example(self):
        cert = compute_escape(SPEC2)
        obj = certificate_to_jsonable(cert)
        assert obj["x0"] == "1/2"
        assert obj["trace"] == ["2", "3/2", "1/2", "1/2"]
        assert obj["verdicts"][2] == {
            "where": "tail", "value": "2", "relation": "above", "gap": "3/2"}
        rebuilt = certificate_from_jsonable(obj)
        assert rebuilt == cert

    @given(spec_indices)
    @settings(deadline=None, max_examples=60)
    def test_round_trip_corpus(self, index):
        cert = compute_escape(corpus_spec(index))
        assert certificate_from_jsonable(certificate_to_jsonable(cert)) == cert

    @pytest.mark.parametrize("mutate, fragment", [
        (lambda o: o.pop("x0"), "missing"),
        (lambda o: o.update(extra=1), "unexpected"),
        (lambda o: o.update(x0="0.5"), "x0"),
        (lambda o: o.update(trace=[]), "trace"),
        (lambda o: o.update(trace=["2", "1", "3/2", "3/2"]), "trace"),
        (lambda o: o.update(trace=["2", "1", "1"]), "certificate"),  # settles off x0
        (lambda o: o["verdicts"][0].update(gap="-1"), "verdicts[0]"),
        (lambda o: o["verdicts"][0].update(relation="sideways"), "verdicts[0]"),
        (lambda o: o["verdicts"][0].update(where="prefix"), "verdicts[0].where"),
        (lambda o: o["verdicts"][0].update(value="1/0"), "verdicts[0].value"),
        (lambda o: o["verdicts"][0].update(gap="2"), "certificate"),  # wrong distance
        (lambda o: o.update(oracle_agreement="yes"), "oracle_agreement"),
    ])
    def test_tampered_documents_rejected(self, mutate, fragment):
        obj = certificate_to_jsonable(compute_escape(SPEC2))
        mutate(obj)
        with pytest.raises(ValueError) as err:
            certificate_from_jsonable(obj)
        assert fragment in str(err.value)
