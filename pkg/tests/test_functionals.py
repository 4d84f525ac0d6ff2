import pytest
from hypothesis import given, settings as hsettings, strategies as st

from isolation_sim.core_sets import BinarySegment, ChangeHistory, ChangeKind, SegmentOracle
from isolation_sim.errors import InconsistentAxiom, JournalError
from isolation_sim.functionals import (
    AgreementKind,
    AxiomStore,
    CeJournal,
    Role,
    AgreementTracker,
    agreement_length,
    collatz_stopping_time,
    is_expansionary,
    toy_k_script,
)


class TestAxiomStore:
    def test_evaluate_matches_prefix(self, seg):
        store = AxiomStore()
        store.add_axiom(Role.PSI, 0, seg("01"), 0, 1, 1)
        assert store.evaluate(Role.PSI, 0, SegmentOracle(seg("011")), 0) == (1, 2)
        assert store.evaluate(Role.PSI, 0, SegmentOracle(seg("00")), 0) is None
        assert store.evaluate(Role.PSI, 1, SegmentOracle(seg("011")), 0) is None

    def test_comparable_axioms_must_agree(self, seg):
        store = AxiomStore()
        first = store.add_axiom(Role.PSI, 0, seg("01"), 0, 1, 1)
        with pytest.raises(InconsistentAxiom) as info:
            store.add_axiom(Role.PSI, 0, seg("0"), 0, 0, 2)
        assert info.value.clash == first
        # incomparable segments may disagree
        store.add_axiom(Role.PSI, 0, seg("1"), 0, 0, 2)
        assert len(store) == 2

    def test_outputs_are_bits(self, seg):
        with pytest.raises(InconsistentAxiom):
            AxiomStore().add_axiom(Role.THETA, 0, seg("0"), 0, 2, 1)

    def test_earliest_axiom_wins(self, seg):
        store = AxiomStore()
        store.add_axiom(Role.PSI, 0, seg("0"), 3, 1, 1)
        store.add_axiom(Role.PSI, 0, seg("01"), 3, 1, 2)
        assert store.evaluate(Role.PSI, 0, SegmentOracle(seg("01")), 3) == (1, 1)

    def test_stage_filter(self, seg):
        store = AxiomStore()
        store.add_axiom(Role.THETA, 0, seg(""), 0, 0, 3)
        assert store.evaluate(Role.THETA, 0, SegmentOracle(seg("")), 0, s=2) is None
        assert store.evaluate(Role.THETA, 0, SegmentOracle(seg("")), 0, s=3) == (0, 0)

    def test_dead_axioms_stay_in_the_record(self, seg):
        store = AxiomStore()
        W = CeJournal("0")
        store.add_axiom(Role.PHI, 0, seg("0"), 0, 0, 1)
        W.enumerate(0, 2)
        assert store.evaluate(Role.PHI, 0, W, 0) is None
        assert len(store.axioms_for(Role.PHI, 0, 0)) == 1
        assert [a.x for a in store.axioms(Role.PHI, 0)] == [0]

    def test_axiom_line(self, seg):
        axiom = AxiomStore().add_axiom(Role.THETA, 2, seg("0110"), 9, 0, 3)
        assert axiom.to_line() == "AXM Theta 2 4 1,2 9 0 3"
        assert axiom.use == 4


@hsettings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.text(alphabet="01", max_size=5), st.integers(min_value=0, max_value=1)), max_size=25))
def test_store_never_holds_contradicting_axioms(entries):
    store = AxiomStore()
    for stage, (bits, y) in enumerate(entries, start=1):
        try:
            store.add_axiom(Role.PSI, 0, BinarySegment.from_string(bits), 0, y, stage)
        except InconsistentAxiom:
            pass
    kept = list(store.axioms_for(Role.PSI, 0, 0))
    for a in kept:
        for b in kept:
            if a.segment.comparable(b.segment):
                assert a.y == b.y


class TestCeJournal:
    def test_enumerate(self):
        W = CeJournal("0")
        entry = W.enumerate(4, 2)
        assert entry.to_line() == "CEJ 0 4 2"
        assert W.enumerate(4, 3) is None
        assert W.bit(4) == 1 and W.member_at(4, 1) == 0 and W.member_at(4, 2) == 1
        assert W.entered_at(4) == 2
        assert str(W.segment(6)) == "000010"

    def test_rejections(self):
        K = CeJournal("K", odd_only=True)
        with pytest.raises(JournalError):
            K.enumerate(2, 1)
        with pytest.raises(JournalError):
            K.enumerate(-1, 1)
        K.enumerate(3, 5)
        with pytest.raises(JournalError):
            K.enumerate(5, 4)

    def test_permanent_disagreement(self, seg):
        W = CeJournal("0")
        W.enumerate(1, 1)
        assert W.permanently_disagrees(seg("00"))
        assert not W.permanently_disagrees(seg("011"))


class TestAgreementLength:
    def test_n_kind(self):
        D, W, store = ChangeHistory(), CeJournal("0"), AxiomStore()
        assert agreement_length(AgreementKind.N, 0, D, W, store) is None
        store.add_axiom(Role.PSI, 0, BinarySegment(0), 0, 0, 1)
        store.add_axiom(Role.PSI, 0, BinarySegment(0), 1, 0, 1)
        assert agreement_length(AgreementKind.N, 0, D, W, store) == 1
        W.enumerate(1, 2)
        assert agreement_length(AgreementKind.N, 0, D, W, store) == 0

    def test_r_kind(self, seg):
        D, W, store = ChangeHistory(), CeJournal("0"), AxiomStore()
        store.add_axiom(Role.PHI, 0, seg("00"), 0, 0, 1)
        store.add_axiom(Role.PHI, 0, seg("00"), 1, 0, 1)
        assert agreement_length(AgreementKind.R, 0, D, W, store) == 1
        D.apply_change(1, ChangeKind.ENUMERATE, 2)
        assert agreement_length(AgreementKind.R, 0, D, W, store) == 0

    def test_known_length_is_trusted(self):
        D, W, store = ChangeHistory(), CeJournal("0"), AxiomStore()
        store.add_axiom(Role.PSI, 0, BinarySegment(0), 6, 0, 1)
        assert agreement_length(AgreementKind.N, 0, D, W, store, known=5) == 6
        assert agreement_length(AgreementKind.N, 0, D, W, store) is None

    def test_tracker_resumes_until_a_set_moves(self):
        D, W, store = ChangeHistory(), CeJournal("0"), AxiomStore()
        tracker = AgreementTracker()
        for x in (0, 1):
            store.add_axiom(Role.PSI, 0, BinarySegment(0), x, 0, 1)
        assert tracker.length(AgreementKind.N, 0, D, W, store) == 1
        store.add_axiom(Role.PSI, 0, BinarySegment(0), 2, 0, 2)
        assert tracker.length(AgreementKind.N, 0, D, W, store) == 2
        assert tracker.length(AgreementKind.R, 0, D, W, store) is None
        W.enumerate(1, 3)
        assert tracker.length(AgreementKind.N, 0, D, W, store) == 0

    @pytest.mark.parametrize("ell, history, expected", [
        (None, [], False),
        (3, [], True),
        (3, [1, 2], True),
        (2, [2], False),
    ])
    def test_is_expansionary(self, ell, history, expected):
        assert is_expansionary(ell, history) is expected


def test_toy_k_script():
    assert [collatz_stopping_time(n) for n in (1, 2, 3, 6)] == [0, 1, 7, 8]
    assert toy_k_script(3) == [(1, 1), (3, 2), (5, 8)]
