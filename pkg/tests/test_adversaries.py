import pytest

from isolation_sim.adversaries import (
    AxiomEmission,
    ChaoticAdversary,
    FaithfulPhiAdversary,
    FaithfulPsiAdversary,
    FaithfulThetaAdversary,
    JournalEmission,
    LaggardAdversary,
    ScriptedAdversary,
    adversary_registry,
    build_bindings,
)
from isolation_sim.config import RunConfig
from isolation_sim.core_sets import ChangeKind
from isolation_sim.errors import ConfigError
from isolation_sim.functionals import Role
from isolation_sim.state import ConstructionView


def _apply(state, emissions, s):
    for emission in emissions:
        if isinstance(emission, JournalEmission):
            state.w(emission.index).enumerate(emission.element, s)
        else:
            state.store.add_axiom(emission.role, emission.index, emission.segment, emission.x, emission.y, s)


def test_registry_names():
    names = adversary_registry.list_adversaries()
    for name in ("silent", "faithful", "faithful-psi", "laggard", "laggard-theta", "chaotic", "scripted"):
        assert name in names
    with pytest.raises(KeyError):
        adversary_registry.create("nope", Role.PSI, 0, 0, {})
    assert isinstance(adversary_registry.create("faithful", Role.PHI, 0, 0, {}), FaithfulPhiAdversary)


def test_role_mismatch_is_rejected():
    with pytest.raises(ValueError):
        FaithfulPsiAdversary(role=Role.THETA)


class TestBuildBindings:
    def test_silent_roles_are_skipped(self):
        config = RunConfig.parse({"seed": 2, "adversaries": [{"index": 0, "theta": "faithful", "seed": 5}]})
        (binding,) = build_bindings(config)
        assert binding.budget == config.budget
        assert [b.role for b in binding.behaviours] == [Role.THETA]
        assert binding.behaviours[0].seed == 2 * 1_000_003 + 5

    @pytest.mark.parametrize("spec", [
        {"index": 0, "psi": "does-not-exist"},
        {"index": 0, "phi": "laggard-psi"},
    ])
    def test_bad_behaviours(self, spec):
        with pytest.raises(ConfigError):
            build_bindings(RunConfig.parse({"adversaries": [spec]}))


class TestFaithfulTheta:
    def test_covers_the_frontier(self, state):
        emissions = FaithfulThetaAdversary(index=0).step(ConstructionView(state), 1, 64)
        assert [(e.x, e.y, e.segment.length) for e in emissions] == [(0, 0, 1), (1, 0, 1)]

    def test_budget_truncates(self, state):
        adversary = FaithfulThetaAdversary(index=0)
        assert len(adversary.step_with_metrics(ConstructionView(state), 1, 1)) == 1
        assert (adversary.execution_count, adversary.emission_count) == (1, 1)


class TestFaithfulPsi:
    def test_revived_inputs_are_attacked(self, state):
        psi = FaithfulPsiAdversary(index=0, params={"attack_limit": 2})
        first = psi.step(ConstructionView(state), 1, 64)
        assert [(e.x, e.y, str(e.segment)) for e in first] == [(0, 0, "00"), (1, 0, "00")]
        _apply(state, first, 1)

        state.stage = 2
        state.D.apply_change(0, ChangeKind.ENUMERATE, 2)
        second = psi.step(ConstructionView(state), 2, 64)
        attacked = [e.element for e in second if isinstance(e, JournalEmission)]
        outputs = {e.x: e.y for e in second if isinstance(e, AxiomEmission)}
        assert attacked == [0, 1]
        assert outputs == {0: 1, 1: 1, 2: 0}
        assert psi.attacks_used == 2

    def test_no_attack_before_attack_after(self, state):
        psi = FaithfulPsiAdversary(index=0, params={"attack_after": 10})
        _apply(state, psi.step(ConstructionView(state), 1, 64), 1)
        state.stage = 2
        state.D.apply_change(0, ChangeKind.ENUMERATE, 2)
        second = psi.step(ConstructionView(state), 2, 64)
        assert not any(isinstance(e, JournalEmission) for e in second)


class TestFaithfulPhi:
    def test_markers_kill_stale_computations(self, state):
        phi = FaithfulPhiAdversary(index=0, params={"marker_base": 100})
        first = phi.step(ConstructionView(state), 1, 64)
        assert [(e.x, e.y, e.segment.length) for e in first] == [(0, 0, 101), (1, 0, 102)]
        _apply(state, first, 1)

        state.stage = 2
        state.D.apply_change(1, ChangeKind.ENUMERATE, 2)
        second = phi.step(ConstructionView(state), 2, 64)
        assert second[0] == JournalEmission(0, 101)
        revived = [e for e in second if isinstance(e, AxiomEmission) and e.x == 1]
        assert len(revived) == 1
        assert revived[0].y == 1
        assert 101 in revived[0].segment.ones

        _apply(state, second, 2)
        assert state.store.evaluate(Role.PHI, 0, state.w(0), 1, 2)[0] == 1
        assert state.store.evaluate(Role.PHI, 0, state.w(0), 0, 2)[0] == 0


def test_laggard_wakes_every_jth_stage(state):
    laggard = LaggardAdversary(role=Role.THETA, index=0, params={"every": 3})
    view = ConstructionView(state)
    assert laggard.step(view, 1, 64) == []
    state.stage = 3
    assert laggard.step(view, 3, 64)
    assert laggard.name == "laggard-theta"


def test_chaotic_is_a_function_of_seed_and_stage(state):
    view = ConstructionView(state)
    a = ChaoticAdversary(role=Role.PSI, index=0, seed=11, params={"rate": 6})
    b = ChaoticAdversary(role=Role.PSI, index=0, seed=11, params={"rate": 6})
    assert a.step(view, 1, 64) == b.step(view, 1, 64)
    assert len(a.step(view, 1, 2)) <= 2


class TestFaithfulIncremental:
    def test_quiet_stage_only_answers_new_inputs(self, state):
        theta = FaithfulThetaAdversary(index=0)
        _apply(state, theta.step(ConstructionView(state), 1, 64), 1)
        state.stage = 2
        second = theta.step(ConstructionView(state), 2, 64)
        assert [e.x for e in second] == [2]

    def test_picked_witness_is_covered(self, state):
        theta = FaithfulThetaAdversary(index=0)
        _apply(state, theta.step(ConstructionView(state), 1, 64), 1)
        state.stage = 2
        assert state.fresh_number(state.nodes[2].node) == 3
        state.note_number(30)
        assert state.fresh_number(state.nodes[2].node) == 31
        emissions = theta.step(ConstructionView(state), 2, 64)
        assert [e.x for e in emissions] == [2, 3, 31]

    def test_budget_cut_is_made_up_next_stage(self, state):
        theta = FaithfulThetaAdversary(index=0)
        first = theta.step(ConstructionView(state), 1, 1)
        assert [e.x for e in first] == [0]
        _apply(state, first, 1)
        state.stage = 2
        second = theta.step(ConstructionView(state), 2, 64)
        assert [e.x for e in second] == [1, 2]


class TestScripted:
    SCRIPT = [
        {"stage": 2, "x": 0, "span": 2, "use": 3},
        {"stage": 2, "x": 5, "y": 1, "role": "Theta"},
        {"stage": 3, "x": 4, "kind": "w", "role": "Psi"},
    ]

    def test_steps_fire_at_their_stage(self, state):
        state.D.apply_change(1, ChangeKind.ENUMERATE, 1)
        psi = ScriptedAdversary(role=Role.PSI, index=0, params={"script": self.SCRIPT})
        assert psi.step(ConstructionView(state), 1, 64) == []
        state.stage = 2
        emissions = psi.step(ConstructionView(state), 2, 64)
        assert [(e.x, e.y, str(e.segment)) for e in emissions] == [(0, 0, "010"), (1, 0, "010")]
        state.stage = 3
        assert psi.step(ConstructionView(state), 3, 64) == [JournalEmission(0, 4)]

    def test_default_output_follows_the_target(self, state):
        state.D.apply_change(1, ChangeKind.ENUMERATE, 1)
        phi = ScriptedAdversary(role=Role.PHI, index=0, params={"script": self.SCRIPT})
        state.stage = 2
        emissions = phi.step(ConstructionView(state), 2, 64)
        assert [(e.role, e.x, e.y) for e in emissions] == [(Role.PHI, 0, 0), (Role.PHI, 1, 1)]

    def test_role_tags_filter_steps(self, state):
        theta = ScriptedAdversary(role=Role.THETA, index=0, params={"script": self.SCRIPT})
        assert sorted(theta.schedule) == [2]
        state.stage = 2
        emissions = theta.step(ConstructionView(state), 2, 64)
        assert [(e.x, e.y) for e in emissions] == [(0, 0), (1, 0), (5, 1)]

    @pytest.mark.parametrize("step", [
        {"stage": 0, "x": 0},
        {"stage": 1, "x": 0, "y": 2},
        {"stage": 1, "x": 0, "colour": "red"},
        {"stage": 1, "x": 0, "kind": "w", "role": "Theta"},
    ])
    def test_bad_steps_are_rejected(self, step):
        with pytest.raises(ValueError):
            ScriptedAdversary(role=Role.PSI, index=0, params={"script": [step]})

    def test_over_budget_is_cut(self, state):
        psi = ScriptedAdversary(role=Role.PSI, index=0, params={"script": [{"stage": 1, "x": 0, "span": 5}]})
        assert len(psi.step(ConstructionView(state), 1, 2)) == 2
