"""Adversaries realizing the functionals Ψ_e, Φ_e, Θ_e and the sets W_e"""

from dataclasses import dataclass
from typing import List

from ..config import RunConfig
from ..errors import ConfigError
from ..functionals import Role
from .base_adversary import (
    AxiomEmission,
    BaseAdversary,
    Emission,
    JournalEmission,
    adversary_registry,
)
from .chaotic import ChaoticAdversary
from .faithful import FAITHFUL, FaithfulPhiAdversary, FaithfulPsiAdversary, FaithfulThetaAdversary
from .scripted import LaggardAdversary, ScriptedAdversary, ScriptStep, SilentAdversary


def _faithful(role: Role, **kwargs) -> BaseAdversary:
    return FAITHFUL[role](role=role, **kwargs)


adversary_registry.register("silent", SilentAdversary)
adversary_registry.register("faithful", _faithful)
adversary_registry.register("faithful-psi", FaithfulPsiAdversary)
adversary_registry.register("faithful-phi", FaithfulPhiAdversary)
adversary_registry.register("faithful-theta", FaithfulThetaAdversary)
adversary_registry.register("laggard", LaggardAdversary)


def _laggard_for(expected: Role):
    def factory(role: Role, **kwargs) -> BaseAdversary:
        if role is not expected:
            raise ValueError(f"laggard-{expected.value.lower()} cannot drive {role.value}")
        return LaggardAdversary(role=role, **kwargs)
    return factory


for _role in Role:
    adversary_registry.register(f"laggard-{_role.value.lower()}", _laggard_for(_role))
adversary_registry.register("chaotic", ChaoticAdversary)
adversary_registry.register("scripted", ScriptedAdversary)


@dataclass
class AdversaryBinding:
    """Everything driving index e: one behaviour per functional and a per-stage budget"""

    index: int
    budget: int
    behaviours: List[BaseAdversary]


def build_bindings(config: RunConfig) -> List[AdversaryBinding]:
    bindings = []
    for spec in sorted(config.adversaries, key=lambda a: a.index):
        seed = config.seed * 1_000_003 + spec.seed
        behaviours = []
        for role, name in ((Role.PSI, spec.psi), (Role.PHI, spec.phi), (Role.THETA, spec.theta)):
            if name == "silent":
                continue
            try:
                behaviours.append(adversary_registry.create(name, role, spec.index, seed, spec.params))
            except KeyError:
                raise ConfigError(
                    f"unknown behaviour {name!r} for {role.value}_{spec.index}; known: {adversary_registry.list_adversaries()}"
                ) from None
            except ValueError as e:
                raise ConfigError(f"adversary {spec.index}: {e}") from e
        bindings.append(AdversaryBinding(spec.index, spec.budget or config.budget, behaviours))
    return bindings


__all__ = [
    "AdversaryBinding", "AxiomEmission", "BaseAdversary", "ChaoticAdversary", "Emission",
    "FaithfulPhiAdversary", "FaithfulPsiAdversary", "FaithfulThetaAdversary", "JournalEmission",
    "LaggardAdversary", "ScriptStep", "ScriptedAdversary", "SilentAdversary", "adversary_registry",
    "build_bindings",
]
