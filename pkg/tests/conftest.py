import os

# settings are read on import, so the test database must be chosen first
os.environ["DATABASE_URL"] = "sqlite://"
os.environ["PERSIST_RUNS"] = "false"

from pathlib import Path

import pytest
import yaml

from isolation_sim.config import RunConfig
from isolation_sim.core_sets import BinarySegment
from isolation_sim.state import ConstructionState


@pytest.fixture
def state():
    s = ConstructionState(3)
    s.stage = 1
    return s


@pytest.fixture
def seg():
    return BinarySegment.from_string


@pytest.fixture
def write_yaml(tmp_path):
    def _write(name: str, data) -> Path:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data), encoding="utf-8")
        return path
    return _write


def theta_only(horizon: int = 8) -> RunConfig:
    """A single P-node facing a faithful Θ_0"""
    return RunConfig.parse({
        "maxDepth": 3, "horizon": horizon, "seed": 0,
        "adversaries": [{"index": 0, "theta": "faithful"}],
    })


def psi_only(horizon: int = 6) -> RunConfig:
    return RunConfig.parse({
        "maxDepth": 1, "horizon": horizon, "seed": 0,
        "adversaries": [{"index": 0, "psi": "faithful"}],
    })


def phi_with_k(horizon: int = 12) -> RunConfig:
    """R_0 facing a faithful Φ_0 while 1 enters K at stage 6"""
    return RunConfig.parse({
        "maxDepth": 2, "horizon": horizon, "seed": 0,
        "adversaries": [{"index": 0, "phi": "faithful", "params": {"marker_base": 100}}],
        "kScript": [[1, 6]],
    })


def all_faithful(horizon: int = 30, k_script=None, max_depth: int = 3, seed: int = 0) -> RunConfig:
    return RunConfig.parse({
        "maxDepth": max_depth, "horizon": horizon, "seed": seed,
        "adversaries": [{"index": 0, "psi": "faithful", "phi": "faithful", "theta": "faithful",
                         "params": {"marker_base": 1000}}],
        "kScript": k_script or [],
    })


@pytest.fixture
def configs():
    class _Configs:
        theta_only = staticmethod(theta_only)
        psi_only = staticmethod(psi_only)
        phi_with_k = staticmethod(phi_with_k)
        all_faithful = staticmethod(all_faithful)
    return _Configs
