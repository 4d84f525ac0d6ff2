"""Hand-written traces: one clean, and one forged per verifier check"""

from typing import List

from isolation_sim.config import RunConfig

FORGED_CONFIG = RunConfig.parse({"maxDepth": 3, "horizon": 5, "seed": 0})

# R_0 picks agitator 5, which enters at stage 2 and is released at stage 4,
# so <5, 2> = 30 enters A at stage 4
CLEAN = [
    "HDR seed=0 maxDepth=3 horizon=5",
    "EVT 2 1 0 R3b x=0 d=5",
    "CHG 2 5 Enumerate",
    "CHG 4 5 Extract",
    "LCH 4 30 5 2",
    "EVT 4 1 0 R2 x=0 extracted=5 kept=-",
    "EVT 4 1 0 ACT out=cont ell=5 exp=1",
]

FORGED_DCE = CLEAN + ["CHG 5 5 Enumerate"]

FORGED_LACHLAN = [line.replace("LCH 4 ", "LCH 5 ") for line in CLEAN]

FORGED_BOUNDS = CLEAN + [
    "EVT 3 0 0 N4 k=0 cyc=1 ups=- dstar=-",
    "EVT 5 0 0 N4 k=1 cyc=2 ups=- dstar=-",
]

# Γ(1) = 0 is defined although 1 entered K at stage 2
FORGED_AGREEMENTS = CLEAN + [
    "CEJ K 1 2",
    "EVT 3 1 0 R3 y=0 ell=1",
    "EVT 3 1 0 R3b x=0 d=6",
    "EVT 3 1 0 R3b x=1 d=7",
    "EVT 3 1 0 R3c x=0 v=0 use=1 snap=1:- d=6",
    "EVT 3 1 0 R3c x=1 v=0 use=1 snap=1:- d=7",
    "EVT 3 1 0 ACT out=cont ell=1 exp=1",
]

# P_0 claims it put its witness 9 into D, but no change for 9 was ever made
FORGED_OUTCOMES = CLEAN + [
    "AXM Theta 0 4 - 9 0 3",
    "EVT 3 2 0 P5 w=9 y=0 use=4 tau=4:-",
]

# d_{0,1} is picked twice within one epoch
FORGED_AGITATORS = CLEAN + [
    "EVT 5 1 0 R3b x=1 d=8",
    "EVT 5 1 0 R3b x=1 d=9",
]

# P_0 takes 7 out of D
FORGED_PROVENANCE = [
    "HDR seed=0 maxDepth=3 horizon=5",
    "EVT 2 1 0 R3b x=0 d=5",
    "CHG 2 5 Enumerate",
    "CHG 3 7 Enumerate",
    "CHG 4 5 Extract",
    "LCH 4 30 5 2",
    "EVT 4 1 0 R2 x=0 extracted=5 kept=-",
    "EVT 4 1 0 ACT out=cont ell=5 exp=1",
    "CHG 5 7 Extract",
    "LCH 5 58 7 3",
    "EVT 5 2 0 P3 w=7",
    "EVT 5 2 0 ACT out=cont",
]

FORGED = {
    "dce": FORGED_DCE,
    "lachlan": FORGED_LACHLAN,
    "bounds": FORGED_BOUNDS,
    "agreements": FORGED_AGREEMENTS,
    "outcomes": FORGED_OUTCOMES,
    "agitators": FORGED_AGITATORS,
    "provenance": FORGED_PROVENANCE,
}

# N_0 keeps a standing diagonalization in cycle 0 and at the same time a working
# cycle 1 whose live Δ agrees with W_0
OVERLAPPING_OUTCOMES = [
    "HDR seed=0 maxDepth=3 horizon=5",
    "EVT 2 1 0 R3b x=0 d=5",
    "CHG 2 5 Enumerate",
    "AXM Psi 0 2 - 0 0 3",
    "CEJ 0 0 3",
    "EVT 3 0 0 C2 k=0 x=0 div=0",
    "EVT 3 0 0 C2b k=0 x=0 sig=2:- changes=0",
    "EVT 3 0 0 N4 k=0 cyc=1 ups=- dstar=-",
    "EVT 3 0 0 ACT out=stop ell=0 exp=1",
    "EVT 4 0 0 N3 k=0 x=0 dc=2:- first=1 restored=0 unrestorable=0",
    "EVT 4 0 0 C2 k=1 x=0 div=1",
    "EVT 4 0 0 C2a.ii k=1 y=0 v=1 use=1 tau=1:- sig=2:-",
    "EVT 4 0 0 ACT out=cont ell=0 exp=1",
    "CHG 4 5 Extract",
    "LCH 4 30 5 2",
    "EVT 4 1 0 R2 x=0 extracted=5 kept=-",
    "EVT 4 1 0 ACT out=cont ell=5 exp=1",
]


def truncated(lines: List[str], keep: float = 0.5) -> List[str]:
    return lines[: max(2, int(len(lines) * keep))]
