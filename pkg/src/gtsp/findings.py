"""Audit findings: observed violations of claims the algorithm relies on.

A finding is not an exception. Pipelines collect them and keep going so that a
batch run can report every place where an audited claim failed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

# codes
CRITICAL_EDGE_LEFT = "critical_edge_survives"
CRITICAL_ON_F2 = "critical_edge_on_f2"
ITERATION_CAP = "iteration_cap_exceeded"
ALG2_STUCK = "alg2_stuck_vertex"
F1_NOT_CUBIC = "f1_not_cubic"
BRIDGED_REDUCTION = "reduction_has_bridge"
LEFTOVER_COUNT = "leftover_count_not_two"
MATCHING_REPAIR = "kjoin_repair"
DUAL_INFEASIBLE = "dual_infeasible"
SMALL_GROUP_COST = "group_cost_below_4"
DUAL_RATIO = "dual_ratio_violation"
RATIO = "ratio_violation"
F1_RATIO = "f1_ratio_violation"
INVALID_TOUR = "invalid_tour"


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    data: dict[str, Any] = field(default_factory=dict, compare=False)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.data:
            out["data"] = self.data
        return out
