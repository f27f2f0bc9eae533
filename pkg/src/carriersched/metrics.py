"""Performance metrics: completion rate, carrier/timeslot/energy savings.

Sign convention, used consistently everywhere: positive means the
candidate scheduler saves resources relative to the reference. Percent
variants normalize by the reference value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import UndefinedRatioError


@dataclass(frozen=True)
class RadioParams:
    """Radio constants for the energy model (Zolertia Firefly reference)."""

    p_tx: float = 0.102       # W, transmit
    p_rx: float = 0.072       # W, receive
    t_tx: float = 128e-6      # s, tag transmits its value
    t_rx: float = 256e-6      # s, tag receives the request
    t_req: float = 128e-6     # s, host asks the neighbor to start the carrier
    t_cg: float = 15.75e-3    # s, carrier provisioning per interrogation

    def __post_init__(self):
        for name in ("p_tx", "p_rx", "t_tx", "t_rx", "t_req", "t_cg"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


FIREFLY = RadioParams()


def avg_energy_per_tag(carriers: int, tag_count: int,
                       radio: RadioParams = FIREFLY) -> float:
    """Average energy (J) to query one tag's value, given C carrier slots.

    E = P_tx*t_tx + P_rx*((C/T)*t_req + t_rx) + P_tx*(t_req + (C/T)*t_cg);
    strictly increasing and affine in C for fixed T, so fewer carriers
    always means less energy.
    """
    if tag_count < 1:
        raise ValueError("tag_count must be >= 1")
    if carriers < 0:
        raise ValueError("carriers must be >= 0")
    ratio = carriers / tag_count
    return (radio.p_tx * radio.t_tx
            + radio.p_rx * (ratio * radio.t_req + radio.t_rx)
            + radio.p_tx * (radio.t_req + ratio * radio.t_cg))


def carriers_saved(c_reference: int, c_candidate: int) -> int:
    """Positive when the candidate needs fewer carrier slots."""
    return c_reference - c_candidate


def carriers_saved_pct(c_reference: int, c_candidate: int) -> float:
    if c_reference == 0:
        raise UndefinedRatioError("reference carrier count is zero")
    return 100.0 * (c_reference - c_candidate) / c_reference


def timeslots_saved(l_reference: int, l_candidate: int) -> int:
    """Positive when the candidate schedule is shorter."""
    return l_reference - l_candidate


def timeslots_saved_pct(l_reference: int, l_candidate: int) -> float:
    if l_reference == 0:
        raise UndefinedRatioError("reference slot count is zero")
    return 100.0 * (l_reference - l_candidate) / l_reference


def energy_saved_pct(c_reference: int, c_candidate: int, tag_count: int,
                     radio: RadioParams = FIREFLY) -> float:
    """Percent energy saved by the candidate; sign matches carriers_saved."""
    e_ref = avg_energy_per_tag(c_reference, tag_count, radio)
    e_cand = avg_energy_per_tag(c_candidate, tag_count, radio)
    return 100.0 * (e_ref - e_cand) / e_ref


def completion_rate(outcomes: Sequence[bool]) -> float:
    """Percentage of runs that delivered a complete schedule."""
    if not outcomes:
        raise UndefinedRatioError("completion rate of an empty outcome list")
    return 100.0 * sum(1 for o in outcomes if o) / len(outcomes)
