"""Per-UAV energy budget: propulsion plus communication power over T slots."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EnergyModel:
    """Energy bookkeeping for one UAV.

    The defaults are placeholders chosen so that the budget never binds for
    the transmit powers used here; none of them are measured values.
    """

    p_prop: float = 100.0
    slot_duration: float = 1.0
    horizon: int = 10
    e_max: float = 1e5

    def __post_init__(self):
        if min(self.p_prop, self.slot_duration, self.e_max) <= 0 or self.horizon < 1:
            raise ValueError("energy model parameters must be positive")


def total_energy(model, p_comm_per_slot):
    """Joules spent over the horizon: tau * sum_t (p_prop + p_comm(t))."""
    p = np.asarray(p_comm_per_slot, dtype=float)
    if p.shape != (model.horizon,):
        raise ValueError(f"expected {model.horizon} per-slot powers, got shape {p.shape}")
    return float(model.slot_duration * np.sum(model.p_prop + p))


def check_energy_feasible(model, p_comm_per_slot):
    """Return ``(feasible, slack)`` with slack = e_max - total energy (J)."""
    slack = model.e_max - total_energy(model, p_comm_per_slot)
    return slack >= 0, slack
