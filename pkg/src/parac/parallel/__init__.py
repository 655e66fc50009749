from .atomics import Arena, AtomicInt, AtomicIntArray, JobQueue
from .backends import (
    LeftLookingFactorizer,
    LostFillIn,
    RightLookingFactorizer,
    default_arena_budget,
    default_workspace_capacity,
    factor_parallel_left,
    factor_parallel_right,
)
from .workspace import BUSY, FREE, OCCUPIED, HashWorkspace

__all__ = [
    "Arena", "AtomicInt", "AtomicIntArray", "JobQueue",
    "LeftLookingFactorizer", "RightLookingFactorizer", "LostFillIn",
    "default_arena_budget", "default_workspace_capacity",
    "factor_parallel_left", "factor_parallel_right",
    "HashWorkspace", "FREE", "BUSY", "OCCUPIED",
]
