"""Mission planning with relaxed posets (R-posets) for conjunctions of sc-LTL tasks."""

from ._core import (
    BudgetExceeded,
    ParseError,
    Poset,
    ScenarioError,
    Session,
    SimulationError,
    bench,
    cli,
    plan,
    simulate,
)

__all__ = [
    "BudgetExceeded",
    "ParseError",
    "Poset",
    "ScenarioError",
    "Session",
    "SimulationError",
    "bench",
    "cli",
    "plan",
    "simulate",
]
