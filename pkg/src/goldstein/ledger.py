"""Call accounting shared by the exact and approximate algorithms."""

from __future__ import annotations

from dataclasses import dataclass, asdict


@dataclass
class OracleLedger:
    """Monotone counters for one run. Not shared between runs."""

    goldstein_calls: int = 0
    approx_calls: int = 0
    subgrad_evals: int = 0
    value_evals: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


class CountedObjective:
    """Proxy that charges every value and subgradient evaluation to a ledger."""

    def __init__(self, objective, ledger: OracleLedger | None = None):
        self.objective = objective
        self.ledger = ledger if ledger is not None else OracleLedger()

    def __getattr__(self, name):
        return getattr(self.objective, name)

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        self.ledger.value_evals += 1
        return self.objective.evaluate(x)

    def raw_subgradient(self, x):
        self.ledger.subgrad_evals += 1
        return self.objective.raw_subgradient(x)
