from __future__ import annotations

from dataclasses import dataclass

from .core import DEFAULT_BUDGET
from .spectrum import DEFAULT_CAP

FORMATS = ("text", "json", "dot")


@dataclass(frozen=True)
class Config:
    budget: int = DEFAULT_BUDGET
    window: int = 6
    cap: int = DEFAULT_CAP
    output: str = "text"

    def __post_init__(self):
        if self.budget <= 0 or self.cap <= 0:
            raise ValueError("budget and cap must be positive")
        if self.window < 2:
            raise ValueError("window must be at least 2 for stabilization checks")
        if self.output not in FORMATS:
            raise ValueError(f"output must be one of {FORMATS}")
