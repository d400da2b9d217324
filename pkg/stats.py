from collections import deque
from datetime import datetime
from typing import Optional

import humanize


class SolverStats:
    """Per-run descent diagnostics: objective and gradient histories plus line-search counters."""

    # Maximum samples to keep in memory; the default iteration budget fits
    MAX_SAMPLES = 20000

    def __init__(self, name: str = "solver", stall_rtol: float = 1e-12, stall_window: int = 10):
        self.name = name
        self.stall_rtol = stall_rtol
        self.stall_window = stall_window
        self.start_time = datetime.now()
        self.iterations = 0
        self.backtracks = 0
        self.rejected_steps = 0
        # Bounded deques keep memory flat for long runs
        self.objective = deque(maxlen=self.MAX_SAMPLES)
        self.gradient_norms = deque(maxlen=self.MAX_SAMPLES)
        self.best_gradient_norm = float("inf")
        self._stalled_for = 0
        self._best_at_window_start = float("inf")

    def record(self, objective: float, gradient_norm: float, backtracks: int = 0):
        self.iterations += 1
        self.backtracks += backtracks
        previous = self.objective[-1] if self.objective else None
        self.objective.append(float(objective))
        self.gradient_norms.append(float(gradient_norm))
        improved = gradient_norm < self.best_gradient_norm
        if improved:
            self.best_gradient_norm = float(gradient_norm)
        self._track_stall(previous, objective)

    def _track_stall(self, previous: Optional[float], current: float):
        if previous is None:
            return
        scale = max(abs(previous), 1e-300)
        if abs(previous - current) / scale < self.stall_rtol:
            if self._stalled_for == 0:
                self._best_at_window_start = self.best_gradient_norm
            self._stalled_for += 1
        else:
            self._stalled_for = 0

    def stalled(self) -> bool:
        """Objective flat for ``stall_window`` iterations and the gradient norm stopped improving."""
        if self._stalled_for < self.stall_window:
            return False
        return self.best_gradient_norm >= self._best_at_window_start

    def is_monotone(self, rtol: float = 1e-12) -> bool:
        values = list(self.objective)
        return all(b <= a + rtol * max(abs(a), 1.0) for a, b in zip(values, values[1:]))

    def get_elapsed(self):
        return datetime.now() - self.start_time

    def elapsed_text(self) -> str:
        return humanize.precisedelta(self.get_elapsed(), minimum_unit="milliseconds")

    def as_dict(self) -> dict:
        return {
            "solver": self.name,
            "iterations": self.iterations,
            "backtracks": self.backtracks,
            "rejected_steps": self.rejected_steps,
            "final_objective": self.objective[-1] if self.objective else None,
            "best_gradient_norm": self.best_gradient_norm,
            "elapsed": self.elapsed_text(),
        }
