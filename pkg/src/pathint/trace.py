"""Time traces of the complex polarization."""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["PolarizationTrace"]


@dataclass(frozen=True)
class PolarizationTrace:
    """Complex polarization P(t_n) on a uniform time grid (ps)."""

    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("times and values must be 1-D and equal length")
        if t.size >= 2:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise ValueError("times must be strictly increasing")
            if np.max(np.abs(dt - dt[0])) > 1e-9 * max(abs(dt[0]), 1.0):
                raise ValueError("time grid must be uniform")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 \
            else float(self.times[0])

    def __len__(self):
        return self.times.size
