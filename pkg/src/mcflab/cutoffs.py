"""Smooth plateau cutoffs, bump profiles, and the radius weight function.

Two plateau conventions are used by the construction: the gluing cutoff
(1 on x < 0, 0 on x > 1) and the perturbation bump (1 on x < 1/2, 0 on
x > 1). Both are realized from the same exponential smoothstep, so all
derivatives vanish at the plateau edges.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = ["CutoffEta", "glue_cutoff", "bump_cutoff", "unit_bump", "r_tilde"]


def _psi(t):
    """exp(-1/t) on t > 0, 0 elsewhere (C-infinity)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _smoothstep(t):
    """0 for t <= 0, 1 for t >= 1, C-infinity monotone in between."""
    t = np.asarray(t, dtype=float)
    a = _psi(t)
    b = _psi(1.0 - t)
    return a / (a + b + 1e-300)


@dataclass(frozen=True)
class CutoffEta:
    """Evaluation rule for a plateau cutoff.

    variant "glue": eta = 1 for x < 0 and 0 for x > 1.
    variant "bump": eta = 1 for x < 1/2 and 0 for x > 1.
    transition_width rescales the transition interval about its left edge.
    """

    variant: str = "glue"
    transition_width: float = 1.0

    def __post_init__(self):
        if self.variant not in ("glue", "bump"):
            raise ValueError(f"unknown cutoff variant {self.variant!r}")
        if not self.transition_width > 0:
            raise ValueError("transition_width must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.variant == "glue":
            t = x / self.transition_width
        else:
            t = (2.0 * x - 1.0) / self.transition_width
        return 1.0 - _smoothstep(t)

    def derivative(self, x, order=1, h=1e-4):
        """Central finite-difference derivative (the cutoff is smooth)."""
        x = np.asarray(x, dtype=float)
        if order == 1:
            return (self(x + h) - self(x - h)) / (2 * h)
        if order == 2:
            return (self(x + h) - 2 * self(x) + self(x - h)) / h**2
        raise ValueError("order must be 1 or 2")

    def derivative_bounds(self):
        """Reported sup |eta'| and sup |eta''| over the transition."""
        return _cutoff_bounds(self.variant, self.transition_width)


@lru_cache(maxsize=None)
def _cutoff_bounds(variant, width):
    eta = CutoffEta(variant=variant, transition_width=width)
    lo = 0.0 if variant == "glue" else 0.5
    xs = np.linspace(lo - 0.1, lo + width * (1.0 if variant == "glue" else 0.5) + 0.1, 4001)
    d1 = np.max(np.abs(eta.derivative(xs, 1)))
    d2 = np.max(np.abs(eta.derivative(xs, 2, h=1e-3)))
    return float(d1), float(d2)


glue_cutoff = CutoffEta(variant="glue")
bump_cutoff = CutoffEta(variant="bump")


def unit_bump(y):
    """Smooth bump supported on (0, 1), max value 1 at y = 1/2."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = (y > 0) & (y < 1)
    yi = y[inside]
    out[inside] = np.exp(1.0 - 0.25 / (yi * (1.0 - yi)))
    return out


def unit_bump_grad_bound():
    """sup |d unit_bump / dy| over (0, 1), measured once."""
    ys = np.linspace(1e-4, 1 - 1e-4, 20001)
    b = unit_bump(ys)
    return float(np.max(np.abs(np.gradient(b, ys))))


def r_tilde(radius):
    """Smooth weight >= 1 equal to |gamma| once |gamma| >= 2."""
    q = np.asarray(radius, dtype=float)
    m = 1.0 - _smoothstep(2.0 - q)   # 0 for q <= 1, 1 for q >= 2
    return 1.0 + m * (q - 1.0)
