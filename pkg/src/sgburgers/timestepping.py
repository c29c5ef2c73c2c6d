"""Explicit Runge-Kutta steppers with a fixed time step."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

RHSFunction = Callable[[np.ndarray], np.ndarray]


def ssprk33_step(u, dt: float, rhs: RHSFunction):
    """Three-stage, third-order SSP Runge-Kutta step (Shu-Osher form)."""
    u1 = u + dt * rhs(u)
    u2 = 0.75 * u + 0.25 * (u1 + dt * rhs(u1))
    return u / 3.0 + (2.0 / 3.0) * (u2 + dt * rhs(u2))


def rk4_step(u, dt: float, rhs: RHSFunction):
    k1 = rhs(u)
    k2 = rhs(u + 0.5 * dt * k1)
    k3 = rhs(u + 0.5 * dt * k2)
    k4 = rhs(u + dt * k3)
    return u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class Scheme(enum.Enum):
    SSPRK33 = "ssprk33"
    RK4 = "rk4"


_STEPS = {Scheme.SSPRK33: ssprk33_step, Scheme.RK4: rk4_step}


@dataclass(frozen=True)
class Stepper:
    scheme: Scheme
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"time step must be positive, got {self.dt}")

    def step(self, u, rhs: RHSFunction):
        return _STEPS[self.scheme](u, self.dt, rhs)


def integrate(
    u0,
    rhs: RHSFunction,
    stepper: Stepper,
    steps: int,
    post_step: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    observer: Optional[Callable[[int, np.ndarray], None]] = None,
):
    """Advance *steps* fixed steps.

    *post_step* (e.g. a filter) is applied after every step; *observer* is
    called with ``(step_index, state)`` after it, starting with step 0 for the
    initial state. A non-finite state raises :class:`FloatingPointError`.
    """
    u = np.array(u0, dtype=float)
    if observer is not None:
        observer(0, u)
    for n in range(1, steps + 1):
        u = stepper.step(u, rhs)
        if post_step is not None:
            u = post_step(u)
        if not np.all(np.isfinite(u)):
            raise FloatingPointError(f"non-finite state after step {n}")
        if observer is not None:
            observer(n, u)
    return u
