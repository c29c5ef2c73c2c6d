import numpy as np
import pytest

from sgburgers.timestepping import Scheme, Stepper, integrate, rk4_step, ssprk33_step


def _error(step, n):
    dt = 1.0 / n
    u = np.array([1.0])
    for _ in range(n):
        u = step(u, dt, lambda v: -v + np.cos(v))
    return u


@pytest.mark.parametrize("step, order", [(ssprk33_step, 3), (rk4_step, 4)])
def test_convergence_order(step, order):
    ref = _error(rk4_step, 4096)
    e1 = abs(_error(step, 20) - ref)[0]
    e2 = abs(_error(step, 40) - ref)[0]
    assert np.log2(e1 / e2) == pytest.approx(order, abs=0.2)


def test_ssprk_is_exact_for_cubic_growth():
    # u' = 1 has exact solution u0 + t
    assert ssprk33_step(np.array([2.0]), 0.5, lambda v: np.ones_like(v))[0] == pytest.approx(2.5)


def test_integrate_hooks_and_failure():
    seen = []
    out = integrate(
        np.array([1.0]),
        lambda v: -v,
        Stepper(Scheme.RK4, 0.1),
        5,
        post_step=lambda v: v * 1.0,
        observer=lambda n, v: seen.append(n),
    )
    assert seen == list(range(6))
    assert out[0] == pytest.approx(np.exp(-0.5), rel=1e-6)
    with pytest.raises(FloatingPointError):
        integrate(np.array([1.0]), lambda v: v * np.inf, Stepper(Scheme.SSPRK33, 0.1), 3)
    with pytest.raises(ValueError):
        Stepper(Scheme.RK4, 0.0)


def test_linear_decay_examples():
    one = ssprk33_step(np.array([1.0]), 0.1, lambda v: -v)[0]
    assert abs(one - np.exp(-0.1)) <= 0.1**4 / 24 * 1.1
    assert np.array_equal(rk4_step(np.array([3.0]), 0.5, np.zeros_like), [3.0])

    def final(step, n):
        u = np.array([1.0])
        for _ in range(n):
            u = step(u, 1.0 / n, lambda v: -v)
        return abs(u[0] - np.exp(-1.0))

    for step, order in ((ssprk33_step, 3.0), (rk4_step, 4.0)):
        assert np.log2(final(step, 40) / final(step, 80)) == pytest.approx(order, abs=0.1)
