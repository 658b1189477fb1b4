from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor, grad, no_grad


class NonDeterministicError(RuntimeError):
    pass


def finite_difference_check(
    fn: Callable[[], Tensor],
    params: Sequence[Tensor],
    eps: float = 1e-5,
    max_entries: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``fn`` must rebuild the scalar loss from the current parameter values on
    every call (any sampling noise frozen).  The error per entry is
    ``|analytic - numeric| / max(1, |numeric|)``.  ``max_entries`` limits the
    check to a random subset of entries per parameter.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError(f"eps must lie in [1e-7, 1e-3], got {eps}")
    loss = fn()
    with no_grad():
        again = fn().item()
    if loss.item() != again:
        raise NonDeterministicError(f"fn is not deterministic: {loss.item()!r} != {again!r}")
    analytic = grad(loss, params)
    rng = rng or np.random.default_rng(0)
    worst = 0.0
    with no_grad():
        for p, g in zip(params, analytic):
            flat = p.data.reshape(-1)
            idx = np.arange(flat.size)
            if max_entries is not None and flat.size > max_entries:
                idx = rng.choice(flat.size, size=max_entries, replace=False)
            for i in idx:
                orig = flat[i]
                flat[i] = orig + eps
                up = fn().item()
                flat[i] = orig - eps
                down = fn().item()
                flat[i] = orig
                numeric = (up - down) / (2 * eps)
                err = abs(g.reshape(-1)[i] - numeric) / max(1.0, abs(numeric))
                worst = max(worst, err)
    return worst
