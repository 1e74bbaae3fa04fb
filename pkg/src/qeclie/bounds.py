"""Dimension-counting bound on correctable error spans and logical error rates.

All quantities are reported as bounds, never as predictions.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BoundReport:
    N: int
    K: int
    t: int | None
    e_t_dim: int
    satisfied: bool
    slack: float

    def summary(self) -> dict:
        return {
            "N": self.N,
            "K": self.K,
            "t": self.t,
            "e_t_dim": self.e_t_dim,
            "satisfied": self.satisfied,
            "slack": self.slack,
        }


def singleton_check(N: int, K: int, e_t_dim: int, t: int | None = None) -> BoundReport:
    """Check N^2 >= |E_t|^2 K^2, with |.| read as operator-span dimension.

    A violated bound certifies that no K-dimensional code on N levels can
    correct the full grade-t span.
    """
    if N < 1 or K < 1 or e_t_dim < 1:
        raise ValueError("N, K, and e_t_dim must be positive integers")
    slack = N ** 2 - e_t_dim ** 2 * K ** 2
    return BoundReport(N=N, K=K, t=t, e_t_dim=e_t_dim,
                       satisfied=slack >= 0, slack=float(slack))


def logical_error_estimate(n: int, p: float, t: int, mode: str = "local") -> float:
    """Upper bound on the logical error probability for a grade-t code.

    Local noise: a logical error needs t+1 or more errors on the same
    subsystem, giving n (p/n)^(t+1). Correlated noise: p^(t+1).
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if n < 1 or t < 0:
        raise ValueError(f"need n >= 1 and t >= 0, got n={n}, t={t}")
    if mode == "local":
        return n * (p / n) ** (t + 1)
    if mode == "correlated":
        return p ** (t + 1)
    raise ValueError(f"mode must be 'local' or 'correlated', got {mode!r}")


def min_grade_from_dims(dims: list[int], K: int, e1_dim: int = 4) -> int:
    """Smallest grade-plus-one value t+1 with e1_dim^(t+1) * K >= min(dims).

    Integer arithmetic throughout (no float logs). The default e1_dim of 4
    matches the spin generator set {1, Jx, Jy, Jz}. Raises when no site is
    larger than K, since no grade can then be supported.
    """
    if not dims or any(d < 1 for d in dims) or K < 1 or e1_dim < 2:
        raise ValueError("dims must be positive, K >= 1, e1_dim >= 2")
    if max(dims) <= K:
        raise ValueError(
            f"no site dimension exceeds K={K}; no valid error grade exists")
    smallest = min(dims)
    t_plus_1 = 1
    while e1_dim ** t_plus_1 * K < smallest:
        t_plus_1 += 1
    return t_plus_1
