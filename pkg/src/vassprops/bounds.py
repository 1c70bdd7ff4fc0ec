"""Length bounds for small witness pseudo-runs, in exact integer arithmetic.

The constants ``c1`` and ``c`` are not fixed by the underlying theory; they
only influence reported bounds and exhaustion thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_C1 = 2
DEFAULT_C = 3
MAX_EXACT_BITS = 10**7


@dataclass(frozen=True)
class BoundParams:
    n: int
    K: int
    absmax_t: int
    absmax_p: int
    pic_t: int = 1
    c1: int = DEFAULT_C1
    c: int = DEFAULT_C

    def __post_init__(self):
        if self.n < 1 or self.K < 1:
            raise ValueError("n and K must be positive")
        if min(self.absmax_t, self.absmax_p, self.c1, self.c) < 1:
            raise ValueError("absmax values and constants must be positive")
        object.__setattr__(self, "pic_t", max(1, self.pic_t))

    @property
    def mu(self) -> int:
        return (1 + self.K) * self.absmax_t * self.absmax_p


def log2_rackoff_g(p: BoundParams, i: int) -> float:
    """Upper estimate of log2 g(i), usable when g(i) is too large to materialize."""
    e = p.n ** p.c1
    lg = e * math.log2(2 * p.mu)
    for _ in range(i):
        lg = e * (math.log2(2 * p.mu * p.pic_t) + lg) + 1
    return lg


def rackoff_g(p: BoundParams, i: int, max_bits: int = MAX_EXACT_BITS) -> int:
    """g(0) = (2mu)^(n^c1); g(i) = (2mu * pic * g(i-1))^(n^c1) + g(i-1)."""
    if not 0 <= i <= p.n:
        raise ValueError(f"index {i} outside 0..{p.n}")
    if log2_rackoff_g(p, i) > max_bits:
        raise OverflowError(f"g({i}) has more than {max_bits} bits")
    e = p.n ** p.c1
    g = (2 * p.mu) ** e
    for _ in range(i):
        g = (2 * p.mu * (p.pic_t * g)) ** e + g
    return g


def closed_bound_exponent(p: BoundParams) -> int:
    return p.n ** ((2 * p.n + 1) * p.c)


def log2_rackoff_closed_bound(p: BoundParams) -> float:
    return float(closed_bound_exponent(p)) * math.log2(2 * p.mu * p.pic_t)


def rackoff_closed_bound(p: BoundParams, max_bits: int = MAX_EXACT_BITS) -> int:
    """(mu * 2 * pic)^(n^((2n+1)c))."""
    if log2_rackoff_closed_bound(p) > max_bits:
        raise OverflowError(f"closed bound has more than {max_bits} bits")
    return (p.mu * 2 * p.pic_t) ** closed_bound_exponent(p)


def bound_summary(p: BoundParams) -> dict:
    """Bound values for reports: exact digits when small, log2 magnitude always."""
    out = {
        "n": p.n,
        "K": p.K,
        "absmax_T": p.absmax_t,
        "absmax_P": p.absmax_p,
        "pic_T": p.pic_t,
        "c1": p.c1,
        "c": p.c,
        "mu": p.mu,
        "log2_g_n": log2_rackoff_g(p, p.n),
        "log2_closed_bound": log2_rackoff_closed_bound(p),
    }
    if out["log2_closed_bound"] <= 4096:
        out["closed_bound"] = str(rackoff_closed_bound(p))
    if out["log2_g_n"] <= 4096:
        out["g_n"] = str(rackoff_g(p, p.n))
    return out
