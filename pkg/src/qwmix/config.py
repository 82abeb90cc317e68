"""Global numeric conventions shared by every module.

Convention: Markov chains are column-stochastic. P[y, x] is the
probability of moving from state x to state y, stationary vectors
satisfy P @ pi == pi, and the matrix 1-norm is the maximum absolute
column sum.
"""

import math
import os

# Threshold for (worst-column) total-variation mixing, exactly 1/(2e).
MIX_THRESHOLD = 1.0 / (2.0 * math.e)

# Dense-state cap: O(N^3) spectral work stays under about a minute.
DEFAULT_STATE_CAP = 65536

# Eigenvalues closer than this are treated as one degenerate cluster.
DEFAULT_CLUSTER_TOL = 1e-8

# Truncation tail mass for infinite-support measurement rules.
DEFAULT_TAIL_TOL = 1e-10

# Embedded in cache keys so stale caches never mask code changes.
CODE_VERSION = "qwmix-0.1.0"


def state_cap() -> int:
    """Dense-state cap; QWMIX_STATE_CAP overrides the default."""
    raw = os.environ.get("QWMIX_STATE_CAP")
    if raw is None or raw.strip() == "":
        return DEFAULT_STATE_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"QWMIX_STATE_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValueError(f"QWMIX_STATE_CAP must be positive, got {cap}")
    return cap


def default_horizon(n: int) -> int:
    """Default mixing-time search horizon, ceil(10*N*(1+ln N))."""
    return int(math.ceil(10.0 * n * (1.0 + math.log(n)))) if n > 1 else 10
