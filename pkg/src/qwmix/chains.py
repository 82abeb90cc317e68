"""Classical Markov chain analytics.

Column-stochastic convention throughout: P[y, x] = Pr[x -> y], columns
sum to 1, P @ pi == pi, and the matrix 1-norm is the max absolute
column sum, so 0.5 * one_norm(P - Q) is a worst-column total-variation
distance.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property
from math import gcd

import numpy as np

from .config import MIX_THRESHOLD, default_horizon, state_cap
from .graphs import Graph

COLUMN_SUM_TOL = 1e-10
ENTRY_CLAMP = 1e-14
SANDWICH_TOL = 1e-12
MONOTONE_TOL = 1e-9
REVERSIBILITY_TOL = 1e-10
CONDUCTANCE_MAX_STATES = 20


class ReducibleChainError(ValueError):
    """Chain support digraph is not strongly connected."""


class NonReversibleError(ValueError):
    """Detailed balance fails beyond tolerance."""


class HypothesisViolatedError(ValueError):
    """A stated precondition on the chain's entries does not hold."""


class InternalCheckError(AssertionError):
    """A mathematically guaranteed internal invariant failed."""


def one_norm(M: np.ndarray) -> float:
    """Maximum absolute column sum."""
    return float(np.abs(M).sum(axis=0).max())


class MarkovChain:
    """Immutable column-stochastic matrix with cached spectral data."""

    def __init__(self, entries: np.ndarray, label: str = "custom"):
        P = np.array(entries, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError(f"entries must be square, got shape {P.shape}")
        if P.shape[0] > state_cap():
            raise ValueError(f"{P.shape[0]} states exceeds the configured cap")
        low = P.min()
        if low < -ENTRY_CLAMP:
            raise ValueError(f"negative entry {low} below clamp tolerance")
        P[P < 0] = 0.0
        colsums = P.sum(axis=0)
        err = np.abs(colsums - 1.0).max()
        if err > COLUMN_SUM_TOL:
            raise ValueError(f"columns must sum to 1 within {COLUMN_SUM_TOL}, off by {err}")
        P.setflags(write=False)
        self.entries = P
        self.label = label

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def is_symmetric(self) -> bool:
        return bool(np.abs(self.entries - self.entries.T).max() <= 1e-13)

    @cached_property
    def _support_adjacency(self) -> list[list[int]]:
        P = self.entries
        return [list(np.nonzero(P[:, x] > 0)[0]) for x in range(self.size)]

    def _reachable(self, start: int, adj: list[list[int]]) -> np.ndarray:
        seen = np.zeros(self.size, dtype=bool)
        seen[start] = True
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        return seen

    @cached_property
    def irreducibility_witness(self) -> tuple[int, int] | None:
        """None if irreducible, else a state pair (x, y) with no x->y path."""
        fwd = self._support_adjacency
        reach = self._reachable(0, fwd)
        if not reach.all():
            return (0, int(np.nonzero(~reach)[0][0]))
        P = self.entries
        bwd = [list(np.nonzero(P[x, :] > 0)[0]) for x in range(self.size)]
        reach_to_0 = self._reachable(0, bwd)
        if not reach_to_0.all():
            return (int(np.nonzero(~reach_to_0)[0][0]), 0)
        return None

    @cached_property
    def is_irreducible(self) -> bool:
        return self.irreducibility_witness is None

    @cached_property
    def period(self) -> int:
        """gcd of support-cycle lengths, via BFS level differences."""
        if not self.is_irreducible:
            raise ReducibleChainError(f"chain {self.label!r} is reducible")
        adj = self._support_adjacency
        level = np.full(self.size, -1, dtype=np.int64)
        level[0] = 0
        queue = [0]
        g = 0
        while queue:
            nxt = []
            for x in queue:
                for y in adj[x]:
                    if level[y] < 0:
                        level[y] = level[x] + 1
                        nxt.append(y)
                    else:
                        g = gcd(g, int(level[x] + 1 - level[y]))
            queue = nxt
        return abs(g) if g != 0 else 1

    @cached_property
    def stationary(self) -> np.ndarray:
        return stationary_distribution(self)


def stationary_distribution(P: MarkovChain) -> np.ndarray:
    """Unique fixed point of an irreducible chain; exactly uniform for
    symmetric chains."""
    if P.is_symmetric:
        pi = np.full(P.size, 1.0 / P.size)
        pi.setflags(write=False)
        return pi
    witness = P.irreducibility_witness
    if witness is not None:
        raise ReducibleChainError(
            f"chain {P.label!r} is reducible: no path from state {witness[0]} to {witness[1]}"
        )
    A = P.entries - np.eye(P.size)
    A[-1, :] = 1.0
    b = np.zeros(P.size)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    resid = np.abs(P.entries @ pi - pi).sum()
    if resid > 1e-10 or pi.min() <= 0:
        raise InternalCheckError(f"stationary solve failed: residual {resid}, min {pi.min()}")
    pi.setflags(write=False)
    return pi


def symmetrized_generator(P: MarkovChain) -> np.ndarray:
    """Similarity transform of P by diag(sqrt(pi)) that is symmetric
    exactly when P is reversible: H[y, x] = P[y, x] * sqrt(pi_x / pi_y)."""
    pi = P.stationary
    s = np.sqrt(pi)
    H = P.entries * (s[None, :] / s[:, None])
    asym = np.abs(H - H.T).max()
    if asym > REVERSIBILITY_TOL:
        idx = np.unravel_index(np.argmax(np.abs(H - H.T)), H.shape)
        raise NonReversibleError(
            f"chain {P.label!r} is not reversible: symmetrized asymmetry {asym:.3e} at {idx}"
        )
    return 0.5 * (H + H.T)


def spectral_gap(P: MarkovChain) -> float:
    """1 minus the largest non-top singular value of the symmetrized
    chain; 0 for periodic or reducible chains."""
    H = symmetrized_generator(P)
    s = np.sqrt(P.stationary)
    deflated = H - np.outer(s, s)
    lam = np.linalg.eigvalsh(deflated)
    top = float(np.abs(lam).max())
    return float(min(1.0, max(0.0, 1.0 - top)))


def pairwise_column_distance(P: MarkovChain) -> float:
    """d(P): max over column pairs of the total-variation distance."""
    M = P.entries
    n = P.size
    best = 0.0
    chunk = max(1, min(n, 4_000_000 // max(1, n * n)))
    for start in range(0, n, chunk):
        block = M[:, start : start + chunk]
        diffs = np.abs(block[:, :, None] - M[:, None, :]).sum(axis=0)
        best = max(best, 0.5 * float(diffs.max()))
    if P.is_irreducible:
        tv = 0.5 * one_norm(M - np.outer(P.stationary, np.ones(n)))
        if not (tv <= best + SANDWICH_TOL and best <= 2.0 * tv + SANDWICH_TOL):
            raise InternalCheckError(
                f"column-distance sandwich violated: tv={tv}, d(P)={best}"
            )
    return best


@dataclass(frozen=True)
class NoMix:
    """Threshold not reached within the searched horizon."""

    horizon: int


def _threshold_time(M: np.ndarray, pi: np.ndarray, horizon: int) -> int | NoMix:
    """Smallest t <= horizon with worst-column TV(M^t, pi) <= 1/(2e).

    Worst-column TV to the stationary distribution is nonincreasing for
    time-homogeneous chains; violations beyond MONOTONE_TOL are internal
    errors, so the first crossing time is also a stable crossing.
    """
    target = np.outer(pi, np.ones(len(pi)))
    power = M
    prev = math.inf
    for t in range(1, horizon + 1):
        dist = 0.5 * one_norm(power - target)
        if dist > prev + MONOTONE_TOL:
            raise InternalCheckError(
                f"TV distance increased from {prev} to {dist} at step {t}"
            )
        prev = dist
        if dist <= MIX_THRESHOLD:
            return t
        power = M @ power
    return NoMix(horizon)


def mixing_time(P: MarkovChain, horizon: int | None = None) -> int | NoMix:
    """Threshold mixing time at 1/(2e), or NoMix(horizon)."""
    if horizon is None:
        horizon = default_horizon(P.size)
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    witness = P.irreducibility_witness
    if witness is not None:
        raise ReducibleChainError(
            f"chain {P.label!r} is reducible: no path from state {witness[0]} to {witness[1]}"
        )
    return _threshold_time(P.entries, P.stationary, horizon)


def mixing_time_bound_from_distance(alpha: float) -> int:
    """ceil(log base 1/alpha of 2e): steps to push a column gap of alpha
    below the mixing threshold."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    return int(math.ceil(math.log(2.0 * math.e) / math.log(1.0 / alpha)))


def distance_bound_from_entries(P: MarkovChain, beta: float, gamma: float) -> float:
    """1 - gamma*(2*beta - 1), valid when every column has at least
    beta*N entries that are >= gamma/N."""
    if not beta > 0.5:
        raise ValueError(f"beta must exceed 1/2, got {beta}")
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    n = P.size
    floor = gamma / n - 1e-15
    counts = (P.entries >= floor).sum(axis=0)
    bad = np.nonzero(counts < beta * n - 1e-12)[0]
    if bad.size:
        x = int(bad[0])
        raise HypothesisViolatedError(
            f"column {x} has only {int(counts[x])} entries >= gamma/N, needs {beta * n}"
        )
    bound = 1.0 - gamma * (2.0 * beta - 1.0)
    d = pairwise_column_distance(P)
    if d > bound + SANDWICH_TOL:
        raise InternalCheckError(f"entry bound {bound} below measured d(P)={d}")
    return bound


def conductance(P: MarkovChain) -> float:
    """Worst cut-flow to cut-mass ratio over subsets with pi(S) <= 1/2,
    with flow Q(S, S-bar) summing Q(x, y) = pi_x * P[y, x].

    Exact subset enumeration, so N is capped at 20.
    """
    n = P.size
    if n > CONDUCTANCE_MAX_STATES:
        raise ValueError(f"conductance enumerates subsets exactly; N={n} exceeds {CONDUCTANCE_MAX_STATES}")
    if not P.is_irreducible:
        raise ReducibleChainError(f"chain {P.label!r} is reducible")
    pi = P.stationary
    Q = pi[:, None] * P.entries.T  # Q[x, y] = pi_x * P[y, x]
    rowsum = Q.sum(axis=1)
    best = math.inf
    n_masks = 1 << n
    chunk = 1 << 16
    bits = np.arange(n)
    for start in range(1, n_masks - 1, chunk):
        masks = np.arange(start, min(start + chunk, n_masks - 1), dtype=np.int64)
        member = ((masks[:, None] >> bits[None, :]) & 1).astype(np.float64)
        mass = member @ pi
        valid = mass <= 0.5 + 1e-12
        if not valid.any():
            continue
        member = member[valid]
        mass = mass[valid]
        internal = ((member @ Q) * member).sum(axis=1)
        flow = member @ rowsum - internal
        ratios = flow / mass
        best = min(best, float(ratios.min()))
    phi = best
    if P.is_symmetric or _is_reversible(P):
        H = symmetrized_generator(P)
        lam = np.sort(np.linalg.eigvalsh(H))
        signed_gap = 1.0 - lam[-2] if n > 1 else 1.0
        abs_gap = spectral_gap(P)
        if 0.5 * phi * phi > signed_gap + MONOTONE_TOL:
            raise InternalCheckError(
                f"conductance lower bound violated: phi={phi}, signed gap={signed_gap}"
            )
        if abs_gap > 2.0 * phi + MONOTONE_TOL:
            raise InternalCheckError(
                f"conductance upper bound violated: gap={abs_gap}, phi={phi}"
            )
    return phi


def _is_reversible(P: MarkovChain) -> bool:
    try:
        symmetrized_generator(P)
        return True
    except NonReversibleError:
        return False


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    holds: bool
    conclusive: bool = True


@dataclass(frozen=True)
class MixingReport:
    tau_mix: int | NoMix
    delta: float
    d_of_P: float
    phi: float | None
    bound_checks: tuple[BoundCheck, ...]

    def all_hold(self) -> bool:
        return all(c.holds for c in self.bound_checks if c.conclusive)


def verify_inequalities(P: MarkovChain, horizon: int | None = None) -> MixingReport:
    """Audit the relaxation-time bounds, the conductance sandwich (for
    N <= 20), and the column-distance sandwich on one chain.

    The relaxation checks reported are 1/delta <= tau_mix and
    tau_mix <= (1/delta) * (1 + 0.5*ln(1/pi_min)). When the chain fails
    to mix within the horizon, each side is kept only if the horizon
    already decides it; otherwise the check is flagged inconclusive.
    """
    if horizon is None:
        horizon = default_horizon(P.size)
    delta = spectral_gap(P)
    pi = P.stationary
    d = pairwise_column_distance(P)
    tau = mixing_time(P, horizon)
    checks: list[BoundCheck] = []

    inv_delta = math.inf if delta == 0.0 else 1.0 / delta
    upper = inv_delta * (1.0 + 0.5 * math.log(1.0 / float(pi.min())))
    if isinstance(tau, NoMix):
        # tau exceeds the horizon, so each side is decided only when the
        # horizon itself separates the two quantities.
        lower_holds = inv_delta <= horizon + SANDWICH_TOL
        checks.append(
            BoundCheck("relaxation_lower", inv_delta, float(horizon), lower_holds, lower_holds)
        )
        upper_holds = horizon <= upper + SANDWICH_TOL
        checks.append(
            BoundCheck("relaxation_upper", float(horizon), upper, upper_holds, not upper_holds)
        )
    else:
        checks.append(
            BoundCheck("relaxation_lower", inv_delta, float(tau), inv_delta <= tau + SANDWICH_TOL)
        )
        checks.append(
            BoundCheck("relaxation_upper", float(tau), upper, tau <= upper + SANDWICH_TOL)
        )

    phi = None
    if P.size <= CONDUCTANCE_MAX_STATES:
        phi = conductance(P)
        checks.append(
            BoundCheck("conductance_lower", 0.5 * phi * phi, delta, 0.5 * phi * phi <= delta + SANDWICH_TOL)
        )
        checks.append(
            BoundCheck("conductance_upper", delta, 2.0 * phi, delta <= 2.0 * phi + SANDWICH_TOL)
        )

    tv = 0.5 * one_norm(P.entries - np.outer(pi, np.ones(P.size)))
    checks.append(BoundCheck("column_distance_lower", tv, d, tv <= d + SANDWICH_TOL))
    checks.append(BoundCheck("column_distance_upper", d, 2.0 * tv, d <= 2.0 * tv + SANDWICH_TOL))
    return MixingReport(tau, delta, d, phi, tuple(checks))


def standard_chain(G: Graph) -> MarkovChain:
    """Simple-random-walk chain of a graph: column x holds 1/deg(x) at
    each neighbor of x."""
    deg = G.degrees()
    if (deg == 0).any():
        raise ValueError(f"graph {G.kind_tag} has an isolated vertex")
    if not G.is_connected():
        raise ValueError(f"graph {G.kind_tag} is disconnected")
    P = np.zeros((G.n, G.n))
    for (u, v) in G.edges:
        P[v, u] = 1.0 / deg[u]
        P[u, v] = 1.0 / deg[v]
    return MarkovChain(P, f"P({G.kind_tag})")


def lazy_chain(P: MarkovChain, hold: float = 0.5) -> MarkovChain:
    """Mix in a holding probability: hold*I + (1-hold)*P."""
    if not (0.0 < hold < 1.0):
        raise ValueError(f"hold must lie in (0,1), got {hold}")
    M = hold * np.eye(P.size) + (1.0 - hold) * P.entries
    return MarkovChain(M, f"lazy({P.label})")


def uniform_projector_chain(n: int) -> MarkovChain:
    """The rank-one chain u 1^T whose every column is uniform."""
    return MarkovChain(np.full((n, n), 1.0 / n), f"uniform({n})")


def random_symmetric_chain(n: int, rng: np.random.Generator) -> MarkovChain:
    """Random symmetric doubly stochastic chain: symmetrize a uniform
    random matrix, then scale rows/columns symmetrically to sum 1."""
    A = rng.uniform(0.0, 1.0, size=(n, n))
    M = 0.5 * (A + A.T)
    for _ in range(10_000):
        r = M.sum(axis=0)
        M = M / np.sqrt(np.outer(r, r))
        if np.abs(M.sum(axis=0) - 1.0).max() < 1e-14:
            break
    M = 0.5 * (M + M.T)
    return MarkovChain(M, f"random_symmetric({n})")


CSV_HEADER_PREFIX = "# column-stochastic N="


def save_csv(P: MarkovChain, path: str) -> None:
    """Dense row-major CSV with a convention header; 17 significant
    digits round-trip float64 exactly."""
    lines = [f"{CSV_HEADER_PREFIX}{P.size}"]
    for row in P.entries:
        lines.append(",".join(f"{v:.17g}" for v in row))
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_csv(path: str, label: str | None = None) -> MarkovChain:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith(CSV_HEADER_PREFIX):
        raise ValueError(f"missing {CSV_HEADER_PREFIX!r} header in {path}")
    n = int(lines[0][len(CSV_HEADER_PREFIX):])
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} rows, found {len(lines) - 1}")
    rows = [np.array([float(v) for v in ln.split(",")]) for ln in lines[1:]]
    M = np.vstack(rows)
    if M.shape != (n, n):
        raise ValueError(f"expected {n}x{n} matrix, got {M.shape}")
    return MarkovChain(M, label or path)
