"""Shared fixtures and independent reference implementations.

The brute_* helpers deliberately avoid the library code paths they
check: naive loops, itertools subset enumeration, and full eigenpair
sums with no clustering.
"""

import itertools

import numpy as np
import pytest

from qwmix import (
    MarkovChain,
    lazy_chain,
    random_symmetric_chain,
    standard_chain,
)
from qwmix.graphs import complete, cycle, lattice

MIX_THRESHOLD = 1.0 / (2.0 * np.e)
RANDOM_CHAIN_SEED = 0xC0FFEE


def brute_mixing_time(P: np.ndarray, pi: np.ndarray, horizon: int):
    """First t with max-column TV distance to pi at most 1/(2e)."""
    n = P.shape[0]
    M = np.eye(n)
    for t in range(1, horizon + 1):
        M = P @ M
        dist = max(0.5 * np.abs(M[:, x] - pi).sum() for x in range(n))
        if dist <= MIX_THRESHOLD:
            return t
    return None


def brute_conductance(P: np.ndarray, pi: np.ndarray) -> float:
    """Minimum over proper subsets with pi(S) <= 1/2 of Q(S, S^c)/pi(S)."""
    n = P.shape[0]
    Q = pi[np.newaxis, :] * P  # Q[y, x] = pi_x P[y, x], flow x -> y
    best = np.inf
    for size in range(1, n):
        for S in itertools.combinations(range(n), size):
            mass = pi[list(S)].sum()
            if mass > 0.5 + 1e-12:
                continue
            Sc = [v for v in range(n) if v not in S]
            flow = Q[np.ix_(Sc, list(S))].sum()
            best = min(best, flow / mass)
    return best


def brute_generated_ct(H: np.ndarray, chi) -> np.ndarray:
    """sum_{j,k} chi(lam_j - lam_k) (v_j v_j^T) o (v_k v_k^T), no
    eigenvalue clustering."""
    lam, V = np.linalg.eigh(H)
    n = H.shape[0]
    out = np.zeros((n, n))
    for j in range(n):
        Pj = np.outer(V[:, j], V[:, j])
        for k in range(n):
            Pk = np.outer(V[:, k], V[:, k])
            out += np.real(chi(lam[j] - lam[k])) * (Pj * Pk)
    return out


def brute_dt_average(U: np.ndarray, E: np.ndarray, base: int, weights) -> np.ndarray:
    """sum_t w_t |U^t E|^2 projected, via independent matrix powers."""
    dim = U.shape[0]
    register = dim // base
    out = np.zeros((base, base))
    for t, w in weights:
        Ut = np.linalg.matrix_power(U, t)
        prob = np.abs(Ut @ E) ** 2
        out += w * prob.reshape(base, register, base).sum(axis=1)
    return out


@pytest.fixture(scope="session")
def small_chains():
    rng = np.random.default_rng(RANDOM_CHAIN_SEED)
    return [
        standard_chain(cycle(5)),
        standard_chain(cycle(7)),
        standard_chain(complete(4)),
        standard_chain(complete(6)),
        lazy_chain(standard_chain(lattice(4, 2))),
        random_symmetric_chain(5, rng),
        random_symmetric_chain(8, rng),
    ]


@pytest.fixture(scope="session")
def random_chain_family():
    rng = np.random.default_rng(RANDOM_CHAIN_SEED)
    return [random_symmetric_chain(4 + (i % 13), rng) for i in range(100)]
