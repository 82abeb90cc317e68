"""Quantizations of reversible chains and coined walks.

Continuous time: spectral data of the symmetrized generator H, evolved
as exp(-iHt). Discrete time: an explicit unitary on an enlarged space
together with an embedding of base states and a projection back to a
distribution over base states (measure the position register).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import MarkovChain, symmetrized_generator
from .config import DEFAULT_CLUSTER_TOL, state_cap
from .graphs import lattice

UNITARITY_TOL = 1e-9
EIGEN_RESIDUAL_TOL = 1e-9
PHASE_TOL = 1e-8
PHASE_GAP_MAX_DIM = 4096


class DegenerateSpectrumError(ValueError):
    """The unitary has no eigenphase away from zero."""


class RuleFamilyError(ValueError):
    """Measurement rule family incompatible with the walk kind."""


@dataclass(frozen=True)
class CTWalk:
    """Eigen-decomposed Hamiltonian of a reversible chain.

    eigenvalues are ascending; eigenvectors[:, k] is the k-th real
    orthonormal eigenvector; clusters groups indices of eigenvalues
    closer than cluster_tolerance (single linkage).
    """

    base: MarkovChain
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: tuple[tuple[int, ...], ...]
    cluster_tolerance: float

    @property
    def size(self) -> int:
        return self.base.size

    def cluster_values(self) -> np.ndarray:
        return np.array([self.eigenvalues[list(c)].mean() for c in self.clusters])

    def cluster_projectors(self) -> np.ndarray:
        """Stack of orthogonal projectors, one per eigenvalue cluster."""
        V = self.eigenvectors
        return np.stack([V[:, list(c)] @ V[:, list(c)].T for c in self.clusters])


def quantize_ct(P: MarkovChain, cluster_tolerance: float = DEFAULT_CLUSTER_TOL) -> CTWalk:
    """Continuous-time quantization: eigensolve H and group degenerate
    eigenvalues."""
    H = symmetrized_generator(P)
    lam, V = np.linalg.eigh(H)

    resid = np.abs(H @ V - V * lam[None, :]).max()
    if resid > EIGEN_RESIDUAL_TOL:
        raise ArithmeticError(f"eigensolve residual {resid} too large")
    ortho = np.abs(V.T @ V - np.eye(P.size)).max()
    if ortho > EIGEN_RESIDUAL_TOL:
        raise ArithmeticError(f"eigenvector basis not orthonormal: {ortho}")

    clusters: list[tuple[int, ...]] = []
    current = [0]
    for k in range(1, P.size):
        if lam[k] - lam[k - 1] <= cluster_tolerance:
            current.append(k)
        else:
            clusters.append(tuple(current))
            current = [k]
    clusters.append(tuple(current))
    for c in clusters:
        spread = lam[c[-1]] - lam[c[0]]
        if spread > cluster_tolerance:
            raise ValueError(
                f"cluster tolerance {cluster_tolerance} chains a spread of {spread}; "
                "pick a tolerance separating the true degeneracies"
            )
    lam = lam.copy()
    V = V.copy()
    lam.setflags(write=False)
    V.setflags(write=False)
    return CTWalk(P, lam, V, tuple(clusters), cluster_tolerance)


def ct_amplitude_row(W: CTWalk, x: int, t: float) -> np.ndarray:
    """Amplitudes <y| exp(-iHt) |x> for all y."""
    if not (0 <= x < W.size):
        raise ValueError(f"state {x} out of range [0, {W.size})")
    phases = np.exp(-1j * W.eigenvalues * t)
    amp = W.eigenvectors @ (phases * W.eigenvectors[x, :])
    norm = np.linalg.norm(amp)
    if abs(norm - 1.0) > UNITARITY_TOL:
        raise ArithmeticError(f"amplitude norm {norm} drifted from 1")
    return amp


def ct_propagator(W: CTWalk, t: float) -> np.ndarray:
    """Full unitary exp(-iHt)."""
    phases = np.exp(-1j * W.eigenvalues * t)
    return (W.eigenvectors * phases[None, :]) @ W.eigenvectors.T


@dataclass(frozen=True)
class DTWalk:
    """Discrete-time walk: unitary on base x register space of size
    base_size * register_dim, index (base, sub) -> base * register_dim + sub.

    embed_matrix[:, x] is the initial wavefunction for base state x;
    projecting a wavefunction sums |psi|^2 over the sub register.
    """

    walk_kind: str
    base_size: int
    register_dim: int
    unitary: np.ndarray
    embed_matrix: np.ndarray
    base_label: str = "custom"
    base_symmetric: bool = True

    def __post_init__(self):
        dim = self.base_size * self.register_dim
        U = self.unitary
        if U.shape != (dim, dim):
            raise ValueError(f"unitary shape {U.shape} != ({dim}, {dim})")
        gram = U.conj().T @ U
        err = np.abs(gram - np.eye(dim)).max()
        if err > UNITARITY_TOL:
            raise ValueError(f"walk operator not unitary: deviation {err}")
        norms = np.linalg.norm(self.embed_matrix, axis=0)
        if np.abs(norms - 1.0).max() > UNITARITY_TOL:
            raise ValueError("embedded states must have unit norm")

    @property
    def dim(self) -> int:
        return self.base_size * self.register_dim

    def embed(self, x: int) -> np.ndarray:
        return self.embed_matrix[:, x]

    def project(self, psi: np.ndarray) -> np.ndarray:
        """Position-register distribution of one wavefunction or of each
        column of a wavefunction matrix."""
        prob = np.abs(psi) ** 2
        if psi.ndim == 1:
            out = prob.reshape(self.base_size, self.register_dim).sum(axis=1)
        else:
            out = prob.reshape(self.base_size, self.register_dim, psi.shape[1]).sum(axis=1)
        return out


def quantize_szegedy(P: MarkovChain) -> DTWalk:
    """Discrete-time quantization (R S)^2 on the bipartite edge space.

    S swaps |x,y> -> |y,x>; R reflects each x-block around the column
    state |p_x> = sum_y sqrt(P[y,x]) |y>. embed(x) = |x>|p_x>.
    """
    n = P.size
    if n * n > state_cap():
        raise ValueError(f"walk space {n * n} exceeds the configured cap")
    if not P.is_irreducible:
        raise ValueError(f"chain {P.label!r} must be irreducible")
    sqrtP = np.sqrt(P.entries)
    dim = n * n
    R = np.zeros((dim, dim))
    for x in range(n):
        c = sqrtP[:, x]
        R[x * n : (x + 1) * n, x * n : (x + 1) * n] = 2.0 * np.outer(c, c) - np.eye(n)
    idx = np.arange(dim)
    perm = (idx % n) * n + idx // n  # S column j has its 1 at row perm[j]
    RS = R[:, perm]
    U = RS @ RS
    E = np.zeros((dim, n))
    for x in range(n):
        E[x * n : (x + 1) * n, x] = sqrtP[:, x]
    return DTWalk("szegedy", n, n, U, E, base_label=P.label, base_symmetric=P.is_symmetric)


def szegedy_stationary_state(P: MarkovChain) -> np.ndarray:
    """The fixed wavefunction sum_x sqrt(pi_x) |x>|p_x>."""
    pi = P.stationary
    sqrtP = np.sqrt(P.entries)
    n = P.size
    psi = np.zeros(n * n)
    for x in range(n):
        psi[x * n : (x + 1) * n] = np.sqrt(pi[x]) * sqrtP[:, x]
    return psi


def hadamard_cycle_walk(n: int) -> DTWalk:
    """Coined walk on Z_n with the 2x2 Hadamard coin and a moving shift:
    coin 0 steps to x-1, coin 1 steps to x+1.

    The initial coin (|0> + i|1>)/sqrt(2) makes the walk drift-free.
    """
    if n < 2:
        raise ValueError(f"cycle walk needs n >= 2, got {n}")
    if 2 * n > state_cap():
        raise ValueError(f"walk space {2 * n} exceeds the configured cap")
    dim = 2 * n
    H2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    C = np.kron(np.eye(n), H2)
    S = np.zeros((dim, dim))
    for x in range(n):
        S[((x - 1) % n) * 2 + 0, x * 2 + 0] = 1.0
        S[((x + 1) % n) * 2 + 1, x * 2 + 1] = 1.0
    U = S @ C
    E = np.zeros((dim, n), dtype=np.complex128)
    for x in range(n):
        E[x * 2 + 0, x] = 1.0 / np.sqrt(2.0)
        E[x * 2 + 1, x] = 1.0j / np.sqrt(2.0)
    return DTWalk("hadamard_cycle", n, 2, U, E, base_label=f"cycle({n})")


def grover_lattice_walk(n: int, d: int) -> DTWalk:
    """Coined walk on Z_n^d with the 2d-dimensional Grover diffusion
    coin and a flip-flop shift: moving along +-e_j flips the coin to the
    opposite direction. Initial coin is uniform.

    Coin index 2j+s points along coordinate j with sign (-1)^s.
    """
    G = lattice(n, d)
    N = G.n
    coin_dim = 2 * d
    dim = N * coin_dim
    if dim > state_cap():
        raise ValueError(f"walk space {dim} exceeds the configured cap")
    coin = np.full((coin_dim, coin_dim), 1.0 / d) - np.eye(coin_dim)
    C = np.kron(np.eye(N), coin)
    S = np.zeros((dim, dim))
    for v in range(N):
        for j in range(d):
            digit = (v // n**j) % n
            up = v + (((digit + 1) % n) - digit) * n**j
            down = v + (((digit - 1) % n) - digit) * n**j
            S[up * coin_dim + 2 * j + 1, v * coin_dim + 2 * j + 0] = 1.0
            S[down * coin_dim + 2 * j + 0, v * coin_dim + 2 * j + 1] = 1.0
    U = S @ C
    E = np.zeros((dim, N))
    for v in range(N):
        E[v * coin_dim : (v + 1) * coin_dim, v] = 1.0 / np.sqrt(coin_dim)
    return DTWalk(f"grover_lattice({n},{d})", N, coin_dim, U, E, base_label=G.kind_tag)


def coined_walk(kind: str, *params: int) -> DTWalk:
    """Dispatch: coined_walk("hadamard_cycle", n) or
    coined_walk("grover_lattice", n, d)."""
    if kind == "hadamard_cycle":
        if len(params) != 1:
            raise ValueError("hadamard_cycle takes one parameter (n)")
        return hadamard_cycle_walk(params[0])
    if kind == "grover_lattice":
        if len(params) != 2:
            raise ValueError("grover_lattice takes two parameters (n, d)")
        return grover_lattice_walk(params[0], params[1])
    raise ValueError(f"unknown coined walk kind {kind!r}")


def phase_gap(W) -> float:
    """Smallest nonzero eigenphase magnitude of a discrete walk unitary,
    or the smallest nonzero eigenvalue separation of a continuous walk
    (the frequency that controls its measured dynamics)."""
    if isinstance(W, CTWalk):
        values = np.asarray(W.cluster_values())
        if values.size > PHASE_GAP_MAX_DIM:
            raise ValueError(f"walk dimension {values.size} exceeds {PHASE_GAP_MAX_DIM}")
        diffs = np.abs(np.subtract.outer(values, values))
        nz = diffs > PHASE_TOL
        if not nz.any():
            raise DegenerateSpectrumError("degenerate spectrum: no nonzero eigenvalue gap")
        return float(diffs[nz].min())
    dim = W.unitary.shape[0]
    if dim > PHASE_GAP_MAX_DIM:
        raise ValueError(f"walk dimension {dim} exceeds {PHASE_GAP_MAX_DIM}")
    phases = np.angle(np.linalg.eigvals(W.unitary))
    nz = np.abs(phases) > PHASE_TOL
    if not nz.any():
        raise DegenerateSpectrumError("degenerate spectrum: no nonzero eigenphase")
    return float(np.abs(phases[nz]).min())
