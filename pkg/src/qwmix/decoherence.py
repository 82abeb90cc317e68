"""Random-time measurement of a quantum walk and the classical chains
it generates.

A measurement rule is a distribution over the measurement time t. The
generated chain entry is P_hat[y, x] = E_t |<y| U^t |x>|^2 (position
register only for discrete walks). Continuous-time chains are evaluated
in closed form through the rule's characteristic function; discrete
walks by explicit, possibly truncated, time sums.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .chains import MarkovChain, NoMix, _threshold_time, save_csv
from .config import DEFAULT_TAIL_TOL, default_horizon
from .walks import CTWalk, DTWalk, RuleFamilyError

CT_FAMILIES = ("delta", "uniform_ct", "exponential")
DT_FAMILIES = ("delta", "uniform_dt", "geometric")
GENERATED_TOL = 1e-9
SMOOTH_FAMILIES = ("uniform_ct", "exponential", "uniform_dt", "geometric")


@dataclass(frozen=True)
class MeasurementRule:
    """Distribution of the measurement time with horizon parameter T.

    Families: delta (measure exactly at T), uniform_ct (uniform on
    [0, T]), exponential (mean T), uniform_dt (uniform on integers
    0..T-1), geometric (success rate 1/T on integers 0, 1, 2, ...).
    """

    family: str
    T: float
    tail_tolerance: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if self.family not in set(CT_FAMILIES) | set(DT_FAMILIES):
            raise ValueError(f"unknown rule family {self.family!r}")
        if self.family == "uniform_dt":
            if self.T < 1 or abs(self.T - round(self.T)) > 1e-9:
                raise ValueError(f"uniform_dt needs integer T >= 1, got {self.T}")
        elif self.family == "geometric":
            if self.T < 1.0:
                raise ValueError(f"geometric needs T >= 1, got {self.T}")
        elif self.T < 0.0:
            raise ValueError(f"T must be nonnegative, got {self.T}")
        if not (0.0 < self.tail_tolerance < 1.0):
            raise ValueError(f"tail_tolerance must lie in (0,1), got {self.tail_tolerance}")


def delta_rule(T: float) -> MeasurementRule:
    return MeasurementRule("delta", float(T))


def uniform_ct_rule(T: float) -> MeasurementRule:
    return MeasurementRule("uniform_ct", float(T))


def exponential_rule(T: float) -> MeasurementRule:
    return MeasurementRule("exponential", float(T))


def uniform_dt_rule(T: int) -> MeasurementRule:
    return MeasurementRule("uniform_dt", float(T))


def geometric_rule(T: float, tail_tolerance: float = DEFAULT_TAIL_TOL) -> MeasurementRule:
    return MeasurementRule("geometric", float(T), tail_tolerance)


def characteristic_function(rule: MeasurementRule, theta):
    """E[exp(i * theta * t)] under the rule, vectorized over theta.

    Exactly 1 at theta = 0 for every family.
    """
    th = np.asarray(theta, dtype=np.float64)
    T = rule.T
    if rule.family == "delta":
        out = np.exp(1j * th * T)
    elif rule.family == "uniform_ct":
        z = th * T
        small = np.abs(z) < 1e-8
        zsafe = np.where(small, 1.0, z)
        out = np.where(
            small,
            1.0 + 0.5j * z - z * z / 6.0,
            (np.exp(1j * zsafe) - 1.0) / (1j * zsafe),
        )
    elif rule.family == "exponential":
        out = 1.0 / (1.0 - 1j * th * T)
    elif rule.family == "uniform_dt":
        # integer support, so wrap the angle; Dirichlet-kernel form of
        # (1/T) * (1 - e^{i theta T}) / (1 - e^{i theta})
        Ti = int(round(T))
        phi = np.mod(th + np.pi, 2.0 * np.pi) - np.pi
        small = np.abs(phi) < 1e-12
        psafe = np.where(small, 1.0, phi)
        out = np.where(
            small,
            1.0 + 0.0j,
            np.exp(0.5j * psafe * (Ti - 1)) * np.sin(0.5 * Ti * psafe) / (Ti * np.sin(0.5 * psafe)),
        )
    elif rule.family == "geometric":
        p = 1.0 / T
        out = p / (1.0 - (1.0 - p) * np.exp(1j * th))
    else:  # pragma: no cover - guarded by the constructor
        raise ValueError(f"unknown rule family {rule.family!r}")
    out = np.where(th == 0.0, 1.0 + 0.0j, out)
    return out if out.ndim else complex(out)


def rule_weights(rule: MeasurementRule) -> tuple[np.ndarray, np.ndarray, float]:
    """(times, weights, truncation_error) for a discrete-time rule.

    Geometric support is truncated at ceil(T * ln(1/tail_tolerance)) and
    the kept weights renormalized; the entrywise error bound 2 * dropped
    mass is returned.
    """
    if rule.family == "delta":
        if abs(rule.T - round(rule.T)) > 1e-9:
            raise RuleFamilyError(f"discrete delta rule needs integer T, got {rule.T}")
        return np.array([int(round(rule.T))]), np.array([1.0]), 0.0
    if rule.family == "uniform_dt":
        Ti = int(round(rule.T))
        return np.arange(Ti), np.full(Ti, 1.0 / Ti), 0.0
    if rule.family == "geometric":
        p = 1.0 / rule.T
        t_max = int(math.ceil(rule.T * math.log(1.0 / rule.tail_tolerance)))
        t = np.arange(t_max + 1)
        w = p * (1.0 - p) ** t
        captured = float(w.sum())
        dropped = max(0.0, 1.0 - captured)
        return t, w / captured, 2.0 * dropped
    raise RuleFamilyError(f"{rule.family!r} has no discrete support")


@dataclass(frozen=True)
class GeneratedChain:
    """Classical chain produced by measuring a walk at a random time."""

    chain: MarkovChain
    walk_kind: str
    base_label: str
    rule: MeasurementRule
    truncation_error: float

    @property
    def size(self) -> int:
        return self.chain.size


def _check_generated(M: np.ndarray, symmetric_base: bool, trunc: float, what: str) -> np.ndarray:
    tol = GENERATED_TOL + trunc
    if M.min() < -tol:
        raise ArithmeticError(f"{what}: negative entry {M.min()}")
    M = np.clip(M, 0.0, None)
    col_err = np.abs(M.sum(axis=0) - 1.0).max()
    if col_err > tol:
        raise ArithmeticError(f"{what}: column sums off by {col_err}")
    if symmetric_base:
        sym_err = np.abs(M - M.T).max()
        if sym_err > tol:
            raise ArithmeticError(f"{what}: asymmetry {sym_err} with symmetric base")
        M = 0.5 * (M + M.T)
        row_err = np.abs(M.sum(axis=1) - 1.0).max()
        if row_err > tol:
            raise ArithmeticError(f"{what}: row sums off by {row_err}")
    # tiny float drift: renormalize columns so MarkovChain validation is exact
    M = M / M.sum(axis=0, keepdims=True)
    if symmetric_base:
        M = 0.5 * (M + M.T)
    return M


def _generated_ct(walk: CTWalk, rule: MeasurementRule) -> GeneratedChain:
    projs = walk.cluster_projectors()
    values = walk.cluster_values()
    theta = np.subtract.outer(values, values)
    chi = np.real(characteristic_function(rule, theta))
    acc = np.zeros((walk.size, walk.size))
    for c in range(len(values)):
        weighted = np.tensordot(chi[c], projs, axes=1)
        acc += projs[c] * weighted
    M = _check_generated(acc, walk.base.is_symmetric, 0.0, "ct generated chain")
    label = f"generated({walk.base.label},{rule.family},T={rule.T:g})"
    return GeneratedChain(MarkovChain(M, label), "ct", walk.base.label, rule, 0.0)


def _generated_dt(walk: DTWalk, rule: MeasurementRule) -> GeneratedChain:
    times, weights, trunc = rule_weights(rule)
    acc = np.zeros((walk.base_size, walk.base_size))
    psi = walk.embed_matrix.copy()
    t_prev = 0
    order = np.argsort(times)
    for i in order:
        t = int(times[i])
        for _ in range(t - t_prev):
            psi = walk.unitary @ psi
        t_prev = t
        acc += weights[i] * walk.project(psi)
    M = _check_generated(acc, walk.base_symmetric, trunc, "dt generated chain")
    label = f"generated({walk.base_label},{rule.family},T={rule.T:g})"
    return GeneratedChain(MarkovChain(M, label), walk.walk_kind, walk.base_label, rule, trunc)


def generated_chain(walk: CTWalk | DTWalk, rule: MeasurementRule) -> GeneratedChain:
    """Evaluate P_hat[y, x] = E_t |<y| U^t |x>|^2 for a (walk, rule) pair."""
    if isinstance(walk, CTWalk):
        if rule.family not in CT_FAMILIES:
            raise RuleFamilyError(
                f"rule family {rule.family!r} pairs with discrete walks, not continuous time"
            )
        return _generated_ct(walk, rule)
    if isinstance(walk, DTWalk):
        if rule.family not in DT_FAMILIES:
            raise RuleFamilyError(
                f"rule family {rule.family!r} pairs with continuous walks, not discrete time"
            )
        return _generated_dt(walk, rule)
    raise TypeError(f"expected CTWalk or DTWalk, got {type(walk).__name__}")


def limit_chain(walk: CTWalk) -> MarkovChain:
    """Long-time limit of smooth-rule generated chains: the sum of the
    entrywise squares of the eigenvalue-cluster projectors."""
    projs = walk.cluster_projectors()
    Pi = np.einsum("cyx,cyx->yx", projs, projs)
    M = _check_generated(Pi, walk.base.is_symmetric, 0.0, "limit chain")
    return MarkovChain(M, f"limit({walk.base.label})")


def repeated_mixing_time(G: GeneratedChain, horizon: int | None = None) -> int | NoMix:
    """Smallest number of measure-and-restart rounds after which the
    composed chain is within 1/(2e) of uniform in worst-column TV."""
    n = G.size
    if horizon is None:
        horizon = default_horizon(n)
    base_sym = np.abs(G.chain.entries - G.chain.entries.T).max() <= 1e-9 + G.truncation_error
    if not base_sym:
        raise ValueError("repeated mixing targets uniform; needs a symmetric generated chain")
    u = np.full(n, 1.0 / n)
    return _threshold_time(G.chain.entries, u, horizon)


def export_generated(G: GeneratedChain, csv_path: str) -> tuple[str, str]:
    """Write the chain CSV plus a JSON sidecar describing its origin."""
    save_csv(G.chain, csv_path)
    sidecar = {
        "walk_kind": G.walk_kind,
        "base_label": G.base_label,
        "rule_family": G.rule.family,
        "T": G.rule.T,
        "truncation_error": G.truncation_error,
    }
    side_path = csv_path + ".json"
    tmp = side_path + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")
    os.replace(tmp, side_path)
    return csv_path, side_path
