"""Mixed-state machinery: density matrices, Bloch picture, estimation, cloning.

The positivity certificate tolerates eigenvalues down to -1e-9 to absorb
float drift accumulated by partial traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .qstate import StateVector

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9


class DensityMatrix:
    """Hermitian, positive-semidefinite, trace-1 operator."""

    __slots__ = ("dim", "entries")

    def __init__(self, entries, *, check: bool = True):
        arr = np.asarray(entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DomainError(f"density matrix must be square, got shape {arr.shape}")
        if check:
            if np.abs(arr - arr.conj().T).max() > HERMITIAN_TOL:
                raise DomainError("density matrix is not Hermitian")
            tr = arr.trace()
            if abs(tr - 1.0) > 1e-8:
                raise DomainError(f"density matrix has trace {tr}, expected 1")
            eigenvalues = np.linalg.eigvalsh(arr)
            if eigenvalues.min() < EIGENVALUE_FLOOR:
                raise DomainError(
                    f"density matrix has negative eigenvalue {eigenvalues.min():.3e}"
                )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "dim", arr.shape[0])
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityMatrix":
        return cls(np.outer(psi.amps, psi.amps.conj()), check=False)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim, check=False)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def to_json_dict(self) -> dict:
        flat = self.entries.reshape(-1)
        return {
            "dim": self.dim,
            "entries": [[float(z.real), float(z.imag)] for z in flat],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DensityMatrix":
        dim = int(data["dim"])
        flat = np.array([complex(re, im) for re, im in data["entries"]])
        return cls(flat.reshape(dim, dim))

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True)
class BlochVector:
    """Real 3-vector r with |r| <= 1; pure states sit on the sphere."""

    r_x: float
    r_y: float
    r_z: float

    def __post_init__(self):
        if self.norm() > 1.0 + 1e-9:
            raise DomainError(f"Bloch vector has length {self.norm()} > 1")

    def norm(self) -> float:
        return math.sqrt(self.r_x**2 + self.r_y**2 + self.r_z**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.r_x, self.r_y, self.r_z])


def rho_from_ensemble(states: Sequence[StateVector], probs: Sequence[float]) -> DensityMatrix:
    """Probability-weighted sum of the pure-state projectors."""
    p = np.asarray(probs, dtype=float)
    if len(states) != len(p):
        raise DomainError("one probability per state required")
    if p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-10:
        raise DomainError(f"invalid ensemble probabilities {p.tolist()}")
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise DomainError("ensemble states must share a dimension")
    rho = np.zeros((dim, dim), dtype=complex)
    for weight, s in zip(p, states):
        rho += weight * np.outer(s.amps, s.amps.conj())
    return DensityMatrix(rho)


def measure_prob(rho: DensityMatrix, phi: StateVector) -> float:
    """Born probability <phi|rho|phi> of observing phi."""
    if phi.dim != rho.dim:
        raise DomainError(f"state dimension {phi.dim} does not match rho dim {rho.dim}")
    value = np.vdot(phi.amps, rho.entries @ phi.amps)
    return float(value.real)


def expectation(rho: DensityMatrix, observable) -> float:
    """trace(A rho) for a Hermitian observable A."""
    a = np.asarray(observable, dtype=complex)
    if a.shape != (rho.dim, rho.dim):
        raise DomainError(f"observable shape {a.shape} does not match dim {rho.dim}")
    if np.abs(a - a.conj().T).max() > HERMITIAN_TOL:
        raise DomainError("observable is not Hermitian")
    return float((a @ rho.entries).trace().real)


_PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def to_bloch(rho: DensityMatrix) -> BlochVector:
    """Bloch components r_i = trace(rho sigma_i) of a qubit state."""
    if rho.dim != 2:
        raise DomainError("Bloch representation requires a 2-dimensional state")
    r = [float((sigma @ rho.entries).trace().real) for sigma in _PAULIS]
    return BlochVector(*r)


def from_bloch(r: BlochVector) -> DensityMatrix:
    """rho = (1 + r . sigma) / 2."""
    m = np.eye(2, dtype=complex)
    for component, sigma in zip(r.as_array(), _PAULIS):
        m = m + component * sigma
    return DensityMatrix(m / 2.0)


def partial_trace(rho: DensityMatrix, dims: Sequence[int], keep: Sequence[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in `keep`."""
    dims = tuple(int(d) for d in dims)
    if math.prod(dims) != rho.dim:
        raise DomainError(f"dims {dims} do not factor dimension {rho.dim}")
    keep = sorted(set(int(k) for k in keep))
    if any(not 0 <= k < len(dims) for k in keep):
        raise DomainError(f"keep indices {keep} out of range")
    n = len(dims)
    tensor = rho.entries.reshape(dims + dims)
    traced = tensor
    removed = 0
    for sub in range(n):
        if sub in keep:
            continue
        axis = sub - removed
        traced = np.trace(traced, axis1=axis, axis2=axis + n - removed)
        removed += 1
    kept_dim = math.prod(dims[k] for k in keep)
    return DensityMatrix(traced.reshape(kept_dim, kept_dim))


@dataclass(frozen=True)
class MLEstimate:
    """Maximum-likelihood read-out of z-axis Bernoulli counts."""

    p_hat: float          # estimated probability of outcome |1>
    r_z: float            # Bloch z component maximizing the likelihood
    rho: DensityMatrix    # statistical density matrix diag(n_a/n, n_b/n)


def mle_bernoulli(n_a: int, n_b: int) -> MLEstimate:
    """Estimate a qubit's z-axis statistics from |0>/|1> counts.

    p_hat = n_b / n maximizes the Bernoulli likelihood; r_z = (n_a - n_b)/n
    maximizes the Bloch-form likelihood [ (1+r)/2 ]^(n_a/n) [ (1-r)/2 ]^(n_b/n).
    """
    if n_a < 0 or n_b < 0:
        raise DomainError("counts must be non-negative")
    n = n_a + n_b
    if n < 1:
        raise DomainError("need at least one observation")
    p_hat = n_b / n
    r_z = (n_a - n_b) / n
    rho = DensityMatrix(np.diag([n_a / n, n_b / n]).astype(complex), check=False)
    return MLEstimate(p_hat=float(p_hat), r_z=float(r_z), rho=rho)


def bloch_likelihood(r_z: float, n_a: int, n_b: int) -> float:
    """Likelihood of z-spin counts under rho = (1 + r_z sigma_z)/2 (frequency exponents)."""
    n = n_a + n_b
    up = 0.5 * (1.0 + r_z)
    down = 0.5 * (1.0 - r_z)
    # 0^0 = 1 keeps the boundary r_z = +-1 well-defined
    lik = 1.0
    if n_a:
        lik *= up ** (n_a / n)
    if n_b:
        lik *= down ** (n_b / n)
    return lik


class DiscriminationProblem:
    """Bayesian state-discrimination setup: priors, costs and a channel matrix.

    ``channel[m, k]`` is the probability of hypothesis a_m given that state k
    was sent; each column must sum to 1 (completeness).
    """

    __slots__ = ("priors", "costs", "channel", "states")

    def __init__(self, priors, costs, channel, states: Sequence[DensityMatrix] | None = None):
        priors = np.asarray(priors, dtype=float).copy()
        costs = np.asarray(costs, dtype=float).copy()
        channel = np.asarray(channel, dtype=float).copy()
        n = len(priors)
        if priors.min() < -1e-12 or abs(priors.sum() - 1.0) > 1e-10:
            raise DomainError(f"priors must form a distribution, got {priors.tolist()}")
        if costs.shape != (n, n) or channel.shape != (n, n):
            raise DomainError("cost and channel matrices must be N x N")
        if channel.min() < -1e-12:
            raise DomainError("channel probabilities must be non-negative")
        col_sums = channel.sum(axis=0)
        if np.abs(col_sums - 1.0).max() > 1e-10:
            raise DomainError(f"channel columns must sum to 1, got {col_sums.tolist()}")
        if states is not None and len(states) != n:
            raise DomainError("one candidate state per prior required")
        for arr in (priors, costs, channel):
            arr.setflags(write=False)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "channel", channel)
        object.__setattr__(self, "states", tuple(states) if states is not None else None)

    def __setattr__(self, name, value):
        raise AttributeError("DiscriminationProblem is immutable")

    @property
    def n(self) -> int:
        return len(self.priors)


def discrimination_cost(problem: DiscriminationProblem) -> tuple[float, float]:
    """Average Bayesian cost c_B and total error probability p_E.

    c_B = sum_mk eta_k c_mk h(a_m | rho_k);  p_E = 1 - sum_k eta_k h(a_k | rho_k).
    With zero diagonal and constant off-diagonal cost c these satisfy c_B = c p_E.
    """
    eta = problem.priors
    c_b = float(np.sum(problem.costs * problem.channel * eta[np.newaxis, :]))
    p_e = float(1.0 - np.sum(eta * np.diag(problem.channel)))
    return c_b, p_e


def fidelity(rho: DensityMatrix, psi: StateVector) -> float:
    """Overlap <psi|rho|psi> of a mixed state with a pure reference."""
    return measure_prob(rho, psi)


@dataclass(frozen=True)
class CloneResult:
    clone: DensityMatrix          # single-clone reduced state (both clones equal)
    pair: DensityMatrix           # joint two-clone state after tracing the ancilla
    fidelity: float               # <psi|clone|psi>
    eta: float                    # Bloch-vector shrink factor


# Images of |0>|blank>|ancilla> and |1>|blank>|ancilla> under the symmetric
# 1 -> 2 cloning transformation; ancilla states A -> |0>, A_perp -> |1>.
_CLONE_ZERO = np.zeros(8, dtype=complex)
_CLONE_ZERO[0b001] = math.sqrt(2.0 / 3.0)
_CLONE_ZERO[0b010] = math.sqrt(1.0 / 6.0)
_CLONE_ZERO[0b100] = math.sqrt(1.0 / 6.0)
_CLONE_ONE = np.zeros(8, dtype=complex)
_CLONE_ONE[0b110] = math.sqrt(2.0 / 3.0)
_CLONE_ONE[0b011] = math.sqrt(1.0 / 6.0)
_CLONE_ONE[0b101] = math.sqrt(1.0 / 6.0)


def uqcm_clone(psi: StateVector) -> CloneResult:
    """Universal 1 -> 2 qubit cloner.

    Applies the basis transformation linearly to psi tensor |blank, ancilla>,
    traces out the ancilla and then each clone.  Fidelity is 5/6 and the
    Bloch vector shrinks by 2/3 for every input state.
    """
    if psi.dims != (2,):
        raise DomainError("uqcm_clone expects a single qubit")
    a, b = psi.amps
    out = a * _CLONE_ZERO + b * _CLONE_ONE
    full = DensityMatrix(np.outer(out, out.conj()), check=False)
    pair = partial_trace(full, (2, 2, 2), keep=(0, 1))
    clone_first = partial_trace(pair, (2, 2), keep=(0,))
    clone_second = partial_trace(pair, (2, 2), keep=(1,))
    if np.abs(clone_first.entries - clone_second.entries).max() > 1e-10:
        raise DomainError("cloner symmetry violated")
    fid = fidelity(clone_first, psi)
    r_in = to_bloch(DensityMatrix.from_state(psi)).as_array()
    r_out = to_bloch(clone_first).as_array()
    eta = float(r_out @ r_in)  # |r_in| = 1 for pure inputs
    return CloneResult(clone=clone_first, pair=pair, fidelity=float(fid), eta=eta)
