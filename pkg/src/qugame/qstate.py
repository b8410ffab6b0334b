"""Qudit statevector core: registers, gates, tensor products, measurement.

Conventions used throughout the package:

* A register is an ordered list of subsystem dimensions, e.g. ``(2, 2, 3)``
  for two qubits and a qutrit.  The *leftmost* subsystem is the most
  significant digit, so the 5-qubit label ``10011`` addresses amplitude
  index 19.
* Gates are dense complex matrices certified unitary on construction.
* All values are immutable after construction; the only stateful object is
  the RandomSource consumed by ``measure``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .rng import RandomSource

# Size caps (module-level, adjustable): dense statevectors up to 20 qubits,
# dense operator constructors (walsh/qft/grover matrices) up to 2^11.
MAX_STATE_DIM = 1 << 20
MAX_OPERATOR_DIM = 1 << 11

# Construction-time checks run at 1e-8; equality assertions in tests use 1e-10.
NORM_TOL = 1e-10
UNITARY_TOL = 1e-8
ORTHO_TOL = 1e-8
PHASE_TOL = 1e-8


def _as_complex_vector(values) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.ndim != 1:
        raise DomainError(f"amplitudes must be one-dimensional, got shape {arr.shape}")
    return arr


def digits_to_index(dims: Sequence[int], digits: Sequence[int]) -> int:
    """Mixed-radix index of a digit string, leftmost digit most significant."""
    if len(digits) != len(dims):
        raise DomainError(f"expected {len(dims)} digits, got {len(digits)}")
    index = 0
    for d, digit in zip(dims, digits):
        digit = int(digit)
        if not 0 <= digit < d:
            raise DomainError(f"digit {digit} out of range for dimension {d}")
        index = index * d + digit
    return index


def index_to_digits(dims: Sequence[int], index: int) -> tuple[int, ...]:
    """Inverse of digits_to_index."""
    digits = []
    for d in reversed(dims):
        digits.append(index % d)
        index //= d
    return tuple(reversed(digits))


class StateVector:
    """Normalized complex amplitude vector over a list of subsystem dimensions."""

    __slots__ = ("dims", "amps")

    def __init__(self, dims: Sequence[int], amps, *, normalized: bool = True):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 2 for d in dims):
            raise DomainError(f"every subsystem dimension must be >= 2, got {dims}")
        total = math.prod(dims)
        if total > MAX_STATE_DIM:
            raise ResourceError(f"state dimension {total} exceeds cap {MAX_STATE_DIM}")
        arr = _as_complex_vector(amps)
        if arr.size != total:
            raise DomainError(f"expected {total} amplitudes for dims {dims}, got {arr.size}")
        if normalized:
            norm = np.linalg.norm(arr)
            if abs(norm - 1.0) > 1e-6:
                raise DomainError(f"state is not normalized (norm {norm})")
            if abs(norm - 1.0) > NORM_TOL:
                arr = arr / norm
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", arr)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("StateVector is immutable")

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def digits_of(self, index: int) -> tuple[int, ...]:
        return index_to_digits(self.dims, index)

    def label_of(self, index: int) -> str:
        return "|" + "".join(str(d) for d in self.digits_of(index)) + ">"

    def __repr__(self) -> str:
        return f"StateVector(dims={self.dims}, dim={self.dim})"

    def to_json_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "amps": [[float(a.real), float(a.imag)] for a in self.amps],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "StateVector":
        amps = [complex(re, im) for re, im in data["amps"]]
        return cls(tuple(data["dims"]), amps)


class UnitaryMatrix:
    """Dense complex square matrix with a unitarity certificate (U+U = 1)."""

    __slots__ = ("dim", "entries")

    def __init__(self, entries, *, check: bool = True):
        arr = np.asarray(entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DomainError(f"matrix must be square, got shape {arr.shape}")
        if check:
            deviation = np.abs(arr.conj().T @ arr - np.eye(arr.shape[0])).max()
            if deviation > UNITARY_TOL:
                raise DomainError(f"matrix is not unitary (max deviation {deviation:.3e})")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "dim", arr.shape[0])
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("UnitaryMatrix is immutable")

    def dagger(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.entries.conj().T, check=False)

    def __matmul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        if self.dim != other.dim:
            raise DomainError("dimension mismatch in matrix product")
        return UnitaryMatrix(self.entries @ other.entries, check=False)

    def __repr__(self) -> str:
        return f"UnitaryMatrix(dim={self.dim})"


@dataclass(frozen=True)
class MeasurementRecord:
    """One projective measurement outcome.

    ``probability`` is the Born weight of the selected basis vector;
    ``post_state`` is the collapsed register (the basis vector itself when
    the full register was measured).
    """

    outcome_index: int
    outcome_label: str
    probability: float
    post_state: StateVector


# ---------------------------------------------------------------------------
# construction


def basis_state(dims: Sequence[int], digits: Sequence[int] | str | int) -> StateVector:
    """Computational basis state |digits> over the given dimension list."""
    dims = tuple(int(d) for d in dims)
    if isinstance(digits, str):
        digits = [int(c) for c in digits]
    elif isinstance(digits, int):
        digits = index_to_digits(dims, digits)
    index = digits_to_index(dims, digits)
    amps = np.zeros(math.prod(dims), dtype=complex)
    amps[index] = 1.0
    return StateVector(dims, amps)


def tensor(a, b):
    """Kronecker product of two states or two unitaries; dims concatenate."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(a.dims + b.dims, np.kron(a.amps, b.amps))
    if isinstance(a, UnitaryMatrix) and isinstance(b, UnitaryMatrix):
        return UnitaryMatrix(np.kron(a.entries, b.entries), check=False)
    raise DomainError("tensor requires two StateVectors or two UnitaryMatrices")


# ---------------------------------------------------------------------------
# gates

_SQ2 = 1.0 / math.sqrt(2.0)


def identity(dim: int = 2) -> UnitaryMatrix:
    return UnitaryMatrix(np.eye(dim, dtype=complex), check=False)


def pauli_x() -> UnitaryMatrix:
    return UnitaryMatrix([[0, 1], [1, 0]], check=False)


def pauli_y() -> UnitaryMatrix:
    return UnitaryMatrix([[0, -1j], [1j, 0]], check=False)


def pauli_z() -> UnitaryMatrix:
    return UnitaryMatrix([[1, 0], [0, -1]], check=False)


def hadamard() -> UnitaryMatrix:
    return UnitaryMatrix([[_SQ2, _SQ2], [_SQ2, -_SQ2]], check=False)


def cnot() -> UnitaryMatrix:
    """Controlled NOT on two qubits; left (most significant) qubit controls."""
    m = np.eye(4, dtype=complex)
    m[[2, 3]] = m[[3, 2]]
    return UnitaryMatrix(m, check=False)


def phase_gate(r: float) -> UnitaryMatrix:
    """diag(1, e^{i pi r}): identity at r=0, pauli_z at r=1."""
    return UnitaryMatrix([[1, 0], [0, np.exp(1j * math.pi * r)]], check=False)


def quarter_phase() -> UnitaryMatrix:
    """diag(1, i); applying it twice to |1> gives -|1>."""
    return UnitaryMatrix([[1, 0], [0, 1j]], check=False)


def controlled_add(dim: int = 3) -> UnitaryMatrix:
    """Two-qudit gate |c,t> -> |c, (t+c) mod dim>; left qudit controls."""
    size = dim * dim
    m = np.zeros((size, size), dtype=complex)
    for c in range(dim):
        for t in range(dim):
            m[c * dim + (t + c) % dim, c * dim + t] = 1.0
    return UnitaryMatrix(m, check=False)


_GATE_BUILDERS = {
    "identity": identity,
    "pauli_x": pauli_x,
    "pauli_y": pauli_y,
    "pauli_z": pauli_z,
    "hadamard": hadamard,
    "cnot": cnot,
    "phase": phase_gate,
    "quarter_phase": quarter_phase,
}

# short aliases accepted by the CLI and move-set parsers
_GATE_ALIASES = {
    "i": "identity",
    "1": "identity",
    "x": "pauli_x",
    "y": "pauli_y",
    "z": "pauli_z",
    "h": "hadamard",
}


def standard_gate(name: str, param: float | int | None = None) -> UnitaryMatrix:
    """Named gate lookup: identity(d), pauli_x/y/z, hadamard, cnot, phase(r), quarter_phase."""
    key = name.strip().lower()
    key = _GATE_ALIASES.get(key, key)
    builder = _GATE_BUILDERS.get(key)
    if builder is None:
        raise DomainError(f"unknown gate {name!r}")
    if key in ("identity", "phase"):
        if param is None:
            param = 2 if key == "identity" else 0.0
        return builder(param)
    if param is not None:
        raise DomainError(f"gate {name!r} takes no parameter")
    return builder()


def walsh(n: int) -> UnitaryMatrix:
    """Walsh-Hadamard transform on n qubits, H tensored n times.

    Entry (x, y) is (-1)^(x.y) / sqrt(2^n) with x.y the bitwise dot product;
    the transform is its own inverse.
    """
    if n < 1:
        raise DomainError("walsh requires n >= 1")
    dim = 1 << n
    if dim > MAX_OPERATOR_DIM:
        raise ResourceError(f"walsh dimension {dim} exceeds operator cap {MAX_OPERATOR_DIM}")
    h = hadamard().entries
    m = np.array([[1.0]], dtype=complex)
    for _ in range(n):
        m = np.kron(m, h)
    return UnitaryMatrix(m, check=False)


def qft(n: int, inverse: bool = False) -> UnitaryMatrix:
    """Quantum Fourier transform on n qubits: entry (x,y) = e^{+-2 pi i xy/2^n}/sqrt(2^n)."""
    if n < 1:
        raise DomainError("qft requires n >= 1")
    dim = 1 << n
    if dim > MAX_OPERATOR_DIM:
        raise ResourceError(f"qft dimension {dim} exceeds operator cap {MAX_OPERATOR_DIM}")
    sign = -1.0 if inverse else 1.0
    exponent = np.outer(np.arange(dim), np.arange(dim))
    m = np.exp(sign * 2j * math.pi * exponent / dim) / math.sqrt(dim)
    return UnitaryMatrix(m, check=False)


# ---------------------------------------------------------------------------
# operations


def _resolve_targets(state: StateVector, targets: Sequence[int] | None) -> tuple[int, ...]:
    if targets is None:
        return tuple(range(len(state.dims)))
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise DomainError(f"targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < len(state.dims):
            raise DomainError(f"target {t} out of range for {len(state.dims)} subsystems")
    return targets


def apply(state: StateVector, u: UnitaryMatrix, targets: Sequence[int] | None = None) -> StateVector:
    """Apply u on the addressed subsystems, identity elsewhere. Norm-preserving."""
    targets = _resolve_targets(state, targets)
    target_dim = math.prod(state.dims[t] for t in targets)
    if u.dim != target_dim:
        raise DomainError(
            f"operator dimension {u.dim} does not match target dimensions {target_dim}"
        )
    n = len(state.dims)
    psi = state.amps.reshape(state.dims)
    rest = [i for i in range(n) if i not in targets]
    perm = list(targets) + rest
    psi = np.transpose(psi, perm).reshape(target_dim, -1)
    psi = u.entries @ psi
    shuffled_dims = [state.dims[i] for i in perm]
    psi = psi.reshape(shuffled_dims)
    inv = np.argsort(perm)
    psi = np.transpose(psi, inv).reshape(-1)
    return StateVector(state.dims, psi)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b> with the conjugate on the first argument."""
    if a.dims != b.dims:
        raise DomainError(f"dims mismatch: {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amps, b.amps))


def equal_up_to_phase(a: StateVector, b: StateVector, tol: float = PHASE_TOL) -> bool:
    """True when a and b differ only by a unit-modulus scalar."""
    if a.dims != b.dims:
        return False
    return abs(abs(inner(a, b)) - 1.0) <= tol


def _check_orthonormal(basis: Sequence[StateVector], dims: tuple[int, ...]) -> None:
    k = len(basis)
    vectors = np.array([bv.amps for bv in basis])
    gram = vectors.conj() @ vectors.T
    if np.abs(gram - np.eye(k)).max() > ORTHO_TOL:
        raise DomainError("measurement basis is not orthonormal")
    if k != vectors.shape[1]:
        raise DomainError(
            f"basis with {k} vectors does not span the measured subsystems (dim {vectors.shape[1]})"
        )


def measure(
    state: StateVector,
    basis: Sequence[StateVector] | None = None,
    targets: Sequence[int] | None = None,
    rng: RandomSource | None = None,
    force: int | None = None,
) -> MeasurementRecord:
    """Projective measurement of the addressed subsystems.

    ``basis`` defaults to the computational basis of the targets and must be
    orthonormal and complete otherwise.  Outcome k is sampled with the Born
    probability; pass ``force`` to select a branch deterministically (the
    recorded probability is still the true branch weight).
    """
    targets = _resolve_targets(state, targets)
    target_dims = tuple(state.dims[t] for t in targets)
    target_dim = math.prod(target_dims)

    n = len(state.dims)
    rest = [i for i in range(n) if i not in targets]
    perm = list(targets) + rest
    mat = np.transpose(state.amps.reshape(state.dims), perm).reshape(target_dim, -1)

    if basis is None:
        residuals = mat  # rows are already <k|psi>
        labels = None
    else:
        for bv in basis:
            if bv.dims != target_dims:
                raise DomainError(
                    f"basis vector dims {bv.dims} do not match measured subsystems {target_dims}"
                )
        _check_orthonormal(basis, target_dims)
        bmat = np.array([bv.amps for bv in basis])
        residuals = bmat.conj() @ mat
        labels = [f"basis[{k}]" for k in range(len(basis))]

    probs = np.sum(np.abs(residuals) ** 2, axis=1)
    total = probs.sum()
    if abs(total - 1.0) > 1e-6:
        raise DomainError(f"measurement probabilities sum to {total}, state not normalized")

    if force is not None:
        outcome = int(force)
        if not 0 <= outcome < len(probs):
            raise DomainError(f"forced outcome {outcome} out of range")
        if probs[outcome] <= 1e-30:
            raise DomainError(f"forced outcome {outcome} has zero probability")
    else:
        if rng is None:
            rng = RandomSource()
        outcome = rng.choice(probs)

    probability = float(probs[outcome])

    if basis is None:
        outcome_vec = np.zeros(target_dim, dtype=complex)
        outcome_vec[outcome] = 1.0
        label = "|" + "".join(
            str(d) for d in index_to_digits(target_dims, outcome)
        ) + ">"
    else:
        outcome_vec = basis[outcome].amps
        label = labels[outcome]

    if not rest:
        # full-register measurement collapses exactly onto the basis vector
        post = StateVector(target_dims, outcome_vec)
    else:
        residual = residuals[outcome] / math.sqrt(probability)
        joint = np.outer(outcome_vec, residual)
        shuffled_dims = [state.dims[i] for i in perm]
        joint = joint.reshape(shuffled_dims)
        inv = np.argsort(perm)
        post = StateVector(state.dims, np.transpose(joint, inv).reshape(-1))

    return MeasurementRecord(
        outcome_index=outcome,
        outcome_label=label,
        probability=probability,
        post_state=post,
    )


def branch_residual(
    state: StateVector, basis_vector: StateVector, targets: Sequence[int]
) -> tuple[float, StateVector | None]:
    """Weight and normalized residual of projecting `targets` onto one basis vector.

    Returns (probability, residual-state-of-the-remaining-subsystems); the
    residual is None when the branch has zero weight.
    """
    targets = _resolve_targets(state, targets)
    target_dims = tuple(state.dims[t] for t in targets)
    if basis_vector.dims != target_dims:
        raise DomainError(
            f"basis vector dims {basis_vector.dims} do not match measured subsystems {target_dims}"
        )
    n = len(state.dims)
    rest = [i for i in range(n) if i not in targets]
    if not rest:
        raise DomainError("branch_residual requires at least one unmeasured subsystem")
    perm = list(targets) + rest
    mat = np.transpose(state.amps.reshape(state.dims), perm).reshape(basis_vector.dim, -1)
    residual = basis_vector.amps.conj() @ mat
    probability = float(np.sum(np.abs(residual) ** 2))
    if probability <= 1e-30:
        return 0.0, None
    rest_dims = tuple(state.dims[i] for i in rest)
    return probability, StateVector(rest_dims, residual / math.sqrt(probability))


def bell_basis(n: int) -> list[StateVector]:
    """Maximally entangled basis states.

    n == 2 returns the four Bell states b0..b3; n > 2 returns the two
    N-qubit analogues (|0..0> +- |1..1>)/sqrt(2).
    """
    if n < 2:
        raise DomainError("bell_basis requires n >= 2")
    dims = (2,) * n
    dim = 1 << n
    if n == 2:
        vecs = []
        for plus, flipped in (
            (True, False),   # b0 = (|00> + |11>)/sqrt2
            (True, True),    # b1 = (|01> + |10>)/sqrt2
            (False, False),  # b2 = (|00> - |11>)/sqrt2
            (False, True),   # b3 = (|01> - |10>)/sqrt2
        ):
            amps = np.zeros(4, dtype=complex)
            i, j = (1, 2) if flipped else (0, 3)
            amps[i] = _SQ2
            amps[j] = _SQ2 if plus else -_SQ2
            vecs.append(StateVector(dims, amps))
        return vecs
    top = np.zeros(dim, dtype=complex)
    bottom = np.zeros(dim, dtype=complex)
    top[0] = top[-1] = _SQ2
    bottom[0], bottom[-1] = _SQ2, -_SQ2
    return [StateVector(dims, top), StateVector(dims, bottom)]
