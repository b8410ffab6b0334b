"""Oracle-based quantum algorithms at desk scale.

Grover search is simulated with the exact rotation geometry (the oracle and
diffusion operators are reflections, their product a rotation by 2*theta with
sin(theta) = 1/sqrt(N)).  Order finding keeps the full left register of
2n qubits but represents the right register symbolically as the integer
m^x mod N, collapsing it before the Fourier transform; the collapse commutes
with the left-register QFT, so the sampled distribution is identical to the
deferred-measurement version (tested).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from . import qstate
from .errors import DomainError, ResourceError
from .qstate import StateVector, UnitaryMatrix
from .rng import RandomSource


def _nearest_int(x: float) -> int:
    """Nearest integer, ties rounding half away from zero."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


# ---------------------------------------------------------------------------
# Grover


@dataclass(frozen=True)
class GroverRun:
    """Trajectory and bookkeeping of one Grover search."""

    n: int
    target: int
    k: int
    theta: float
    trajectory: tuple[StateVector, ...]
    success_probability: float


def grover_iterations(N: int) -> int:
    """Optimal rotation count: nearest integer to pi/(4 theta) - 1/2.

    Uses the exact theta = asin(1/sqrt(N)) up to N = 2^20 and the large-N
    approximation pi*sqrt(N)/4 - 1/2 beyond.  Ties round half away from zero.
    """
    if N < 2:
        raise DomainError("search space must have at least 2 elements")
    if N <= 1 << 20:
        theta = math.asin(1.0 / math.sqrt(N))
        x = math.pi / (4.0 * theta) - 0.5
    else:
        x = math.pi * math.sqrt(N) / 4.0 - 0.5
    return max(0, _nearest_int(x))


def grover_operators(n: int, a: int) -> tuple[UnitaryMatrix, UnitaryMatrix]:
    """Dense (oracle, diffusion) pair for an n-qubit search marking a.

    oracle = 1 - 2|a><a| flips the sign of the marked state; diffusion is
    -W (1 - 2|0><0|) W = 2|s><s| - 1, the inversion about the mean.
    """
    dim = 1 << n
    if dim > qstate.MAX_OPERATOR_DIM:
        raise ResourceError(f"operator dimension {dim} exceeds cap {qstate.MAX_OPERATOR_DIM}")
    if not 0 <= a < dim:
        raise DomainError(f"target {a} out of range for {n} qubits")
    oracle = np.eye(dim, dtype=complex)
    oracle[a, a] = -1.0
    w = qstate.walsh(n).entries
    zero_reflect = np.eye(dim, dtype=complex)
    zero_reflect[0, 0] = -1.0
    diffusion = -(w @ zero_reflect @ w)
    return UnitaryMatrix(oracle, check=False), UnitaryMatrix(diffusion, check=False)


def grover_search(n: int, a: int, k: int | None = None) -> GroverRun:
    """Run Grover search for target a on n qubits, recording each rotation.

    Starts from the uniform superposition walsh(n)|0..0>; applies the
    diffusion*oracle rotation k times (k from grover_iterations by default).
    The phase-kickback ancilla is dropped: once the oracle acts as the phase
    flip 1 - 2|a><a| on the search register, the (|0> - |1>) qubit never
    changes and carries no information.
    """
    N = 1 << n
    if N > qstate.MAX_STATE_DIM:
        raise ResourceError(f"state dimension {N} exceeds cap {qstate.MAX_STATE_DIM}")
    if not 0 <= a < N:
        raise DomainError(f"target {a} out of range for {n} qubits")
    if k is None:
        k = grover_iterations(N)
    theta = math.asin(1.0 / math.sqrt(N))
    dims = (2,) * n
    amps = np.full(N, 1.0 / math.sqrt(N), dtype=complex)
    trajectory = [StateVector(dims, amps)]
    for _ in range(k):
        amps = amps.copy()
        amps[a] = -amps[a]                     # reflection about a-perp
        amps = 2.0 * amps.mean() - amps        # inversion about the mean
        trajectory.append(StateVector(dims, amps))
    success = float(abs(amps[a]) ** 2)
    return GroverRun(
        n=n,
        target=a,
        k=k,
        theta=theta,
        trajectory=tuple(trajectory),
        success_probability=success,
    )


# ---------------------------------------------------------------------------
# Bernstein-Vazirani


def _parity_phases(n: int, a: int) -> np.ndarray:
    x = np.arange(1 << n)
    masked = x & a
    parity = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        parity ^= (masked >> bit) & 1
    return 1.0 - 2.0 * parity  # (-1)^(x.a)


def bernstein_vazirani(n: int, a: int, oracle=None) -> int:
    """Recover the hidden string a with a single oracle application.

    The oracle phases each basis state by (-1)^(x.a); the result is exactly
    the Walsh transform of |a>, so one more Walsh transform yields |a>
    deterministically.  A custom ``oracle`` (amps -> amps) may be injected;
    it is invoked exactly once.
    """
    N = 1 << n
    if not 0 <= a < N:
        raise DomainError(f"hidden string {a} out of range for {n} qubits")
    if oracle is None:
        phases = _parity_phases(n, a)

        def oracle(amps):
            return amps * phases

    state = np.full(N, 1.0 / math.sqrt(N), dtype=complex)
    state = oracle(state)
    sv = StateVector((2,) * n, state)
    h = qstate.hadamard()
    for q in range(n):
        sv = qstate.apply(sv, h, [q])
    return int(np.argmax(np.abs(sv.amps)))


# ---------------------------------------------------------------------------
# continued fractions and order finding


def continued_fraction_best(w: int, Q: int, bound: int) -> tuple[int, int]:
    """Convergent of w/Q with the largest denominator below `bound`.

    Returns (numerator, denominator) in lowest terms; (0, 1) for w = 0.
    """
    if not 0 <= w < Q:
        raise DomainError(f"need 0 <= w < Q, got w={w}, Q={Q}")
    if bound < 1:
        raise DomainError("denominator bound must be >= 1")
    if w == 0:
        return (0, 1)
    a, b = w, Q
    num, num_prev = 1, 0   # p_{-1}, p_{-2}
    den, den_prev = 0, 1   # q_{-1}, q_{-2}
    best = (0, 1)
    while b:
        q = a // b
        a, b = b, a - q * b
        num, num_prev = q * num + num_prev, num
        den, den_prev = q * den + den_prev, den
        if den >= bound:
            break
        best = (num, den)
    return best


@dataclass(frozen=True)
class PeriodSample:
    """One order-finding shot: the observed Fourier peak and its rational read-out."""

    modulus: int
    base: int
    observed_w: int
    register_width: int          # 2n, the left-register qubit count
    candidate_num: int           # d'
    candidate_den: int           # r', the period candidate
    collapsed_value: int         # m^x mod N seen in the right register


def _register_width(N: int) -> int:
    """Smallest even 2n with 2^(2n-2) < N^2 < 2^(2n)."""
    return 2 * math.ceil(math.log2(N))


def multiplicative_order(m: int, N: int) -> int:
    if gcd(m, N) != 1:
        raise DomainError(f"{m} is not a unit modulo {N}")
    r, v = 1, m % N
    while v != 1:
        v = v * m % N
        r += 1
    return r


@lru_cache(maxsize=64)
def _order_find_distributions(N: int, m: int):
    """Collapse and Fourier-peak distributions for the (N, m) order problem.

    Returns (Q, 2n, r, x0_probs, {comb_length: w_probs}).  After the right
    register collapses onto m^(x0) mod N, the surviving left-register comb is
    x0, x0+r, ... with M = comb length; the QFT output probability is the
    squared geometric sum |sum_j e^(2 pi i j r w / Q)|^2 / (M Q), independent
    of x0 except through M.
    """
    two_n = _register_width(N)
    Q = 1 << two_n
    r = multiplicative_order(m, N)
    lengths = np.array([(Q - 1 - x0) // r + 1 for x0 in range(r)])
    x0_probs = lengths / Q
    w = np.arange(Q)
    w_dists = {}
    for M in np.unique(lengths):
        M = int(M)
        half_angle = math.pi * r * w / Q
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.sin(M * half_angle) / np.sin(half_angle)
        ratio = np.where(np.abs(np.sin(half_angle)) < 1e-12, float(M), ratio)
        probs = ratio**2 / (M * Q)
        probs = probs / probs.sum()
        probs.setflags(write=False)
        w_dists[M] = probs
    x0_probs.setflags(write=False)
    return Q, two_n, r, x0_probs, w_dists


def order_find(N: int, m: int, rng: RandomSource) -> PeriodSample:
    """Sample one run of the quantum period-finding subroutine for m mod N.

    The right register is never expanded into amplitudes: it is collapsed to
    a concrete value Z = m^(x0) mod N first, which filters the left register
    down to the comb {x : m^x = Z}, and the QFT peak w is then sampled from
    the exact comb spectrum.  The continued-fraction candidate (d', r') with
    denominator below N is attached.
    """
    if N < 3:
        raise DomainError("modulus must be >= 3")
    if gcd(m, N) != 1:
        raise DomainError(
            f"gcd({m}, {N}) > 1: the classical exit should have been taken"
        )
    Q, two_n, r, x0_probs, w_dists = _order_find_distributions(N, m)
    x0 = rng.choice(x0_probs)
    M = (Q - 1 - x0) // r + 1
    w = rng.choice(w_dists[M])
    d, rr = continued_fraction_best(int(w), Q, N)
    return PeriodSample(
        modulus=N,
        base=m,
        observed_w=int(w),
        register_width=two_n,
        candidate_num=d,
        candidate_den=rr,
        collapsed_value=pow(m, x0, N),
    )


# ---------------------------------------------------------------------------
# factor extraction


@dataclass(frozen=True)
class FactorOutcome:
    """Result of turning an order candidate into factors; reason set on failure."""

    factors: tuple[int, int] | None
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.factors is not None


def factor_from_order(N: int, m: int, r: int) -> FactorOutcome:
    """Extract factors of N from a candidate order r of m.

    Requires m^r = 1 mod N and even r; computes gcd(N, m^(r/2) +- 1) and,
    when m^(r/2) = 1, keeps halving the exponent while it stays even.
    """
    if r < 1:
        raise DomainError("order candidate must be >= 1")
    if pow(m, r, N) != 1:
        return FactorOutcome(None, "bad-order")
    if r % 2 == 1:
        return FactorOutcome(None, "odd-order")
    e = r
    while e % 2 == 0:
        y = pow(m, e // 2, N)
        for g in (gcd(N, y - 1), gcd(N, y + 1)):
            if 1 < g < N:
                return FactorOutcome(tuple(sorted((g, N // g))))
        if y == 1:
            e //= 2
        else:
            break  # y = -1 mod N: both gcds trivial, halving cannot continue
    return FactorOutcome(None, "trivial-roots")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_power_root(n: int):
    """Smallest p with n = p^k (k >= 2), or None."""
    for k in range(2, n.bit_length() + 1):
        root = round(n ** (1.0 / k))
        for candidate in (root - 1, root, root + 1):
            if candidate >= 2 and candidate**k == n:
                return candidate
    return None


@dataclass(frozen=True)
class ShorResult:
    factors: tuple[int, int] | None
    rounds: int
    transcript: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.factors is not None


def shor_factor(N: int, rng: RandomSource, max_rounds: int = 25) -> ShorResult:
    """Shor's factoring loop: random bases, order finding, gcd extraction.

    Even N, prime powers and lucky gcd draws take the classical exits.  Each
    base is retried O(log log N) times before a new one is drawn; a round is
    one order-finding invocation.
    """
    if N < 4 or _is_prime(N):
        raise DomainError(f"{N} is not composite")
    if N % 2 == 0:
        return ShorResult((2, N // 2), 0, ({"event": "classical-exit", "detail": "even"},))
    root = _prime_power_root(N)
    if root is not None:
        return ShorResult(
            tuple(sorted((root, N // root))),
            0,
            ({"event": "classical-exit", "detail": f"prime power of {root}"},),
        )

    per_base = max(2, _nearest_int(math.log2(math.log2(N))))
    transcript: list[dict] = []
    rounds = 0
    while rounds < max_rounds:
        m = rng.integer(2, N - 2)
        g = gcd(m, N)
        if g > 1:
            transcript.append({"event": "gcd-shortcut", "m": m, "factor": g})
            return ShorResult(tuple(sorted((g, N // g))), rounds, tuple(transcript))
        for _ in range(per_base):
            if rounds >= max_rounds:
                break
            rounds += 1
            sample = order_find(N, m, rng)
            outcome = factor_from_order(N, m, sample.candidate_den)
            transcript.append(
                {
                    "event": "order-sample",
                    "m": m,
                    "w": sample.observed_w,
                    "candidate": [sample.candidate_num, sample.candidate_den],
                    "result": list(outcome.factors) if outcome.ok else outcome.reason,
                }
            )
            if outcome.ok:
                return ShorResult(outcome.factors, rounds, tuple(transcript))
    return ShorResult(None, rounds, tuple(transcript))


@dataclass(frozen=True)
class RSAResult:
    p: int
    q: int
    phi: int
    d: int
    plaintext: int
    rounds: int


def rsa_demo(N: int, e: int, ciphertext: int, rng: RandomSource, max_rounds: int = 25) -> RSAResult:
    """Break a toy RSA triplet (N, e, c): factor N, invert e mod phi, decrypt."""
    shor = shor_factor(N, rng, max_rounds=max_rounds)
    if not shor.ok:
        raise DomainError(f"factoring {N} exhausted {max_rounds} rounds")
    p, q = shor.factors
    phi = (p - 1) * (q - 1)
    if gcd(e, phi) != 1:
        raise DomainError(f"public exponent {e} is not invertible mod phi={phi}")
    d = pow(e, -1, phi)
    plaintext = pow(ciphertext, d, N)
    return RSAResult(p=p, q=q, phi=phi, d=d, plaintext=plaintext, rounds=shor.rounds)
