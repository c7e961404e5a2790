"""Two-qubit density matrices: construction, Bloch decomposition, sampling.

All states live in the computational polarization basis ordered
``|HH>, |HV>, |VH>, |VV>`` (row-major).  Functions that only reshape or
contract indices accept stacks of matrices with arbitrary leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, NotAState

BASIS = ("HH", "HV", "VH", "VV")

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

# single-photon polarization kets, |H> = (1, 0)
KET_H = np.array([1.0, 0.0], dtype=complex)
KET_V = np.array([0.0, 1.0], dtype=complex)
KET_D = (KET_H + KET_V) / np.sqrt(2)
KET_A = (KET_H - KET_V) / np.sqrt(2)
KET_L = (KET_H + 1j * KET_V) / np.sqrt(2)
KET_R = (KET_H - 1j * KET_V) / np.sqrt(2)

SINGLET = (np.kron(KET_H, KET_V) - np.kron(KET_V, KET_H)) / np.sqrt(2)


def _proj(ket):
    return np.outer(ket, ket.conj())


_PAULI = (
    _proj(KET_D) - _proj(KET_A),
    _proj(KET_L) - _proj(KET_R),
    _proj(KET_H) - _proj(KET_V),
)
for _s in _PAULI:
    _s.flags.writeable = False

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)


def pauli(i: int) -> np.ndarray:
    """Return the polarization Pauli operator with index ``i`` in {1, 2, 3}.

    sigma_1 = |D><D| - |A><A|, sigma_2 = |L><L| - |R><R|,
    sigma_3 = |H><H| - |V><V|, with |L> = (|H> + i|V>)/sqrt(2).
    """
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or i not in (1, 2, 3):
        raise InvalidArgument(f"Pauli index must be 1, 2 or 3, got {i!r}")
    return _PAULI[i - 1].copy()


# sigma_i (x) sigma_j for i, j in 1..3, shape (3, 3, 4, 4)
PAULI_PAIRS = np.array([[np.kron(a, b) for b in _PAULI] for a in _PAULI])
PAULI_STACK = np.array(_PAULI)


@dataclass(frozen=True)
class BlochDecomposition:
    """Local Bloch vectors ``x``, ``y`` and correlation matrix ``T``."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray


def check_state(rho, name: str = "rho") -> np.ndarray:
    """Validate a single 4x4 density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidArgument(f"{name} must be 4x4, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITIAN_TOL:
        raise NotAState(f"{name} is not Hermitian (deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1) > TRACE_TOL:
        raise NotAState(f"{name} does not have unit trace (trace {tr:.15g})")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -PSD_TOL:
        raise NotAState(f"{name} is not positive semidefinite (eigenvalue {lo:.6g})", eigenvalue=lo)
    return rho


def bloch_decompose(rho) -> BlochDecomposition:
    rho = np.asarray(rho, dtype=complex)
    # Tr[rho A] = sum_ab rho_ab A_ba
    T = np.einsum("...ab,ijba->...ij", rho, PAULI_PAIRS)
    r4 = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    rho_a = np.einsum("...ijkj->...ik", r4)
    rho_b = np.einsum("...jijk->...ik", r4)
    x = np.einsum("...ab,iba->...i", rho_a, PAULI_STACK)
    y = np.einsum("...ab,iba->...i", rho_b, PAULI_STACK)
    return BlochDecomposition(x.real.copy(), y.real.copy(), T.real.copy())


def correlation_matrix(rho) -> np.ndarray:
    """T_ij = Tr[rho (sigma_i (x) sigma_j)]; works on stacks."""
    rho = np.asarray(rho, dtype=complex)
    return np.einsum("...ab,ijba->...ij", rho, PAULI_PAIRS).real


def bloch_compose(d: BlochDecomposition) -> np.ndarray:
    x = np.asarray(d.x, dtype=float)
    y = np.asarray(d.y, dtype=float)
    T = np.asarray(d.T, dtype=float)
    if x.shape != (3,) or y.shape != (3,) or T.shape != (3, 3):
        raise InvalidArgument("Bloch vectors must have length 3 and T must be 3x3")
    rho = np.kron(I2, I2).astype(complex)
    rho += np.kron(np.tensordot(x, PAULI_STACK, axes=1), I2)
    rho += np.kron(I2, np.tensordot(y, PAULI_STACK, axes=1))
    rho += np.tensordot(T, PAULI_PAIRS, axes=2)
    rho /= 4
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -PSD_TOL:
        raise NotAState(f"composed matrix is not positive semidefinite (eigenvalue {lo:.6g})", eigenvalue=lo)
    return rho


def _subsystem(which: str) -> str:
    if which not in ("a", "b"):
        raise InvalidArgument(f"subsystem must be 'a' or 'b', got {which!r}")
    return which


def partial_trace(rho, which: str = "a") -> np.ndarray:
    """Reduced state of the *kept* subsystem ``which``."""
    which = _subsystem(which)
    r4 = np.asarray(rho, dtype=complex)
    r4 = r4.reshape(r4.shape[:-2] + (2, 2, 2, 2))
    if which == "a":
        return np.einsum("...ijkj->...ik", r4)
    return np.einsum("...jijk->...ik", r4)


def partial_transpose(rho, which: str = "b") -> np.ndarray:
    """Transpose the tensor factor ``which``; works on stacks."""
    which = _subsystem(which)
    rho = np.asarray(rho, dtype=complex)
    lead = rho.shape[:-2]
    r4 = rho.reshape(lead + (2, 2, 2, 2))
    n = len(lead)
    axes = list(range(n))
    if which == "b":
        axes += [n, n + 3, n + 2, n + 1]
    else:
        axes += [n + 2, n + 1, n, n + 3]
    return r4.transpose(axes).reshape(lead + (4, 4))


def purity(rho) -> np.ndarray | float:
    rho = np.asarray(rho)
    # Tr rho^2 = sum |rho_ij|^2 for Hermitian rho
    return np.sum(np.abs(rho) ** 2, axis=(-2, -1))


# --- reference families -----------------------------------------------------

FAMILIES = ("werner", "horodecki", "pure")


@dataclass(frozen=True)
class StateFamily:
    kind: str
    p: float

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise InvalidArgument(f"unknown state family {self.kind!r}; expected one of {FAMILIES}")
        if not (0.0 <= self.p <= 1.0):
            raise InvalidArgument(f"mixing parameter p must lie in [0, 1], got {self.p!r}")


def werner(p: float) -> np.ndarray:
    return make_family(StateFamily("werner", p))


def horodecki(p: float) -> np.ndarray:
    return make_family(StateFamily("horodecki", p))


def pure(p: float) -> np.ndarray:
    return make_family(StateFamily("pure", p))


def make_family(f: StateFamily) -> np.ndarray:
    p = float(f.p)
    singlet = _proj(SINGLET)
    if f.kind == "werner":
        return (1 - p) / 4 * I4 + p * singlet
    if f.kind == "horodecki":
        hh = np.zeros(4, dtype=complex)
        hh[0] = 1
        return p * _proj(hh) + (1 - p) * singlet
    psi = np.zeros(4, dtype=complex)
    psi[0] = np.sqrt(p)
    psi[3] = np.sqrt(1 - p)
    return _proj(psi)


# --- random states ----------------------------------------------------------

MEASURES = ("haar", "hilbert-schmidt", "induced")


@dataclass(frozen=True)
class RandomStateMeasure:
    """Distribution over two-qubit states.

    ``hilbert-schmidt`` is the induced measure with a 4-dimensional
    ancilla; ``induced`` uses ``ancilla_dim`` columns in the Ginibre factor.
    """

    kind: str = "hilbert-schmidt"
    ancilla_dim: int | None = None

    def __post_init__(self):
        if self.kind not in MEASURES:
            raise InvalidArgument(f"unknown measure {self.kind!r}; expected one of {MEASURES}")
        if self.kind == "induced":
            if self.ancilla_dim is None or int(self.ancilla_dim) < 1:
                raise InvalidArgument("induced measure needs an ancilla dimension K >= 1")

    @property
    def columns(self) -> int:
        if self.kind == "haar":
            return 1
        if self.kind == "hilbert-schmidt":
            return 4
        return int(self.ancilla_dim)

    @classmethod
    def parse(cls, text: str) -> "RandomStateMeasure":
        """Parse ``haar``, ``hilbert-schmidt`` or ``induced:K=<int>``."""
        text = text.strip().lower()
        if text.startswith("induced"):
            _, _, rest = text.partition(":")
            key, _, value = rest.partition("=")
            if key.strip().lower() != "k" or not value.strip().isdigit():
                raise InvalidArgument(f"induced measure must be written induced:K=<int>, got {text!r}")
            return cls("induced", int(value))
        return cls(text)

    def __str__(self):
        return f"induced:K={self.ancilla_dim}" if self.kind == "induced" else self.kind


HILBERT_SCHMIDT = RandomStateMeasure("hilbert-schmidt")
HAAR_PURE = RandomStateMeasure("haar")


def _ginibre_state(g: np.ndarray) -> np.ndarray:
    rho = g @ g.conj().swapaxes(-1, -2)
    tr = np.trace(rho, axis1=-2, axis2=-1).real
    return rho / tr[..., None, None]


def random_state(rng: np.random.Generator, measure: RandomStateMeasure = HILBERT_SCHMIDT) -> np.ndarray:
    """Draw one density matrix as G G^dagger / Tr(G G^dagger) with G of shape 4 x K."""
    k = measure.columns
    g = rng.standard_normal((4, k)) + 1j * rng.standard_normal((4, k))
    rho = _ginibre_state(g)
    return (rho + rho.conj().T) / 2


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def tensor_and_permute(rho1, rho2, perm: Sequence[int]) -> np.ndarray:
    """Kronecker product of two two-qubit operators with qubit slots reordered.

    The input slots are ordered (a1, b1, a2, b2); slot ``k`` is moved to
    position ``perm[k]`` of the 16x16 output.
    """
    perm = [int(p) for p in perm]
    if sorted(perm) != [0, 1, 2, 3]:
        raise InvalidArgument(f"perm must be a permutation of (0, 1, 2, 3), got {perm}")
    big = np.kron(np.asarray(rho1, dtype=complex), np.asarray(rho2, dtype=complex))
    t = big.reshape((2,) * 8)
    inv = [0] * 4
    for k, p in enumerate(perm):
        inv[p] = k
    axes = inv + [4 + k for k in inv]
    return t.transpose(axes).reshape(16, 16)
