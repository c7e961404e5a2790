"""Two-copy entanglement-swapping measurement of the R matrix.

Alice overlaps qubits a1 and a2 (one from each copy) on a beam splitter;
anti-coalescence projects them onto the singlet.  Bob projects b1 and b2
onto the eigenbasis of ``sigma_i (x) sigma_j``.  Six settings ``i >= j``
give every independent entry of ``R = T^T T``.

Two Alice configurations are simulated: ``on`` (interference, POVM element
``r/2 I + (1 - r)|Psi-><Psi-|``) and ``off`` (distinguishable photons,
element ``I/2``).  The off run supplies Bob's marginal outcome
probabilities, the on run the singlet-conditioned ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateCalibration, InsufficientData, InvalidArgument
from .states import I2, I4, PAULI_STACK, SINGLET, tensor_and_permute

MODES = ("on", "off")
PROJECTOR_ORDER = "(+,+),(+,-),(-,+),(-,-)"
# eigenvalue of sigma_i (x) sigma_j on each projector, in PROJECTOR_ORDER
EIGENVALUES = np.array([1.0, -1.0, -1.0, 1.0])
# (a1, b1, a2, b2) -> (a1, a2, b1, b2)
ALICE_BOB_ORDER = (0, 2, 1, 3)


class MeasurementSetting(NamedTuple):
    i: int
    j: int

    def validate(self) -> "MeasurementSetting":
        if self not in SETTINGS:
            raise InvalidArgument(f"measurement setting must satisfy 1 <= j <= i <= 3, got {tuple(self)}")
        return self


SETTINGS = tuple(MeasurementSetting(i, j) for i in (1, 2, 3) for j in range(1, i + 1))


def singlet_projector() -> np.ndarray:
    return np.outer(SINGLET, SINGLET.conj())


def singlet_witness_operator() -> np.ndarray:
    """S = I - 4|Psi-><Psi-| acting on Alice's two qubits."""
    return I4 - 4 * singlet_projector()


def _single_projectors(k: int):
    s = PAULI_STACK[k - 1]
    return (I2 + s) / 2, (I2 - s) / 2


def bob_projectors(s: MeasurementSetting) -> np.ndarray:
    """Four rank-1 projectors of ``sigma_i (x) sigma_j`` in PROJECTOR_ORDER, shape (4, 4, 4)."""
    i, j = MeasurementSetting(*s).validate()
    pi, pj = _single_projectors(i), _single_projectors(j)
    return np.array([np.kron(pi[u], pj[v]) for u in (0, 1) for v in (0, 1)])


def _two_copy_expectation(rho1, rho2, alice_op, bob_op) -> float:
    big = tensor_and_permute(rho1, rho2, ALICE_BOB_ORDER)
    return float(np.real(np.trace(big @ np.kron(alice_op, bob_op))))


def collective_R_exact(rho1, rho2, s: MeasurementSetting) -> float:
    """Tr[(rho1 (x) rho2) S_{a1 a2} (x) (sigma_i (x) sigma_j)_{b1 b2}]."""
    i, j = MeasurementSetting(*s).validate()
    bob = np.kron(PAULI_STACK[i - 1], PAULI_STACK[j - 1])
    return _two_copy_expectation(rho1, rho2, singlet_witness_operator(), bob)


@dataclass(frozen=True)
class AlicePovm:
    r: float
    mode: str = "on"

    def __post_init__(self):
        if not (0.0 <= self.r <= 1.0):
            raise InvalidArgument(f"non-overlap fraction r must lie in [0, 1], got {self.r!r}")
        if self.mode not in MODES:
            raise InvalidArgument(f"mode must be one of {MODES}, got {self.mode!r}")

    def element(self) -> np.ndarray:
        """POVM element for a coincidence click on Alice's two detectors."""
        if self.mode == "off":
            return I4 / 2
        return self.r / 2 * I4 + (1 - self.r) * singlet_projector()


def joint_outcome_distribution(rho, s: MeasurementSetting, povm: AlicePovm) -> np.ndarray:
    """Probabilities ``q[alice, b]`` with ``alice = 0`` a click and ``1`` no click.

    The returned (2, 4) array sums to one.
    """
    rho = np.asarray(rho, dtype=complex)
    big = tensor_and_permute(rho, rho, ALICE_BOB_ORDER)
    A = povm.element()
    q = np.empty((2, 4))
    for b, proj in enumerate(bob_projectors(s)):
        click = np.real(np.trace(big @ np.kron(A, proj)))
        marginal = np.real(np.trace(big @ np.kron(I4, proj)))
        q[0, b] = click
        q[1, b] = marginal - click
    return np.clip(q, 0.0, None)


@dataclass(frozen=True)
class CoincidenceTable:
    """Click counts per (setting, mode, Bob outcome).

    ``counts[k, m, b]`` refers to ``SETTINGS[k]``, ``MODES[m]`` and the Bob
    projector ``b`` in PROJECTOR_ORDER; ``shots[k, m]`` is the number of
    trials in that run.  Trials in which Alice saw no coincidence are
    ``shots - counts.sum(-1)``.
    """

    counts: np.ndarray
    shots: np.ndarray
    r: float
    seed: int | None = None

    def __post_init__(self):
        counts = np.asarray(self.counts)
        shots = np.asarray(self.shots)
        if counts.shape != (len(SETTINGS), 2, 4) or shots.shape != (len(SETTINGS), 2):
            raise InvalidArgument("coincidence table must hold 6 settings x 2 modes x 4 outcomes")
        if np.any(counts < 0):
            raise InvalidArgument("coincidence counts must be nonnegative")
        if np.any(counts.sum(axis=-1) > shots):
            raise InvalidArgument("click counts exceed the number of trials")


def simulate_counts(rho, r: float, shots: int, seed: int | np.random.SeedSequence) -> CoincidenceTable:
    """Multinomial sample of every (setting, mode) run with ``shots`` trials each.

    Each of the 12 runs draws from its own child of ``SeedSequence(seed)``,
    so the table does not depend on the order the runs are evaluated in.
    """
    if isinstance(shots, bool) or int(shots) != shots or shots < 1:
        raise InvalidArgument(f"shots must be a positive integer, got {shots!r}")
    shots = int(shots)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(len(SETTINGS) * len(MODES))
    counts = np.zeros((len(SETTINGS), 2, 4), dtype=np.int64)
    for k, s in enumerate(SETTINGS):
        for m, mode in enumerate(MODES):
            q = joint_outcome_distribution(rho, s, AlicePovm(r, mode))
            pvals = np.append(q[0], q[1].sum())
            pvals /= pvals.sum()
            rng = np.random.default_rng(children[2 * k + m])
            counts[k, m] = rng.multinomial(shots, pvals)[:4]
    shots_arr = np.full((len(SETTINGS), 2), shots, dtype=np.int64)
    return CoincidenceTable(counts, shots_arr, float(r), None if isinstance(seed, np.random.SeedSequence) else seed)


@dataclass(frozen=True)
class MeasuredR:
    """Estimated R with elementwise standard errors (both symmetric 3x3)."""

    R: np.ndarray
    dR: np.ndarray

    def __post_init__(self):
        if np.asarray(self.R).shape != (3, 3) or np.asarray(self.dR).shape != (3, 3):
            raise InvalidArgument("R and dR must be 3x3")
        if np.any(np.asarray(self.dR) <= 0):
            raise InvalidArgument("standard errors dR must be positive")


def _coefficients(r: float):
    """Linear weights of click frequencies in the R estimator, per outcome."""
    c_off = 2 * EIGENVALUES * (1 + r) / (1 - r)
    c_on = -4 * EIGENVALUES / (1 - r)
    return c_on, c_off


def _check_r(r: float) -> float:
    if r == 1:
        raise DegenerateCalibration("r = 1: no photon pairs interfere, the singlet projection is lost")
    if not (0.0 <= r < 1.0):
        raise InvalidArgument(f"non-overlap fraction r must lie in [0, 1), got {r!r}")
    return float(r)


def estimate_from_frequencies(f_on, f_off, r: float) -> np.ndarray:
    """R entries from click frequencies, ``f_on``/``f_off`` of shape (6, 4).

    Per setting: P(b) = 2 f_off(b), P(Psi-, b) = (f_on(b) - r/2 P(b)) / (1 - r),
    R_ij = sum_b lambda_b (P(b) - 4 P(Psi-, b)).
    """
    r = _check_r(r)
    f_on = np.asarray(f_on, dtype=float)
    f_off = np.asarray(f_off, dtype=float)
    p_b = 2 * f_off
    p_psi = (f_on - r / 2 * p_b) / (1 - r)
    values = (EIGENVALUES * (p_b - 4 * p_psi)).sum(axis=-1)
    return _mirror(values)


def _mirror(values) -> np.ndarray:
    R = np.zeros((3, 3))
    for (i, j), v in zip(SETTINGS, values):
        R[i - 1, j - 1] = R[j - 1, i - 1] = v
    return R


def _linear_variance(coef, freq, n):
    # no-click category has weight 0; clamp empty cells to 1/(3n)
    n = np.asarray(n, dtype=float)[..., None]
    f = np.where(freq > 0, freq, 1.0 / (3 * n))
    mean = (coef * f).sum(axis=-1)
    return ((coef**2 * f).sum(axis=-1) - mean**2) / n[..., 0]


def estimate_R(table: CoincidenceTable, r: float) -> MeasuredR:
    r = _check_r(r)
    shots = np.asarray(table.shots, dtype=float)
    if np.any(shots <= 0):
        raise InsufficientData("every (setting, mode) run needs at least one trial")
    freq = np.asarray(table.counts, dtype=float) / shots[..., None]
    f_on, f_off = freq[:, 0], freq[:, 1]
    R = estimate_from_frequencies(f_on, f_off, r)
    c_on, c_off = _coefficients(r)
    var = _linear_variance(c_on, f_on, shots[:, 0]) + _linear_variance(c_off, f_off, shots[:, 1])
    dR = _mirror(np.sqrt(np.maximum(var, 0.0)))
    return MeasuredR(R, dR)


def exact_frequencies(rho, r: float):
    """Infinite-shot click probabilities (f_on, f_off), each of shape (6, 4)."""
    f_on = np.array([joint_outcome_distribution(rho, s, AlicePovm(r, "on"))[0] for s in SETTINGS])
    f_off = np.array([joint_outcome_distribution(rho, s, AlicePovm(r, "off"))[0] for s in SETTINGS])
    return f_on, f_off
