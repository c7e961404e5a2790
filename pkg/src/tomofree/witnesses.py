"""Bell-nonlocality and entanglement witnesses of two-qubit states.

Everything that depends only on the correlation matrix ``R = T^T T``
(``bell_M``, ``chsh_max``, ``fef_F``) can be evaluated without knowing the
state, which is what the two-copy measurement delivers.  The remaining
quantities need the full density matrix.  Array inputs with extra leading
axes are evaluated element-wise.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import OptimizerDiagnostic
from .states import correlation_matrix, partial_trace, partial_transpose, purity

log = logging.getLogger(__name__)

RECORD_KEYS = ("M", "B", "chsh_max", "F", "E", "N", "C", "r1", "r2", "r3")

# sigma_2 (x) sigma_2, real in the |HH>,|HV>,|VH>,|VV> basis
_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)
_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
# eigenvalues below this multiple of the largest one are round-off from the
# eigensolver and are set to zero before square roots are taken
EIG_ZERO = 8 * np.finfo(float).eps


def _clean_sqrt(w) -> np.ndarray:
    """Square roots of eigenvalues ``w`` (last axis) with round-off zeros removed."""
    scale = np.maximum(np.abs(w).max(axis=-1, keepdims=True), 1.0)
    return np.sqrt(np.where(w > EIG_ZERO * scale, w, 0.0))


def r_matrix(T) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    R = np.swapaxes(T, -1, -2) @ T
    return (R + np.swapaxes(R, -1, -2)) / 2


def r_eigs(R) -> np.ndarray:
    """Eigenvalues of R sorted in decreasing order."""
    return np.linalg.eigvalsh(np.asarray(R, dtype=float))[..., ::-1]


def bell_M(R) -> np.ndarray | float:
    """Horodecki nonlocality measure ``Tr R - min eig(R) - 1``.

    Positive exactly when some CHSH setting violates the local bound.
    """
    r = r_eigs(R)
    return r[..., 0] + r[..., 1] - 1


def bell_B(M) -> np.ndarray | float:
    return np.sqrt(np.maximum(M, 0.0))


def chsh_max(R) -> np.ndarray | float:
    """Largest CHSH value over all measurement directions, ``2 sqrt(g)``."""
    r = r_eigs(R)
    g = np.maximum(r[..., 0] + r[..., 1], 0.0)
    return 2 * np.sqrt(g)


def fef_F(R) -> np.ndarray | float:
    """Rescaled fully-entangled fraction ``(Tr sqrt(R) - 1) / 2``.

    Evaluated as written, from the singular values of T; no sign
    correction for det(T) > 0 is applied, so for such states this
    overestimates ``2 f - 1`` (compare with :func:`fef_oracle`).
    """
    return (_clean_sqrt(r_eigs(R)).sum(axis=-1) - 1) / 2


def entropic_E(rho) -> np.ndarray | float:
    """Purity witness ``2 (Tr rho^2 - min(Tr rho_a^2, Tr rho_b^2))``."""
    rho = np.asarray(rho, dtype=complex)
    pa = purity(partial_trace(rho, "a"))
    pb = purity(partial_trace(rho, "b"))
    return 2 * (purity(rho) - np.minimum(pa, pb))


def entropic_E_equal_purity(R) -> np.ndarray | float:
    """``(Tr R - 1) / 2``; equals :func:`entropic_E` when both marginals are equally mixed."""
    R = np.asarray(R, dtype=float)
    return (np.trace(R, axis1=-2, axis2=-1) - 1) / 2


def negativity(rho) -> np.ndarray | float:
    """Twice the magnitude of the negative partial-transpose eigenvalue (1 for the singlet)."""
    lo = np.linalg.eigvalsh(partial_transpose(rho, "b"))[..., 0]
    return 2 * np.maximum(0.0, -lo) + 0.0


def concurrence(rho) -> np.ndarray | float:
    """Wootters concurrence.

    The decreasing square roots of eig(rho * rho~) are obtained as the
    singular values of ``W^T (Y (x) Y) W`` with ``W = V sqrt(diag(p))`` from
    the eigendecomposition of rho.  Round-off eigenvalues of rank-deficient
    states are zeroed first so they do not pick up square-root noise.
    """
    rho = np.asarray(rho, dtype=complex)
    p, v = np.linalg.eigh(rho)
    w = v * _clean_sqrt(p)[..., None, :]
    tau = np.swapaxes(w, -1, -2) @ _YY @ w
    lam = np.linalg.svd(tau, compute_uv=False)
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return np.maximum(0.0, c)


# --- fully-entangled fraction by direct search ------------------------------

def _unitary(angles) -> np.ndarray:
    a, b, c = angles
    rz = lambda t: np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]])
    ry = np.array([[np.cos(b / 2), -np.sin(b / 2)], [np.sin(b / 2), np.cos(b / 2)]])
    return rz(a) @ ry @ rz(c)


def _max_entangled(angles) -> np.ndarray:
    return np.kron(_unitary(angles), np.eye(2)) @ _PHI_PLUS


# coarse grid of starting angles, 2 x 4 x 2 = 16 points
_ORACLE_STARTS = [np.array(s) for s in itertools.product(
    (0.0, np.pi), (np.pi / 4, 3 * np.pi / 4, 5 * np.pi / 4, 7 * np.pi / 4), (0.0, np.pi / 2))]


def fef_oracle(rho, tol: float = 1e-9) -> float:
    """Rescaled fully-entangled fraction ``2 f - 1`` from its definition.

    ``f`` is the largest overlap ``<e|rho|e>`` over maximally entangled
    ``|e> = (U (x) 1)|Phi+>``; it is found by Nelder-Mead over the three
    Euler angles of ``U`` from a fixed grid of 16 starting points.
    """
    rho = np.asarray(rho, dtype=complex)

    def overlap(angles):
        e = _max_entangled(angles)
        return -np.real(e.conj() @ rho @ e)

    best = None
    for x0 in _ORACLE_STARTS:
        res = minimize(overlap, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": tol * 1e-3, "maxiter": 20000, "maxfev": 20000})
        if not res.success:
            log.debug("fef_oracle restart from %s did not converge: %s", x0, res.message)
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise OptimizerDiagnostic("fef_oracle: no restart converged")
    return float(2 * (-best.fun) - 1)


# --- aggregate report -------------------------------------------------------

@dataclass(frozen=True)
class WitnessReport:
    M: float
    B: float
    chsh_max: float
    F: float
    E: float
    N: float
    C: float
    eigs: tuple
    F_oracle: float | None = field(default=None)

    def as_record(self) -> dict:
        """Flat mapping in the fixed key order M, B, chsh_max, F, E, N, C, r1, r2, r3."""
        rec = {k: float(getattr(self, k)) for k in RECORD_KEYS[:7]}
        for k, val in zip(RECORD_KEYS[7:], self.eigs):
            rec[k] = float(val)
        if self.F_oracle is not None:
            rec["F_oracle"] = float(self.F_oracle)
        return rec


def report(rho, oracle: bool = False) -> WitnessReport:
    rho = np.asarray(rho, dtype=complex)
    R = r_matrix(correlation_matrix(rho))
    M = float(bell_M(R))
    f_oracle = None
    if oracle:
        try:
            f_oracle = fef_oracle(rho)
        except OptimizerDiagnostic as exc:
            log.warning("fully-entangled fraction search failed: %s", exc)
    return WitnessReport(
        M=M,
        B=float(bell_B(M)),
        chsh_max=float(chsh_max(R)),
        F=float(fef_F(R)),
        E=float(entropic_E(rho)),
        N=float(negativity(rho)),
        C=float(concurrence(rho)),
        eigs=tuple(float(v) for v in r_eigs(R)),
        F_oracle=f_oracle,
    )


def batch_witnesses(rhos) -> dict:
    """Vectorized N, M, E, F (plus B, C, chsh_max) for a stack of states."""
    rhos = np.asarray(rhos, dtype=complex)
    R = r_matrix(correlation_matrix(rhos))
    M = bell_M(R)
    return {
        "N": negativity(rhos),
        "M": M,
        "E": entropic_E(rhos),
        "F": fef_F(R),
        "B": bell_B(M),
        "C": concurrence(rhos),
        "chsh_max": chsh_max(R),
    }
