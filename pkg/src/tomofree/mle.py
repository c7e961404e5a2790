"""Maximum-likelihood correction of a measured R matrix.

A measured ``R_exp`` with standard errors ``dR`` may have eigenvalues
outside [0, 1].  The physical estimate maximizes

    L(R) = - sum_{i <= j} ((R_exp_ij - R_ij) / dR_ij)^2

over symmetric R with spectrum in [0, 1].  The constraint is built into
the parameterization ``R = O diag(sin^2 phi) O^T`` with O a rotation given
by three Euler angles, and the six angles are searched with a
Hooke-Jeeves pattern search (no derivatives).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import InvalidArgument, OptimizerDiagnostic

DR_FLOOR = 1e-6
EIG_TOL = 1e-9
_IU = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


@dataclass(frozen=True)
class LikelihoodProblem:
    R_exp: np.ndarray
    dR: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R_exp, dtype=float)
        d = np.asarray(self.dR, dtype=float)
        if R.shape != (3, 3) or d.shape != (3, 3):
            raise InvalidArgument("R_exp and dR must be 3x3")
        if np.any(~np.isfinite(R)) or np.any(~np.isfinite(d)):
            raise InvalidArgument("R_exp and dR must be finite")
        if np.any(d <= 0):
            raise InvalidArgument("standard errors dR must be positive")

    @classmethod
    def from_measured(cls, measured) -> "LikelihoodProblem":
        return cls(np.asarray(measured.R, dtype=float), np.asarray(measured.dR, dtype=float))

    def weights(self) -> np.ndarray:
        return np.maximum(np.asarray(self.dR, dtype=float), DR_FLOOR)

    def log_likelihood(self, R) -> float:
        R_exp = np.asarray(self.R_exp, dtype=float)
        d = self.weights()
        R = np.asarray(R, dtype=float)
        return -float(sum(((R_exp[i, j] - R[i, j]) / d[i, j]) ** 2 for i, j in _IU))


@dataclass(frozen=True)
class MLResult:
    R_phys: np.ndarray
    logL: float
    eigs: tuple
    iterations: int
    shift_fraction: float


def _rotation(a, b, c):
    """Rz(a) Ry(b) Rz(c) as nested tuples."""
    ca, sa = math.cos(a), math.sin(a)
    cb, sb = math.cos(b), math.sin(b)
    cc, sc = math.cos(c), math.sin(c)
    return (
        (ca * cb * cc - sa * sc, -ca * cb * sc - sa * cc, ca * sb),
        (sa * cb * cc + ca * sc, -sa * cb * sc + ca * cc, sa * sb),
        (-sb * cc, sb * sc, cb),
    )


def _compose(x):
    O = _rotation(x[0], x[1], x[2])
    s = (math.sin(x[3]) ** 2, math.sin(x[4]) ** 2, math.sin(x[5]) ** 2)
    return [[sum(O[i][k] * s[k] * O[j][k] for k in range(3)) for j in range(3)] for i in range(3)]


def compose(x) -> np.ndarray:
    """R matrix for the six search angles (three Euler angles, three spectral angles)."""
    R = np.array(_compose(x))
    return (R + R.T) / 2


def _start_from(R) -> list:
    w, v = np.linalg.eigh((np.asarray(R, dtype=float) + np.asarray(R, dtype=float).T) / 2)
    w = np.clip(w, 0.0, 1.0)
    if np.linalg.det(v) < 0:
        v[:, 0] = -v[:, 0]
    a, b, c = Rotation.from_matrix(v).as_euler("ZYZ")
    return [a, b, c] + [math.asin(math.sqrt(t)) for t in w]


def _pattern_search(f, x0, step=0.25, min_step=1e-10, tol=1e-12, max_evals=100_000):
    """Hooke-Jeeves search; returns (x, fx, evals, converged)."""
    n = len(x0)
    evals = 0

    def fe(x):
        nonlocal evals
        evals += 1
        return f(x)

    def explore(base, fbase, h):
        x = list(base)
        fx = fbase
        for k in range(n):
            for d in (h, -h):
                y = list(x)
                y[k] += d
                fy = fe(y)
                if fy < fx:
                    x, fx = y, fy
                    break
        return x, fx

    x = list(x0)
    fx = fe(x)
    while step >= min_step:
        if evals >= max_evals:
            return x, fx, evals, False
        y, fy = explore(x, fx, step)
        if fx - fy < tol:
            step /= 2
            continue
        # pattern moves along the successful direction
        while evals < max_evals:
            z = [2 * yi - xi for xi, yi in zip(x, y)]
            z, fz = explore(z, fe(z), step)
            x, fx = y, fy
            if fz < fy:
                y, fy = z, fz
            else:
                break
        x, fx = y, fy
    return x, fx, evals, True


def _is_physical(R) -> bool:
    w = np.linalg.eigvalsh(R)
    return bool(w[0] >= 0.0 and w[-1] <= 1.0)


# fixed perturbations of the clipped start, one row per extra restart
_PERTURBATIONS = np.random.default_rng(20170417).uniform(-0.6, 0.6, size=(8, 6))


def ml_reconstruct(p: LikelihoodProblem, restarts: int = 8) -> MLResult:
    """Physical R of maximal likelihood.

    A measured matrix that is already physical is returned unchanged.
    Otherwise the search starts from the eigendecomposition of ``R_exp``
    with its spectrum clipped to [0, 1], plus ``restarts`` perturbed
    copies of that start; the best restart wins, ties going to the lower
    index.
    """
    R_exp = np.asarray(p.R_exp, dtype=float)
    R_sym = (R_exp + R_exp.T) / 2
    d = p.weights()
    if np.allclose(R_exp, R_exp.T, rtol=0, atol=1e-12) and _is_physical(R_sym):
        return MLResult(R_exp.copy(), 0.0, _sorted_eigs(R_exp), 0, 0.0)

    target = [R_exp[i, j] for i, j in _IU]
    w = [1.0 / d[i, j] ** 2 for i, j in _IU]

    def chi2(x):
        R = _compose(x)
        return sum(wk * (t - R[i][j]) ** 2 for wk, t, (i, j) in zip(w, target, _IU))

    x0 = _start_from(R_exp)
    starts = [x0] + [list(np.add(x0, dx)) for dx in _PERTURBATIONS[:restarts]]
    best = None
    for idx, s in enumerate(starts):
        x, fx, evals, ok = _pattern_search(chi2, s)
        if best is None or fx < best[1] or (not best[3] and ok and fx <= best[1]):
            best = (x, fx, evals, ok)
    x, fx, evals, ok = best
    R = compose(x)
    if not ok:
        raise OptimizerDiagnostic("ml_reconstruct: no restart converged", best=R, best_value=-fx)
    logL = p.log_likelihood(R)
    return MLResult(R, logL, _sorted_eigs(R), evals, _shift(R_exp, R, d))


def _sorted_eigs(R) -> tuple:
    return tuple(float(v) for v in np.linalg.eigvalsh(np.asarray(R, dtype=float))[::-1])


def _shift(R_exp, R, d) -> float:
    return float(np.mean([abs(R[i, j] - R_exp[i, j]) / d[i, j] for i, j in _IU]))


def shift_diagnostic(p: LikelihoodProblem, result: MLResult) -> float:
    """Mean over the six independent entries of ``|R_phys - R_exp| / dR``."""
    return _shift(np.asarray(p.R_exp, dtype=float), np.asarray(result.R_phys, dtype=float), p.weights())


def werner_spectrum_model(p_mix: float, eigs_ent, eigs_mix) -> np.ndarray:
    """Spectrum of R for a mixture of a prepared singlet and a prepared mixed state.

    Interpolates as ``p^2 eig(R_ent) + (1 - p)^2 eig(R_mix)``.
    """
    if not (0.0 <= p_mix <= 1.0):
        raise InvalidArgument(f"mixing parameter must lie in [0, 1], got {p_mix!r}")
    eigs_ent = np.asarray(eigs_ent, dtype=float)
    eigs_mix = np.asarray(eigs_mix, dtype=float)
    if eigs_ent.shape != (3,) or eigs_mix.shape != (3,):
        raise InvalidArgument("eigenvalue vectors must have length 3")
    return p_mix**2 * eigs_ent + (1 - p_mix) ** 2 * eigs_mix
