"""Acceptance criteria, one test per criterion (6 and 8 are split into parts).

Each test prints a single PASS/FAIL line and the lines are repeated in the
terminal summary.  Tolerances and runtime limits are the ones the criteria
state; nothing is relaxed to make a criterion pass.
"""
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from tomofree.mle import LikelihoodProblem, ml_reconstruct
from tomofree.montecarlo import (
    DETECTION_TOL,
    curve_records,
    detection_counts,
    detects,
    family_curve,
    scatter,
    thresholds,
)
from tomofree.states import HILBERT_SCHMIDT, correlation_matrix, horodecki, pure, random_state, random_unitary, werner
from tomofree.swap import SETTINGS, collective_R_exact, estimate_R, simulate_counts
from tomofree.witnesses import (
    bell_B,
    bell_M,
    concurrence,
    entropic_E,
    fef_F,
    fef_oracle,
    negativity,
    r_matrix,
)
from _fixtures import DR_EXP, R_EXP, R_ML_REFERENCE, SHIFT_REFERENCE, SPECTRA_REFERENCE

SINGLET = np.array([0, 1, -1, 0]) / np.sqrt(2)
SINGLET_DM = np.outer(SINGLET, SINGLET).astype(complex)
VV = np.diag([0, 0, 0, 1.0]).astype(complex)


def verdict(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def witnesses(rho):
    R = r_matrix(correlation_matrix(rho))
    return np.array([bell_M(R), entropic_E(rho), fef_F(R)], dtype=float)


@pytest.fixture(scope="module")
def hs_scatter():
    t0 = time.perf_counter()
    data = scatter(100_000, HILBERT_SCHMIDT, seed=0)
    return data, time.perf_counter() - t0


def test_criterion_1_table_values():
    t0 = time.perf_counter()
    cases = {"singlet": (SINGLET_DM, (1, 1, 1)), "VV": (VV, (0, 0, 0)),
             "I/4": (np.eye(4, dtype=complex) / 4, (-1, -0.5, -0.5))}
    err = max(np.abs(witnesses(rho) - expected).max() for rho, expected in cases.values())
    dt = time.perf_counter() - t0
    verdict(1, err <= 1e-10 and dt < 1, f"(M,E,F) for singlet, |VV>, I/4 max error {err:.2e} (tol 1e-10), {dt:.2f} s")


def test_criterion_2_collective_measurement_identity():
    t0 = time.perf_counter()
    g = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        rho = random_state(g)
        R = r_matrix(correlation_matrix(rho))
        for s in SETTINGS:
            worst = max(worst, abs(collective_R_exact(rho, rho, s) - R[s.i - 1, s.j - 1]))
    dt = time.perf_counter() - t0
    verdict(2, worst <= 1e-10 and dt < 30, f"two-copy R vs T^T T over 1000 states, max error {worst:.2e}, {dt:.1f} s")


def test_criterion_3_werner_sign_changes():
    t0 = time.perf_counter()
    steps = 10_000
    c = family_curve("werner", steps)
    h = 1 / (steps - 1)
    targets = {"F": 1 / 3, "E": 1 / np.sqrt(3), "M": 1 / np.sqrt(2)}
    misses = {}
    for w, p_star in targets.items():
        sign = np.sign(c[w])
        flips = np.nonzero(sign[1:] != sign[:-1])[0]
        located = [(c["p"][k] + c["p"][k + 1]) / 2 for k in flips]
        misses[w] = min((abs(p - p_star) for p in located), default=np.inf)
    dt = time.perf_counter() - t0
    ok = all(m <= h for m in misses.values()) and dt < 10
    detail = ", ".join(f"{w} off by {m:.1e}" for w, m in misses.items())
    verdict(3, ok, f"{detail} (grid step {h:.1e}), {dt:.2f} s")


def test_criterion_4_family_thresholds():
    wr = thresholds(curve_records(family_curve("werner", 10_001)))
    hr = thresholds(curve_records(family_curve("horodecki", 10_001)))
    got = {"N_M": wr.N_M, "N_E": hr.N_E, "N_F": hr.N_F}
    reference = {"N_M": 0.5607, "N_E": 0.4120, "N_F": 0.2071}
    ok = all(abs(got[k] - reference[k]) <= 5e-4 for k in got)
    verdict(4, ok, ", ".join(f"{k}={got[k]:.5f} (reference {reference[k]})" for k in got))


def test_criterion_5_random_state_scatter(hs_scatter):
    data, dt = hs_scatter
    violations = 0
    for w, bound in (("M", 0.5607), ("E", 0.4120), ("F", 0.2071)):
        violations += int(((data.N > bound + 5e-3) & ~data.detected(w)).sum())
    c = detection_counts(data)
    ordered = c["F"] >= c["E"] >= c["M"]
    rep = thresholds(data)
    ok = violations == 0 and ordered and dt < 300
    verdict(5, ok, f"10^5 HS states: {violations} violations, detected F/E/M = {c['F']}/{c['E']}/{c['M']} "
                   f"of {c['entangled']} entangled, sampled N_M/N_E/N_F = {rep.N_M:.4f}/{rep.N_E:.4f}/"
                   f"{rep.N_F:.4f}, {dt:.1f} s")


@pytest.mark.slow
def test_criterion_7_simulated_round_trip():
    t0 = time.perf_counter()
    m = estimate_R(simulate_counts(SINGLET_DM, 0.1, 10**5, seed=2017), 0.1)
    res = ml_reconstruct(LikelihoodProblem.from_measured(m))
    M, F = float(bell_M(res.R_phys)), float(fef_F(res.R_phys))
    iu = np.triu_indices(3)
    z = []
    for seed in range(200):
        mm = estimate_R(simulate_counts(SINGLET_DM, 0.1, 10**5, seed=seed), 0.1)
        z.append(((mm.R - np.eye(3)) / mm.dR)[iu])
    std = np.std(z, axis=0, ddof=1)
    dt = time.perf_counter() - t0
    ok = M >= 0.95 and F >= 0.95 and np.all((std >= 0.8) & (std <= 1.25)) and dt < 120
    verdict(7, ok, f"M={M:.4f}, F={F:.4f}, residual std per entry {np.round(std, 3).tolist()}, {dt:.1f} s")


@pytest.fixture(scope="module")
def reference_fits():
    t0 = time.perf_counter()
    fits = {k: ml_reconstruct(LikelihoodProblem(R_EXP[k], DR_EXP[k])) for k in ("sep", "mix", "ent")}
    return fits, time.perf_counter() - t0


def test_criterion_6a_reference_estimates(reference_fits):
    fits, dt = reference_fits
    err = {k: float(np.abs(f.R_phys - R_ML_REFERENCE[k]).max()) for k, f in fits.items()}
    ok = all(e <= 0.005 for e in err.values()) and dt < 10
    verdict("6a", ok, "max entry deviation from reference ML estimate "
                      + ", ".join(f"{k} {e:.4f}" for k, e in err.items()) + f" (tol 0.005), {dt:.2f} s")


def test_criterion_6b_reference_spectra(reference_fits):
    fits, _ = reference_fits
    err = {k: float(np.abs(np.sort(f.eigs) - np.sort(SPECTRA_REFERENCE[k])).max()) for k, f in fits.items()}
    ok = all(e <= 0.01 for e in err.values())
    verdict("6b", ok, "spectrum deviation " + ", ".join(f"{k} {e:.4f}" for k, e in err.items()) + " (tol 0.01)")


def test_criterion_6c_shift_fractions(reference_fits):
    fits, _ = reference_fits
    got = {k: f.shift_fraction for k, f in fits.items()}
    ok = all(abs(got[k] - SHIFT_REFERENCE[k]) <= 0.05 for k in got)
    verdict("6c", ok, "shift fractions " + ", ".join(f"{k} {got[k]:.3f} (reference {SHIFT_REFERENCE[k]})"
                                                      for k in got) + " (tol 0.05)")


def test_criterion_8a_local_unitary_invariance():
    g = np.random.default_rng(8)
    drift = 0.0
    for _ in range(500):
        rho = random_state(g)
        U = np.kron(random_unitary(g), random_unitary(g))
        moved = U @ rho @ U.conj().T
        a = np.append(witnesses(rho), [negativity(rho), concurrence(rho)])
        b = np.append(witnesses(moved), [negativity(moved), concurrence(moved)])
        drift = max(drift, np.abs(a - b).max())
    verdict("8a", drift <= 1e-10, f"local-unitary drift of M,E,F,N,C over 500 states {drift:.2e} (tol 1e-10)")


def _random_qubit(g):
    v = g.normal(size=3)
    v /= np.linalg.norm(v)
    v *= 1.0 if g.random() < 0.3 else g.random() ** (1 / 3)
    return 0.5 * (np.eye(2) + v[0] * np.array([[0, 1], [1, 0]]) + v[1] * np.array([[0, -1j], [1j, 0]])
                  + v[2] * np.diag([1, -1]))


def test_criterion_8b_separable_soundness():
    g = np.random.default_rng(88)
    worst = -np.inf
    for k in range(10_000):
        if k % 2 == 0:
            rho = np.kron(_random_qubit(g), _random_qubit(g))
        else:
            w = g.dirichlet(np.ones(4))
            rho = sum(wi * np.kron(_random_qubit(g), _random_qubit(g)) for wi in w)
        worst = max(worst, witnesses(rho).max())
    verdict("8b", not detects(worst),
            f"largest M/E/F over 10^4 separable states {worst:.2e} (detection threshold {DETECTION_TOL:g})")


def test_criterion_8c_M_implies_F(hs_scatter):
    data, _ = hs_scatter
    bad = int(((data.M > 0) & ~(data.F > 0)).sum())
    verdict("8c", bad == 0, f"{bad} records with M > 0 and F <= 0 among {len(data)}")


@pytest.mark.parametrize("kind", ["werner", "horodecki"])
def test_criterion_8d_fef_against_oracle(kind):
    grid = np.linspace(0, 1, 21)
    make = werner if kind == "werner" else horodecki
    errs = []
    for p in grid:
        rho = make(p)
        errs.append(abs(float(fef_F(r_matrix(correlation_matrix(rho)))) - fef_oracle(rho)))
    errs = np.array(errs)
    worst = int(np.argmax(errs))
    verdict(f"8d-{kind}", errs.max() <= 1e-6,
            f"|fef_F - oracle| on 21-point {kind} grid max {errs.max():.2e} at p={grid[worst]:.2f} (tol 1e-6)")


def test_criterion_8e_pure_state_coincidence():
    worst = 0.0
    for p in np.linspace(0, 1, 101):
        rho = pure(p)
        N, C = negativity(rho), concurrence(rho)
        B = bell_B(bell_M(r_matrix(correlation_matrix(rho))))
        worst = max(worst, abs(N - C), abs(N - B), abs(C - B))
    verdict("8e", worst <= 1e-10, f"pure-state max |N-C|,|N-B|,|C-B| {worst:.2e} (tol 1e-10)")
