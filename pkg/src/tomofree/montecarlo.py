"""Witness-versus-negativity statistics over random states and state families."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidArgument
from .states import HILBERT_SCHMIDT, RandomStateMeasure, StateFamily, make_family, random_state
from .witnesses import batch_witnesses

WITNESSES = ("M", "E", "F")
ENTANGLED_TOL = 1e-9
# a witness detects entanglement only when it clears round-off above zero
DETECTION_TOL = 1e-12


def detects(value) -> np.ndarray | bool:
    return np.asarray(value) > DETECTION_TOL


@dataclass(frozen=True)
class ScatterRecord:
    N: float
    M: float
    E: float
    F: float

    @property
    def detected_by(self) -> frozenset:
        return frozenset(w for w in WITNESSES if detects(getattr(self, w)))


@dataclass(frozen=True)
class ScatterData:
    """Column-oriented scatter sample; indexing yields :class:`ScatterRecord`."""

    N: np.ndarray
    M: np.ndarray
    E: np.ndarray
    F: np.ndarray
    measure: RandomStateMeasure | None = None
    seed: int | None = None

    def __len__(self):
        return len(self.N)

    def __getitem__(self, k) -> ScatterRecord:
        return ScatterRecord(float(self.N[k]), float(self.M[k]), float(self.E[k]), float(self.F[k]))

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    def detected(self, witness: str) -> np.ndarray:
        return detects(getattr(self, witness))

    def entangled(self) -> np.ndarray:
        return self.N > ENTANGLED_TOL

    @classmethod
    def from_records(cls, records: Iterable[ScatterRecord]) -> "ScatterData":
        rows = [(r.N, r.M, r.E, r.F) for r in records]
        if not rows:
            return cls(*(np.empty(0) for _ in range(4)))
        arr = np.array(rows, dtype=float)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])


def _sample_states(seed: int, start: int, stop: int, measure: RandomStateMeasure) -> np.ndarray:
    # one child stream per sample index: output is independent of chunking
    out = np.empty((stop - start, 4, 4), dtype=complex)
    for row, k in enumerate(range(start, stop)):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
        out[row] = random_state(rng, measure)
    return out


def _chunk(args):
    seed, start, stop, measure = args
    w = batch_witnesses(_sample_states(seed, start, stop, measure))
    return np.stack([w["N"], w["M"], w["E"], w["F"]])


def scatter(n: int, measure: RandomStateMeasure = HILBERT_SCHMIDT, seed: int = 0,
            workers: int = 1, chunk_size: int = 10_000) -> ScatterData:
    """Witnesses of ``n`` random states.

    Sample ``k`` is drawn from ``SeedSequence(seed, spawn_key=(k,))`` so the
    result is bit-identical for any ``workers`` and ``chunk_size``.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgument(f"sample count must be a positive integer, got {n!r}")
    if workers < 1 or chunk_size < 1:
        raise InvalidArgument("workers and chunk_size must be positive")
    n = int(n)
    jobs = [(seed, a, min(a + chunk_size, n), measure) for a in range(0, n, chunk_size)]
    if workers == 1 or len(jobs) == 1:
        parts = [_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk, jobs))
    data = np.concatenate(parts, axis=1)
    return ScatterData(data[0], data[1], data[2], data[3], measure=measure, seed=seed)


@dataclass(frozen=True)
class ThresholdReport:
    """Largest negativity among entangled states each witness misses."""

    N_M: float
    N_E: float
    N_F: float
    sample_count: int
    measure: RandomStateMeasure | None = None

    def as_record(self) -> dict:
        return {
            "N_M": self.N_M,
            "N_E": self.N_E,
            "N_F": self.N_F,
            "sample_count": self.sample_count,
            "measure": "" if self.measure is None else str(self.measure),
        }


def thresholds(records) -> ThresholdReport:
    """N_w = max N over entangled records (N > 1e-9) not detected by witness w.

    A witness value counts as a detection only when it is strictly positive
    beyond round-off; witnesses that sit exactly at zero (e.g. F on Horodecki
    states with p > 1/2) miss the state.
    """
    data = records if isinstance(records, ScatterData) else ScatterData.from_records(records)
    if len(data) == 0:
        raise InvalidArgument("thresholds need at least one record")
    ent = data.entangled()
    out = {}
    for w in WITNESSES:
        missed = ent & ~data.detected(w)
        out[w] = float(data.N[missed].max()) if missed.any() else 0.0
    return ThresholdReport(out["M"], out["E"], out["F"], len(data), data.measure)


def detection_counts(data: ScatterData) -> dict:
    """Number of entangled records each witness detects, plus the entangled total."""
    ent = data.entangled()
    counts = {w: int((ent & data.detected(w)).sum()) for w in WITNESSES}
    counts["entangled"] = int(ent.sum())
    return counts


def family_curve(kind: str, grid_points: int, p_from: float = 0.0, p_to: float = 1.0) -> dict:
    """Exact witnesses along a uniform p grid of a reference family.

    Returns arrays keyed ``p, N, M, E, F, B, C``.
    """
    if isinstance(grid_points, bool) or int(grid_points) != grid_points or grid_points < 2:
        raise InvalidArgument(f"grid_points must be an integer >= 2, got {grid_points!r}")
    if not (0.0 <= p_from <= p_to <= 1.0):
        raise InvalidArgument(f"need 0 <= from <= to <= 1, got from={p_from}, to={p_to}")
    p = np.linspace(p_from, p_to, int(grid_points))
    rhos = np.array([make_family(StateFamily(kind, float(v))) for v in p])
    w = batch_witnesses(rhos)
    return {"p": p, "N": w["N"], "M": w["M"], "E": w["E"], "F": w["F"], "B": w["B"], "C": w["C"]}


def curve_records(curve: dict) -> ScatterData:
    return ScatterData(curve["N"], curve["M"], curve["E"], curve["F"])


def zero_crossings(p, values) -> list:
    """Grid intervals (p_k, p_k+1) across which the detection status flips."""
    det = detects(values)
    idx = np.nonzero(det[1:] != det[:-1])[0]
    return [(float(p[k]), float(p[k + 1])) for k in idx]
