"""Resonance condition and wall-frequency sweeps.

A transition |b> -> |a> is driveable when the dilation coupling D_ab is
nonzero and the long-time Fourier integral of fdot at the transition
frequency (E_a - E_b)/hbar does not vanish.  For a sinusoidal drive the
integral grows linearly in t on resonance and stays bounded otherwise.

Sweeps use the exact propagator so peak positions are not an artifact
of first-order truncation.  Two metrics are recorded per frequency: the
final transition probability out of the initial mode averaged over the
last drive period (suppresses the fast non-RWA oscillation), and the
running maximum.  Peak detection operates on the running maximum, which
stays monotone in detuning even when the horizon extends past the first
full population cycle at resonance; the final-period metric does not.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .basis import BasisSet, ModeIndex
from .dynamics import (
    DriveProfile,
    EffectiveHamiltonianModel,
    Sinusoid,
    StateVector,
    TimeGrid,
    propagate_exact,
    transition_integral,
)
from .operators import OperatorMatrix


def velocity_spectrum(drive: DriveProfile, t: float, omega: float) -> complex:
    """Finite-time Fourier integral of fdot: Int_0^t fdot(u) exp(i omega u) du."""
    return transition_integral(drive, omega, t)


@dataclass(frozen=True)
class Transition:
    upper: ModeIndex           # higher-energy mode
    lower: ModeIndex
    frequency: float           # (E_upper - E_lower) / hbar, >= 0
    coupling: float            # |D_ab|


@dataclass(frozen=True)
class TransitionTable:
    entries: tuple[Transition, ...]

    def frequencies(self) -> np.ndarray:
        return np.array([e.frequency for e in self.entries])

    def closest(self, omega: float) -> Transition:
        if not self.entries:
            raise ValueError("transition table is empty")
        return min(self.entries, key=lambda e: abs(e.frequency - omega))


def transition_frequencies(basis: BasisSet, dilation: OperatorMatrix,
                           threshold: float = 1e-12) -> TransitionTable:
    """All coupled mode pairs with their gap frequencies, sorted by frequency.

    Pairs with different m never appear (their couplings are structural
    zeros), nor do diagonal pairs (the dilation matrix has zero diagonal).
    """
    hbar = basis.constants.hbar
    d_abs = np.abs(dilation.entries / (1j * hbar))
    energies = basis.energies()
    rows = []
    for i in range(basis.size):
        for j in range(i + 1, basis.size):
            if d_abs[i, j] <= threshold:
                continue
            hi, lo = (i, j) if energies[i] >= energies[j] else (j, i)
            rows.append(Transition(
                upper=basis.modes[hi].index,
                lower=basis.modes[lo].index,
                frequency=(energies[hi] - energies[lo]) / hbar,
                coupling=float(d_abs[i, j])))
    rows.sort(key=lambda e: (e.frequency, e.lower.m, e.lower.n, e.upper.n))
    return TransitionTable(entries=tuple(rows))


@dataclass(frozen=True)
class Peak:
    omega: float
    height: float


@dataclass(frozen=True)
class ScanResult:
    """Frequency sweep of long-horizon transition probability out of
    the initial mode, with detected peaks (on the running-max metric)."""

    omegas: np.ndarray
    metric_final: np.ndarray    # last-period average of 1 - P_initial
    metric_max: np.ndarray      # running maximum of 1 - P_initial
    peaks: tuple[Peak, ...]
    horizon_periods: float
    failures: tuple[tuple[float, str], ...]


def _scan_point(payload):
    (basis, dilation, m, n, epsilon, phase, omega, horizon, spp) = payload
    try:
        drive = DriveProfile(epsilon=epsilon, waveform=Sinusoid(omega=omega, phase=phase))
        model = EffectiveHamiltonianModel.build(basis, dilation, drive)
        grid = TimeGrid.for_periods(drive, horizon, spp)
        state0 = StateVector.single_mode(basis, m, n)
        traj = propagate_exact(state0, model, grid, store_states=True)
        out_prob = np.clip(1.0 - traj.population_of(m, n), 0.0, 1.0)
        metric_final = float(np.mean(out_prob[-(spp + 1):]))
        metric_max = float(np.max(out_prob))
        return omega, metric_final, metric_max, None
    except Exception as exc:   # per-point failure: scan continues
        return omega, float("nan"), float("nan"), f"{type(exc).__name__}: {exc}"


def detect_peaks(omegas: np.ndarray, metric: np.ndarray,
                 min_height: float = 1e-9) -> tuple[Peak, ...]:
    """Strict interior local maxima with three-point quadratic refinement."""
    peaks = []
    for i in range(1, len(omegas) - 1):
        y0, y1, y2 = metric[i - 1], metric[i], metric[i + 1]
        if np.isnan(y0) or np.isnan(y1) or np.isnan(y2):
            continue
        if not (y1 > y0 and y1 > y2 and y1 > min_height):
            continue
        denom = y0 - 2.0 * y1 + y2
        if denom == 0.0:
            peaks.append(Peak(omega=float(omegas[i]), height=float(y1)))
            continue
        shift = 0.5 * (y0 - y2) / denom
        shift = float(np.clip(shift, -1.0, 1.0))
        h = 0.5 * (omegas[i + 1] - omegas[i - 1])
        height = y1 - 0.25 * (y0 - y2) * shift
        peaks.append(Peak(omega=float(omegas[i] + shift * h), height=float(height)))
    peaks.sort(key=lambda p: -p.height)
    return tuple(peaks)


def resonance_scan(basis: BasisSet, dilation: OperatorMatrix,
                   initial_mode: tuple[int, int], epsilon: float,
                   omegas, horizon_periods: float = 30.0,
                   steps_per_period: int = 256, phase: float = 0.0,
                   threads: int = 1) -> ScanResult:
    """Sweep the drive frequency and record transition-probability metrics.

    Grid points are independent; with threads > 1 they run in a process
    pool.  Results are ordered by omega regardless of worker count, and
    per-point failures are recorded without aborting the sweep.
    """
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 1 or omegas.size < 2:
        raise ValueError("omega grid must be a 1-D array with at least 2 points")
    if np.any(np.diff(omegas) <= 0):
        raise ValueError("omega grid must be strictly increasing")
    if horizon_periods < 10:
        raise ValueError(f"scan horizon must be >= 10 periods, got {horizon_periods}")
    m, n = initial_mode
    basis.index_of(m, n)   # validates membership
    payloads = [(basis, dilation, m, n, epsilon, phase, float(w),
                 float(horizon_periods), int(steps_per_period)) for w in omegas]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_scan_point, payloads))
    else:
        rows = [_scan_point(p) for p in payloads]
    metric_final = np.array([r[1] for r in rows])
    metric_max = np.array([r[2] for r in rows])
    failures = tuple((r[0], r[3]) for r in rows if r[3] is not None)
    peaks = detect_peaks(omegas, metric_max)
    return ScanResult(omegas=omegas, metric_final=metric_final,
                      metric_max=metric_max, peaks=peaks,
                      horizon_periods=float(horizon_periods), failures=failures)
