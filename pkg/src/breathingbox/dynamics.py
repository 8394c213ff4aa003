"""Time evolution in the static domain.

The effective Hamiltonian is H(t) = lambda^-2 H0 + (lambda_dot/lambda) V
with lambda(t) = 1 + epsilon*f(t) and V the dilation potential.  Two
propagators are provided:

* propagate_exact: per-step exponential of the Hermitian midpoint
  Hamiltonian via eigendecomposition (second-order Magnus).  Unitarity
  is structural, so norm conservation checks assembly, not step control.
  Exact coefficients lambda^-2 and lambda_dot/lambda are used by
  default so the first-order formula is tested against the genuine
  dynamics.
* propagate_first_order: the perturbative amplitude formula
  a_a(t) = exp(-i E_a Theta(t)/hbar) [c_a(0)
           + eps * sum_b D_ab Int_0^t fdot(u) exp(i w_ab u) du c_b(0)],
  with Theta(t) = Int_0^t (1 - 2 eps f) ds, w_ab = (E_a - E_b)/hbar and
  D = V/(i hbar) the real antisymmetric dilation matrix.  The transition
  integral is analytic for sinusoidal drives, composite quadrature for
  tabulated ones.

No rotating-wave approximation anywhere: the fast superimposed
oscillation on resonant growth is part of the expected output.
"""

from __future__ import annotations

import cmath
import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import BasisSet
from .errors import PropagationError
from .operators import OperatorMatrix

MIN_STEPS_PER_REFERENCE_PERIOD = 64


@dataclass(frozen=True)
class Sinusoid:
    """f(t) = sin(omega t + phase)."""

    omega: float
    phase: float = 0.0

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"drive omega must be > 0, got {self.omega}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class Tabulated:
    """f sampled on a uniform time grid; derivative by centered differences."""

    t_start: float
    t_step: float
    values: tuple

    def __post_init__(self):
        if self.t_step <= 0:
            raise ValueError(f"tabulated t_step must be > 0, got {self.t_step}")
        if len(self.values) < 3:
            raise ValueError("tabulated waveform needs at least 3 samples")

    @property
    def t_end(self) -> float:
        return self.t_start + (len(self.values) - 1) * self.t_step

    @functools.cached_property
    def _grids(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        ts = self.t_start + self.t_step * np.arange(len(self.values))
        f = np.asarray(self.values, dtype=float)
        fdot = np.gradient(f, self.t_step)
        return ts, f, fdot

    def grids(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._grids


@dataclass(frozen=True)
class DriveProfile:
    """Wall-motion law lambda(t) = 1 + epsilon * f(t)."""

    epsilon: float
    waveform: Sinusoid | Tabulated

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if isinstance(self.waveform, Sinusoid):
            if self.epsilon >= 1.0:
                raise ValueError("epsilon must be < 1 so lambda stays positive")
        else:
            lam = 1.0 + self.epsilon * np.asarray(self.waveform.values, dtype=float)
            if np.any(lam <= 0):
                raise ValueError("tabulated drive gives lambda <= 0 somewhere")

    @property
    def period(self) -> float | None:
        return self.waveform.period if isinstance(self.waveform, Sinusoid) else None

    def f_eval(self, t: float) -> tuple[float, float]:
        """(f, fdot) at time t."""
        wf = self.waveform
        if isinstance(wf, Sinusoid):
            arg = wf.omega * t + wf.phase
            return math.sin(arg), wf.omega * math.cos(arg)
        ts, f, fdot = wf.grids()
        if t < ts[0] - 1e-12 or t > ts[-1] + 1e-12:
            raise PropagationError(
                f"dynamics: t={t} outside tabulated range [{ts[0]}, {ts[-1]}]")
        return float(np.interp(t, ts, f)), float(np.interp(t, ts, fdot))


def lambda_eval(drive: DriveProfile, t: float) -> tuple[float, float]:
    """Exact (lambda, lambda_dot) at time t."""
    f, fdot = drive.f_eval(t)
    return 1.0 + drive.epsilon * f, drive.epsilon * fdot


def phase_integral(drive: DriveProfile, t: float) -> float:
    """Theta(t) = Int_0^t (1 - 2 epsilon f(s)) ds."""
    wf = drive.waveform
    if isinstance(wf, Sinusoid):
        return t + (2.0 * drive.epsilon / wf.omega) * (
            math.cos(wf.omega * t + wf.phase) - math.cos(wf.phase))
    ts, f, _ = wf.grids()
    mask = ts <= t
    tt = np.concatenate([ts[mask], [t]])
    ff = np.concatenate([f[mask], [drive.f_eval(t)[0]]])
    return t - 2.0 * drive.epsilon * float(np.trapezoid(ff, tt))


def _exp_integral(k, t: float):
    """Int_0^t exp(i k u) du, elementwise in k, stable near k = 0."""
    ka = np.asarray(k, dtype=float)
    out = np.empty(ka.shape, dtype=complex)
    small = np.abs(ka) * max(abs(t), 1.0) < 1e-8
    ks = ka[small]
    out[small] = t * (1.0 + 0.5j * ks * t - (ks * t) ** 2 / 6.0)
    kb = ka[~small]
    out[~small] = (np.exp(1j * kb * t) - 1.0) / (1j * kb)
    return out if np.ndim(k) else complex(out[()])


def transition_integral(drive: DriveProfile, omega, t: float):
    """Int_0^t fdot(u) exp(i omega u) du; elementwise in omega.

    Analytic for sinusoids; composite trapezoid on the sample grid for
    tabulated waveforms.
    """
    wf = drive.waveform
    if isinstance(wf, Sinusoid):
        w0, phi = wf.omega, wf.phase
        plus = _exp_integral(np.asarray(omega) + w0, t)
        minus = _exp_integral(np.asarray(omega) - w0, t)
        result = 0.5 * w0 * (cmath.exp(1j * phi) * plus + cmath.exp(-1j * phi) * minus)
        return result if np.ndim(omega) else complex(result)
    ts, _, fdot = wf.grids()
    if t < ts[0] - 1e-12 or t > ts[-1] + 1e-12:
        raise PropagationError(
            f"dynamics: t={t} outside tabulated range [{ts[0]}, {ts[-1]}]")
    mask = ts <= t
    tt = np.concatenate([ts[mask], [t]])
    ff = np.concatenate([fdot[mask], [drive.f_eval(t)[1]]])
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    vals = np.trapezoid(ff[None, :] * np.exp(1j * np.outer(om, tt)), tt, axis=1)
    return vals if np.ndim(omega) else complex(vals[0])


@dataclass(frozen=True)
class TimeGrid:
    """Uniform stepping grid; dt may be negative for reversed propagation."""

    dt: float
    steps: int
    t0: float = 0.0

    def __post_init__(self):
        if self.dt == 0:
            raise ValueError("dt must be nonzero")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps + 1)

    @classmethod
    def for_periods(cls, drive: DriveProfile, periods: float,
                    steps_per_period: int, t0: float = 0.0) -> "TimeGrid":
        period = drive.period
        if period is None:
            raise ValueError("period-based grids need a sinusoidal drive")
        steps = int(round(periods * steps_per_period))
        return cls(dt=period / steps_per_period, steps=steps, t0=t0)


@dataclass(frozen=True)
class EffectiveHamiltonianModel:
    """H(t) = coeff0(t) * diag(h0) + coeff1(t) * V, Hermitian at every t."""

    basis: BasisSet
    h0: np.ndarray                 # diagonal energies, basis order
    dilation: OperatorMatrix       # V = i*hbar*D
    drive: DriveProfile

    @classmethod
    def build(cls, basis: BasisSet, dilation: OperatorMatrix,
              drive: DriveProfile) -> "EffectiveHamiltonianModel":
        return cls(basis=basis, h0=basis.energies(), dilation=dilation, drive=drive)

    def coefficients(self, t: float, first_order: bool = False) -> tuple[float, float]:
        if first_order:
            f, fdot = self.drive.f_eval(t)
            eps = self.drive.epsilon
            return 1.0 - 2.0 * eps * f, eps * fdot
        lam, lamdot = lambda_eval(self.drive, t)
        return lam**-2, lamdot / lam


def h_eff(model: EffectiveHamiltonianModel, t: float,
          first_order_coefficients: bool = False) -> np.ndarray:
    """Effective Hamiltonian matrix at time t (exact coefficients by default)."""
    alpha, beta = model.coefficients(t, first_order=first_order_coefficients)
    h = beta * model.dilation.entries
    h[np.diag_indices_from(h)] += alpha * model.h0
    return h


@dataclass(frozen=True)
class StateVector:
    """Complex coefficients over the basis mode order."""

    basis: BasisSet
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (self.basis.size,):
            raise ValueError(
                f"coefficient shape {c.shape} does not match basis size {self.basis.size}")
        object.__setattr__(self, "coefficients", c)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    @classmethod
    def single_mode(cls, basis: BasisSet, m: int, n: int) -> "StateVector":
        c = np.zeros(basis.size, dtype=complex)
        c[basis.index_of(m, n)] = 1.0
        return cls(basis=basis, coefficients=c)

    @classmethod
    def superposition(cls, basis: BasisSet, weighted_modes) -> "StateVector":
        """weighted_modes: iterable of (m, n, weight); normalized on build."""
        c = np.zeros(basis.size, dtype=complex)
        for m, n, w in weighted_modes:
            c[basis.index_of(m, n)] += complex(w)
        nrm = np.linalg.norm(c)
        if nrm == 0:
            raise ValueError("superposition weights are all zero")
        return cls(basis=basis, coefficients=c / nrm)


@dataclass(frozen=True)
class Trajectory:
    """Sampled evolution: times, optional state snapshots, norm and lambda series."""

    basis: BasisSet
    drive: DriveProfile
    times: np.ndarray              # shape (S,), strictly monotonic
    states: np.ndarray | None      # shape (S, N) complex, or None
    norms: np.ndarray              # shape (S,)
    lambdas: np.ndarray            # shape (S,)
    propagator: str

    @property
    def times_in_periods(self) -> np.ndarray | None:
        period = self.drive.period
        return None if period is None else self.times / period

    def populations(self) -> np.ndarray:
        if self.states is None:
            raise PropagationError("dynamics: trajectory was run without stored states")
        return np.abs(self.states) ** 2

    def population_of(self, m: int, n: int) -> np.ndarray:
        return self.populations()[:, self.basis.index_of(m, n)]


def _validate_grid(model: EffectiveHamiltonianModel, grid: TimeGrid) -> None:
    e_max = float(np.max(model.h0))
    hbar = model.basis.constants.hbar
    period = model.drive.period
    if period is None:
        wf = model.drive.waveform
        period = wf.t_end - wf.t_start
    reference = max(period, hbar / e_max if e_max > 0 else period)
    if abs(grid.dt) > reference / MIN_STEPS_PER_REFERENCE_PERIOD:
        raise PropagationError(
            f"dynamics: dt={abs(grid.dt):.3e} too coarse; need >= "
            f"{MIN_STEPS_PER_REFERENCE_PERIOD} steps per reference period {reference:.3e}")


def propagate_exact(state0: StateVector, model: EffectiveHamiltonianModel,
                    grid: TimeGrid, *, coefficients: str = "exact",
                    store_states: bool = True) -> Trajectory:
    """Unitary midpoint-exponential propagation of i*hbar dc/dt = H(t) c.

    Each step applies exp(-i H(t_mid) dt / hbar) through an
    eigendecomposition per m-block (H is block diagonal in m).  Norm
    drift beyond 1e-8 aborts: with structurally unitary steps it can
    only indicate broken assembly.
    """
    if coefficients not in ("exact", "first_order"):
        raise ValueError(f"unknown coefficient mode {coefficients!r}")
    if abs(state0.norm - 1.0) > 1e-9:
        raise PropagationError(
            f"dynamics: initial state norm {state0.norm} is not 1")
    _validate_grid(model, grid)
    first_order = coefficients == "first_order"
    hbar = model.basis.constants.hbar
    blocks = model.basis.block_slices()
    h0_blocks = [model.h0[sl] for _, sl in blocks]
    v_blocks = [np.ascontiguousarray(model.dilation.entries[sl, sl]) for _, sl in blocks]

    c = state0.coefficients.copy()
    times = grid.times
    n_samples = grid.steps + 1
    states = np.empty((n_samples, c.size), dtype=complex) if store_states else None
    norms = np.empty(n_samples)
    lambdas = np.empty(n_samples)

    def record(i):
        if states is not None:
            states[i] = c
        norms[i] = np.linalg.norm(c)
        lambdas[i] = lambda_eval(model.drive, float(times[i]))[0]

    record(0)
    for k in range(grid.steps):
        t_mid = float(times[k]) + 0.5 * grid.dt
        alpha, beta = model.coefficients(t_mid, first_order=first_order)
        for (_, sl), e_blk, v_blk in zip(blocks, h0_blocks, v_blocks):
            h = beta * v_blk
            h[np.diag_indices_from(h)] += alpha * e_blk
            w, u = np.linalg.eigh(h)
            phases = np.exp(-1j * w * (grid.dt / hbar))
            c[sl] = u @ (phases * (u.conj().T @ c[sl]))
        record(k + 1)
    drift = float(np.max(np.abs(norms - 1.0)))
    if drift > 1e-8:
        raise PropagationError(
            f"dynamics: norm drift {drift:.3e} exceeds 1e-8; assembly is inconsistent")
    return Trajectory(basis=model.basis, drive=model.drive, times=times,
                      states=states, norms=norms, lambdas=lambdas,
                      propagator=f"exact[{coefficients}]")


def propagate_first_order(state0: StateVector, model: EffectiveHamiltonianModel,
                          grid: TimeGrid, *, store_states: bool = True) -> Trajectory:
    """First-order perturbative amplitudes on the same sampling grid.

    Amplitudes are not renormalized: the formula's norm error is
    O(epsilon^2) and is part of what the exact-propagator comparison
    measures.
    """
    if abs(state0.norm - 1.0) > 1e-9:
        raise PropagationError(
            f"dynamics: initial state norm {state0.norm} is not 1")
    eps = model.drive.epsilon
    if eps > 0.1:
        warnings.warn(f"epsilon={eps} is large for first-order perturbation theory",
                      stacklevel=2)
    hbar = model.basis.constants.hbar
    energies = model.h0
    d_real = (model.dilation.entries / (1j * hbar)).real
    omega_ab = (energies[:, None] - energies[None, :]) / hbar
    coupled = d_real != 0.0
    omega_flat = omega_ab[coupled]

    c0 = state0.coefficients
    times = grid.times
    n_samples = grid.steps + 1
    states = np.empty((n_samples, c0.size), dtype=complex) if store_states else None
    norms = np.empty(n_samples)
    lambdas = np.empty(n_samples)
    transfer = np.zeros_like(d_real, dtype=complex)
    for i, t in enumerate(times):
        t = float(t)
        theta = phase_integral(model.drive, t)
        transfer[coupled] = transition_integral(model.drive, omega_flat, t)
        amps = c0 + eps * ((d_real * transfer) @ c0)
        amps *= np.exp(-1j * energies * (theta / hbar))
        if states is not None:
            states[i] = amps
        norms[i] = np.linalg.norm(amps)
        lambdas[i] = lambda_eval(model.drive, t)[0]
    return Trajectory(basis=model.basis, drive=model.drive, times=times,
                      states=states, norms=norms, lambdas=lambdas,
                      propagator="first_order")


OBSERVABLES = ("populations", "mean_radius_static", "mean_radius_physical", "norm")


def observables(trajectory: Trajectory, which: str,
                position: OperatorMatrix | None = None) -> np.ndarray:
    """Derived time series from a trajectory.

    populations: |<mode|psi>|^2 per mode, shape (S, N).
    mean_radius_static: <r> in the static domain (needs position matrix).
    mean_radius_physical: lambda(t) * <r>_static, lengths rescaled back
    to the moving domain.
    norm: the recorded norm series.
    """
    if which == "norm":
        return trajectory.norms
    if trajectory.states is None:
        raise PropagationError(
            f"dynamics: observable {which!r} needs stored states")
    if which == "populations":
        return trajectory.populations()
    if which in ("mean_radius_static", "mean_radius_physical"):
        if position is None:
            raise ValueError(f"observable {which!r} needs the position matrix")
        s = trajectory.states
        mean_r = np.einsum("si,ij,sj->s", s.conj(), position.entries, s).real
        if which == "mean_radius_physical":
            mean_r = trajectory.lambdas * mean_r
        return mean_r
    raise ValueError(f"unknown observable {which!r}; expected one of {OBSERVABLES}")
