"""Eigenbasis of the static-domain box: disc (2D) and segment (1D).

Disc modes are (2*pi)^(-1/2) * aleph * J_m(k r) * exp(i m theta) with k
fixed by the m-th order Bessel zeros; segment modes are the standard
sine eigenfunctions indexed with m = 0 so everything downstream is
dimension-agnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bessel
from .errors import DomainError
from .quadrature import QuadratureSpec, adaptive_quad, default_quadrature_spec

DISC = "disc"
SEGMENT = "segment"


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError(f"hbar must be > 0, got {self.hbar}")
        if self.mu <= 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")


@dataclass(frozen=True)
class BoxSpec:
    """Static reference box: a disc of radius r0 or a segment of length l."""

    dimension: int
    reference_size: float
    shape: str

    def __post_init__(self):
        if self.reference_size <= 0:
            raise ValueError(f"reference_size must be > 0, got {self.reference_size}")
        expected = {1: SEGMENT, 2: DISC}
        if self.dimension not in expected:
            raise ValueError(f"unsupported dimension {self.dimension} (1 or 2)")
        if self.shape != expected[self.dimension]:
            raise ValueError(
                f"shape {self.shape!r} inconsistent with dimension {self.dimension}")

    @classmethod
    def disc(cls, radius: float) -> "BoxSpec":
        return cls(dimension=2, reference_size=radius, shape=DISC)

    @classmethod
    def segment(cls, length: float) -> "BoxSpec":
        return cls(dimension=1, reference_size=length, shape=SEGMENT)


@dataclass(frozen=True, order=True)
class ModeIndex:
    m: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"radial index n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class Mode:
    """One eigenmode: quantum numbers plus derived spectral data."""

    index: ModeIndex
    zero: float            # dimensionless a_mn (n*pi for the segment)
    wavenumber: float      # a_mn / reference_size
    energy: float          # hbar^2 a_mn^2 / (2 mu size^2)
    normalization: float   # radial normalization constant, > 0
    shape: str = DISC


@dataclass(frozen=True)
class Truncation:
    m_min: int = 0
    m_max: int = 0
    n_max: int = 1

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.m_min > self.m_max:
            raise ValueError(f"m_min={self.m_min} exceeds m_max={self.m_max}")

    @property
    def m_values(self) -> range:
        return range(self.m_min, self.m_max + 1)


@dataclass(frozen=True)
class BasisSet:
    """Complete rectangle of modes within a truncation, sorted by (m, n)."""

    box: BoxSpec
    constants: PhysicalConstants
    modes: tuple[Mode, ...]
    truncation: Truncation
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        lookup = {(mo.index.m, mo.index.n): i for i, mo in enumerate(self.modes)}
        if len(lookup) != len(self.modes):
            raise ValueError("duplicate mode indices in basis")
        object.__setattr__(self, "_index", lookup)

    @property
    def size(self) -> int:
        return len(self.modes)

    def index_of(self, m: int, n: int) -> int:
        try:
            return self._index[(m, n)]
        except KeyError:
            raise KeyError(f"mode (m={m}, n={n}) not in basis") from None

    def mode(self, m: int, n: int) -> Mode:
        return self.modes[self.index_of(m, n)]

    def energies(self) -> np.ndarray:
        return np.array([mo.energy for mo in self.modes])

    def block_slices(self) -> list[tuple[int, slice]]:
        """Contiguous (m, slice) blocks; modes are sorted by (m, n)."""
        out = []
        start = 0
        while start < len(self.modes):
            m = self.modes[start].index.m
            stop = start
            while stop < len(self.modes) and self.modes[stop].index.m == m:
                stop += 1
            out.append((m, slice(start, stop)))
            start = stop
        return out


def normalization(box: BoxSpec, m: int, n: int,
                  spec: QuadratureSpec | None = None) -> float:
    """Radial normalization constant of mode (m, n).

    Disc: aleph such that the integral of r * (aleph * J_m(k r))^2 over
    [0, r0] is 1, computed by adaptive Gauss-Legendre quadrature (the
    closed form sqrt(2)/(r0*|J_{m+1}(a)|) is used in tests as a
    cross-check only).  Segment: sqrt(2/l), exact.
    """
    if box.shape == SEGMENT:
        if m != 0:
            raise ValueError("segment modes carry m = 0 only")
        return math.sqrt(2.0 / box.reference_size)
    a = bessel.bessel_zero(abs(m), n)
    k = a / box.reference_size
    mm = abs(m)
    integral = adaptive_quad(
        lambda r: r * bessel.bessel_j(mm, k * r) ** 2,
        0.0, box.reference_size,
        spec or default_quadrature_spec(),
        label=f"normalization (m={m}, n={n})")
    return 1.0 / math.sqrt(integral)


def _make_mode(box: BoxSpec, constants: PhysicalConstants, m: int, n: int,
               spec: QuadratureSpec | None) -> Mode:
    size = box.reference_size
    if box.shape == SEGMENT:
        a = n * math.pi
    else:
        a = bessel.bessel_zero(abs(m), n)
    k = a / size
    energy = constants.hbar**2 * a * a / (2.0 * constants.mu * size * size)
    aleph = normalization(box, m, n, spec)
    return Mode(index=ModeIndex(m=m, n=n), zero=a, wavenumber=k,
                energy=energy, normalization=aleph, shape=box.shape)


def build_basis(box: BoxSpec, constants: PhysicalConstants,
                truncation: Truncation,
                spec: QuadratureSpec | None = None) -> BasisSet:
    """Build the complete truncated basis, sorted by (m, n).

    For the segment the angular range is forced to {0}; negative m on
    the disc reuses the |m| radial data with the conjugate angular
    factor.
    """
    if box.shape == SEGMENT and (truncation.m_min != 0 or truncation.m_max != 0):
        raise ValueError("segment basis requires m_min = m_max = 0")
    modes = []
    for m in truncation.m_values:
        for n in range(1, truncation.n_max + 1):
            modes.append(_make_mode(box, constants, m, n, spec))
    return BasisSet(box=box, constants=constants, modes=tuple(modes),
                    truncation=truncation)


def eval_mode(mode: Mode, point) -> complex:
    """Evaluate a mode at a point of the static domain.

    Disc modes take (r, theta); segment modes take a scalar x in
    [-l/2, l/2].  Points outside the domain raise DomainError.  The
    reference size is recovered from zero/wavenumber.
    """
    size = mode.zero / mode.wavenumber
    if mode.shape == SEGMENT:
        x = float(point) if np.ndim(point) == 0 else float(point[0])
        if abs(x) > 0.5 * size * (1.0 + 1e-12):
            raise DomainError(f"x={x} outside segment [-{size/2}, {size/2}]")
        n = mode.index.n
        return complex(mode.normalization * math.sin(n * math.pi * (x / size + 0.5)))
    r, theta = point
    if r < 0 or r > size * (1.0 + 1e-12):
        raise DomainError(f"r={r} outside disc of radius {size}")
    m = mode.index.m
    radial = mode.normalization * bessel.bessel_j(abs(m), mode.wavenumber * r)
    return radial / math.sqrt(2.0 * math.pi) * complex(math.cos(m * theta),
                                                       math.sin(m * theta))
